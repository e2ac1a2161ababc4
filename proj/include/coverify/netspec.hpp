// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coverify/fixed_point.hpp"
#include "coverify/tensor.hpp"

namespace coverify {

struct ConvLayer {
    std::size_t filters = 1;
    std::size_t kernel = 1;
    std::size_t stride = 1;
    std::size_t pad = 0;
    friend bool operator==(const ConvLayer&, const ConvLayer&) = default;
};

enum class PoolKind { kMax, kAvg };

struct PoolLayer {
    PoolKind kind = PoolKind::kMax;
    std::size_t kernel = 2;
    std::size_t stride = 2;
    friend bool operator==(const PoolLayer&, const PoolLayer&) = default;
};

struct ReluLayer {
    friend bool operator==(const ReluLayer&, const ReluLayer&) = default;
};

struct FcLayer {
    std::size_t units = 1;
    friend bool operator==(const FcLayer&, const FcLayer&) = default;
};

struct LayerSpec {
    std::string name;
    std::variant<ConvLayer, PoolLayer, ReluLayer, FcLayer> op;

    bool has_parameters() const noexcept {
        return std::holds_alternative<ConvLayer>(op) || std::holds_alternative<FcLayer>(op);
    }
    std::string_view kind_name() const noexcept;

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct NetworkSpec {
    std::string name;
    Shape input_shape;
    std::vector<LayerSpec> layers;

    /// nullptr when absent.
    const LayerSpec* find(std::string_view layer) const noexcept;

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Output shape of one layer applied to `in`. Throws ValidationError naming the layer when a
/// spatial dimension would become non-positive.
Shape layer_output_shape(const LayerSpec& layer, const Shape& in);

/// Semantic checks shared by the parser and programmatic construction: hyperparameter ranges,
/// unique names, layer ordering after fc, positive inferred dimensions.
void validate(const NetworkSpec& net);

NetworkSpec parse_topology(std::istream& in);
NetworkSpec parse_topology(std::string_view text);
std::string format_topology(const NetworkSpec& net);

struct LayerShape {
    std::string name;
    Shape shape;
    std::size_t count() const noexcept { return shape.count(); }
    friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

/// Per-layer output shapes in execution order. `net` must be valid.
std::vector<LayerShape> infer_shapes(const NetworkSpec& net);

/// Input shape seen by each layer, parallel to net.layers.
std::vector<Shape> layer_input_shapes(const NetworkSpec& net);

struct LayerParameters {
    std::string layer;
    std::vector<double> weights;
    std::vector<double> biases;
    friend bool operator==(const LayerParameters&, const LayerParameters&) = default;
};

struct ParameterCounts {
    std::string layer;
    std::size_t weights = 0;
    std::size_t biases = 0;
};

/// Expected weight/bias counts for every parameterized layer, in layer order.
/// conv: [F][C][K][K] + [F]; fc: [U][fan_in] + [U].
std::vector<ParameterCounts> parameter_counts(const NetworkSpec& net);

/// Weights and biases of the parameterized layers, in network order.
class ParameterSet {
public:
    ParameterSet() = default;
    explicit ParameterSet(std::vector<LayerParameters> layers) : layers_(std::move(layers)) {}

    const std::vector<LayerParameters>& layers() const noexcept { return layers_; }
    std::vector<LayerParameters>& layers() noexcept { return layers_; }

    /// nullptr when absent.
    const LayerParameters* find(std::string_view layer) const noexcept;
    LayerParameters* find(std::string_view layer) noexcept;
    /// Throws ValidationError when absent.
    const LayerParameters& at(std::string_view layer) const;

    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

private:
    std::vector<LayerParameters> layers_;
};

/// Throws ValidationError unless `params` holds exactly the blocks and counts `net` requires.
void check_parameters(const ParameterSet& params, const NetworkSpec& net);

ParameterSet load_parameters(std::istream& in, const NetworkSpec& net);
void write_parameters(const ParameterSet& params, const NetworkSpec& net, std::ostream& out);

/// Replaces every weight and bias by its truncated fixed-point value.
ParameterSet quantize_parameters(const ParameterSet& params, FixedPointFormat fmt);

}  // namespace coverify
