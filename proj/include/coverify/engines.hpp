// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

// Layer kernels and the three execution stages: software reference (double), design
// (float32 or fixed point) and hardware (stream executor, see hw_stream.hpp).

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coverify/fixed_point.hpp"
#include "coverify/netspec.hpp"
#include "coverify/tensor.hpp"

namespace coverify {

struct DoubleMode {
    friend bool operator==(const DoubleMode&, const DoubleMode&) = default;
};

struct Float32Mode {
    friend bool operator==(const Float32Mode&, const Float32Mode&) = default;
};

struct FixedMode {
    FixedPointFormat weights{8, 6};
    FixedPointFormat activations{24, 12};
    friend bool operator==(const FixedMode&, const FixedMode&) = default;
};

using NumericMode = std::variant<DoubleMode, Float32Mode, FixedMode>;

/// "double", "float32" or "fixed:w<T>.<F>:a<T>.<F>".
std::string to_string(const NumericMode& mode);
/// Throws ConfigError.
NumericMode parse_numeric_mode(std::string_view text);

enum class Stage { kSw, kDesign, kHw };

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view text);

struct ScaleFault {
    double factor = 1.0;
    friend bool operator==(const ScaleFault&, const ScaleFault&) = default;
};
struct ZeroFault {
    std::size_t index = 0;
    friend bool operator==(const ZeroFault&, const ZeroFault&) = default;
};
struct BitflipFault {
    std::size_t index = 0;
    unsigned bit = 0;
    friend bool operator==(const BitflipFault&, const BitflipFault&) = default;
};

/// Deliberate corruption of one hardware layer.
///
/// scale: parameterized layers run with every weight multiplied by the factor; layers without
///        parameters have their output multiplied instead.
/// zero: output element `index` is forced to zero.
/// bitflip: bit `bit` of output element `index` is inverted in the stage's storage encoding
///          (two's-complement raw value in fixed mode, IEEE single bits in float32 mode).
struct FaultSpec {
    std::string layer;
    std::variant<ScaleFault, ZeroFault, BitflipFault> kind;

    friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

/// "<layer>:scale:<factor>", "<layer>:zero:<index>", "<layer>:bitflip:<index>,<bit>". Throws ConfigError.
FaultSpec parse_fault(std::string_view text);
std::string to_string(const FaultSpec& fault);

struct StageConfig {
    Stage stage = Stage::kSw;
    NumericMode mode = DoubleMode{};
    std::optional<FaultSpec> fault;

    /// Throws ConfigError: sw must be double, design/hw must not be, faults are hw-only and must
    /// name an existing layer with an in-range index.
    void validate(const NetworkSpec& net) const;
};

struct LayerRecord {
    std::string name;
    std::vector<double> values;
    friend bool operator==(const LayerRecord&, const LayerRecord&) = default;
};

/// Per-layer outputs of one image through one stage (File_SW / File_Design / File_HW content).
struct BlobDump {
    Stage stage = Stage::kSw;
    std::string image_id;
    std::vector<LayerRecord> layers;
    std::size_t prediction = 0;

    friend bool operator==(const BlobDump&, const BlobDump&) = default;
};

/// Converts values into the storage domain of `mode`: float32 rounds to single precision, fixed
/// truncates to the activation format, double is the identity.
Tensor enter_mode(const Tensor& t, const NumericMode& mode);

Tensor conv2d_forward(const Tensor& input, const ConvLayer& conv, std::span<const double> weights,
                      std::span<const double> biases, const NumericMode& mode);
Tensor pool_forward(const Tensor& input, const PoolLayer& pool, const NumericMode& mode);
Tensor relu_forward(const Tensor& input);
Tensor fc_forward(const Tensor& input, const FcLayer& fc, std::span<const double> weights,
                  std::span<const double> biases, const NumericMode& mode);

/// Index of the largest value; ties go to the lowest index. `values` must be non-empty.
std::size_t predict(std::span<const double> values);

/// Runs one layer, pulling its weights from `params` when it has any.
Tensor forward_layer(const Tensor& input, const LayerSpec& layer, const ParameterSet& params,
                     const NumericMode& mode);

/// Same as forward_layer but with `fault` applied when it targets this layer.
Tensor forward_layer_with_fault(const Tensor& input, const LayerSpec& layer, const ParameterSet& params,
                                const NumericMode& mode, const std::optional<FaultSpec>& fault);

/// Runs the sw or design stage layer by layer. Stored values are the stage's own representation
/// widened to double (dequantized reals in fixed mode).
BlobDump run_stage(const NetworkSpec& net, const ParameterSet& params, const Tensor& image,
                   const StageConfig& cfg, std::string image_id = "image");

}  // namespace coverify
