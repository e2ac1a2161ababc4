// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "coverify/engines.hpp"

namespace coverify {

/// FIFO of scalar elements between hardware units.
class ElementStream {
public:
    ElementStream() = default;
    explicit ElementStream(std::vector<double> elements) : buffer_(std::move(elements)) {}

    void write(double v) { buffer_.push_back(v); }
    void write(std::span<const double> vs) { buffer_.insert(buffer_.end(), vs.begin(), vs.end()); }

    std::size_t available() const noexcept { return buffer_.size() - head_; }
    bool empty() const noexcept { return available() == 0; }

    /// Pops exactly n elements. Caller checks available() first.
    std::vector<double> read(std::size_t n);
    std::vector<double> drain() { return read(available()); }

private:
    std::vector<double> buffer_;
    std::size_t head_ = 0;
};

/// Output tap of one layer unit.
struct DmaChannel {
    std::string layer;
    ElementStream stream;
};

/// Chain of per-layer units connected by streams. Each unit must consume exactly its input
/// element count; a short stream is an underflow and leftovers are an overflow, both reported
/// as EngineError naming the unit.
class StreamExecutor {
public:
    /// cfg.stage must be hw; throws ConfigError otherwise. `net` and `params` are borrowed and
    /// must outlive the executor.
    StreamExecutor(const NetworkSpec& net, const ParameterSet& params, StageConfig cfg);

    /// Consumes `input` and returns one drained channel per layer, in layer order.
    std::vector<DmaChannel> execute(ElementStream& input) const;

private:
    const NetworkSpec& net_;
    const ParameterSet& params_;
    StageConfig cfg_;
    std::vector<Shape> input_shapes_;
};

/// Serializes `image` into an element stream (channel-major, row-major), drives the executor and
/// collects the channels into a hw BlobDump. The prediction is the argmax of the last channel.
BlobDump run_hw_stream(const NetworkSpec& net, const ParameterSet& params, const Tensor& image,
                       const StageConfig& cfg, std::string image_id = "image");

}  // namespace coverify
