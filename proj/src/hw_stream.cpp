// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "coverify/hw_stream.hpp"

#include "coverify/error.hpp"

namespace coverify {

std::vector<double> ElementStream::read(std::size_t n) {
    n = std::min(n, available());
    std::vector<double> out(buffer_.begin() + static_cast<std::ptrdiff_t>(head_),
                            buffer_.begin() + static_cast<std::ptrdiff_t>(head_ + n));
    head_ += n;
    if (head_ == buffer_.size()) {
        buffer_.clear();
        head_ = 0;
    }
    return out;
}

StreamExecutor::StreamExecutor(const NetworkSpec& net, const ParameterSet& params, StageConfig cfg)
    : net_(net), params_(params), cfg_(std::move(cfg)), input_shapes_(layer_input_shapes(net)) {
    if (cfg_.stage != Stage::kHw) {
        throw ConfigError("stream executor requires the hw stage");
    }
    cfg_.validate(net_);
    check_parameters(params_, net_);
}

std::vector<DmaChannel> StreamExecutor::execute(ElementStream& input) const {
    std::vector<DmaChannel> channels;
    channels.reserve(net_.layers.size());
    ElementStream link;
    ElementStream* upstream = &input;
    for (std::size_t i = 0; i < net_.layers.size(); ++i) {
        const LayerSpec& layer = net_.layers[i];
        const std::size_t need = input_shapes_[i].count();
        if (upstream->available() < need) {
            throw EngineError("stream underflow at layer " + layer.name + ": expected " + std::to_string(need) +
                              " elements, received " + std::to_string(upstream->available()));
        }
        Tensor in(input_shapes_[i], upstream->read(need));
        if (!upstream->empty()) {
            throw EngineError("stream overflow at layer " + layer.name + ": " +
                              std::to_string(upstream->available()) + " unconsumed elements");
        }
        if (i == 0) {
            in = enter_mode(in, cfg_.mode);
        }
        const Tensor out = forward_layer_with_fault(in, layer, params_, cfg_.mode, cfg_.fault);
        if (!out.all_finite()) {
            throw EngineError("non-finite value produced at layer " + layer.name);
        }
        DmaChannel channel{layer.name, {}};
        channel.stream.write(out.values());
        channels.push_back(std::move(channel));

        link = ElementStream{};
        link.write(out.values());
        upstream = &link;
    }
    return channels;
}

BlobDump run_hw_stream(const NetworkSpec& net, const ParameterSet& params, const Tensor& image,
                       const StageConfig& cfg, std::string image_id) {
    const StreamExecutor executor(net, params, cfg);
    ElementStream input(std::vector<double>(image.values().begin(), image.values().end()));
    auto channels = executor.execute(input);

    BlobDump dump{Stage::kHw, std::move(image_id), {}, 0};
    dump.layers.reserve(channels.size());
    for (auto& ch : channels) {
        dump.layers.push_back({ch.layer, ch.stream.drain()});
    }
    dump.prediction = predict(dump.layers.back().values);
    return dump;
}

}  // namespace coverify
