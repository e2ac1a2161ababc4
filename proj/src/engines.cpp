// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "coverify/engines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "coverify/error.hpp"
#include "coverify/text_format.hpp"

namespace coverify {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Arithmetic policies. Elem is the storage type of activations/weights inside a kernel, Acc the
// accumulator. finish()/store() widen back to double for the blob.

struct DoublePolicy {
    using Elem = double;
    using Acc = double;

    std::vector<Elem> load(std::span<const double> v) const { return {v.begin(), v.end()}; }
    std::vector<Elem> load_weights(std::span<const double> v) const { return load(v); }
    Acc bias(double b) const { return b; }
    Acc mac(Acc acc, Elem a, Elem w) const { return acc + a * w; }
    double finish(Acc acc) const { return acc; }

    Acc zero() const { return 0.0; }
    Acc add(Acc acc, Elem v) const { return acc + v; }
    double average(Acc sum, std::size_t window) const { return sum / static_cast<double>(window); }
    double store(Elem v) const { return v; }
};

struct FloatPolicy {
    using Elem = float;
    using Acc = float;

    std::vector<Elem> load(std::span<const double> v) const {
        std::vector<Elem> out(v.size());
        std::transform(v.begin(), v.end(), out.begin(), [](double x) { return static_cast<float>(x); });
        return out;
    }
    std::vector<Elem> load_weights(std::span<const double> v) const { return load(v); }
    Acc bias(double b) const { return static_cast<float>(b); }
    Acc mac(Acc acc, Elem a, Elem w) const { return acc + a * w; }
    double finish(Acc acc) const { return acc; }

    Acc zero() const { return 0.0f; }
    Acc add(Acc acc, Elem v) const { return acc + v; }
    double average(Acc sum, std::size_t window) const { return sum / static_cast<float>(window); }
    double store(Elem v) const { return v; }
};

struct FixedPolicy {
    using Elem = std::int64_t;  // raw value in the activation (or weight) format
    using Acc = Accumulator;

    FixedPointFormat weight_fmt;
    FixedPointFormat act_fmt;

    explicit FixedPolicy(const FixedMode& m) : weight_fmt(m.weights), act_fmt(m.activations) {}

    int product_frac() const { return weight_fmt.frac_bits() + act_fmt.frac_bits(); }

    std::vector<Elem> load(std::span<const double> v) const { return load_as(v, act_fmt); }
    std::vector<Elem> load_weights(std::span<const double> v) const { return load_as(v, weight_fmt); }
    Acc bias(double b) const { return widen(quantize(b, weight_fmt), product_frac()); }
    Acc mac(Acc acc, Elem a, Elem w) const {
        return fixed_mac(acc, QuantizedValue{a, act_fmt}, QuantizedValue{w, weight_fmt});
    }
    double finish(Acc acc) const { return dequantize(rescale(acc, product_frac(), act_fmt)); }

    Acc zero() const { return 0; }
    Acc add(Acc acc, Elem v) const { return acc + v; }
    // Division-free mean: multiply by the truncated reciprocal, then rescale once.
    double average(Acc sum, std::size_t window) const {
        const QuantizedValue reciprocal = quantize(1.0 / static_cast<double>(window), act_fmt);
        Acc product = 0;
        if (__builtin_mul_overflow(sum, static_cast<Acc>(reciprocal.raw), &product)) {
            throw EngineError("accumulator width exceeded");
        }
        return dequantize(rescale(product, 2 * act_fmt.frac_bits(), act_fmt));
    }
    double store(Elem v) const { return dequantize(QuantizedValue{v, act_fmt}); }

private:
    static std::vector<Elem> load_as(std::span<const double> v, FixedPointFormat fmt) {
        std::vector<Elem> out(v.size());
        std::transform(v.begin(), v.end(), out.begin(), [&](double x) { return quantize(x, fmt).raw; });
        return out;
    }
};

template <class F>
Tensor with_policy(const NumericMode& mode, F&& f) {
    return std::visit(Overloaded{
                          [&](const DoubleMode&) { return f(DoublePolicy{}); },
                          [&](const Float32Mode&) { return f(FloatPolicy{}); },
                          [&](const FixedMode& m) { return f(FixedPolicy{m}); },
                      },
                      mode);
}

std::size_t window_out(std::size_t in, std::size_t pad, std::size_t kernel, std::size_t stride) {
    if (in + 2 * pad < kernel || stride == 0) {
        throw std::invalid_argument("kernel window does not fit the input");
    }
    return (in + 2 * pad - kernel) / stride + 1;
}

template <class P>
Tensor conv_impl(const P& p, const Tensor& in, const ConvLayer& conv, std::span<const double> weights,
                 std::span<const double> biases) {
    const Shape is = in.shape();
    const std::size_t k = conv.kernel;
    if (weights.size() != conv.filters * is.channels * k * k || biases.size() != conv.filters) {
        throw std::invalid_argument("conv parameter sizes do not match layer fan-in");
    }
    const Shape os{conv.filters, window_out(is.height, conv.pad, k, conv.stride),
                   window_out(is.width, conv.pad, k, conv.stride)};
    const auto x = p.load(in.values());
    const auto w = p.load_weights(weights);
    const auto pad = static_cast<std::ptrdiff_t>(conv.pad);
    const auto ih = static_cast<std::ptrdiff_t>(is.height);
    const auto iw = static_cast<std::ptrdiff_t>(is.width);

    std::vector<double> out(os.count());
    std::size_t o = 0;
    for (std::size_t f = 0; f < os.channels; ++f) {
        const auto b = p.bias(biases[f]);
        for (std::size_t oy = 0; oy < os.height; ++oy) {
            for (std::size_t ox = 0; ox < os.width; ++ox) {
                auto acc = b;
                for (std::size_t c = 0; c < is.channels; ++c) {
                    for (std::size_t i = 0; i < k; ++i) {
                        const auto y = static_cast<std::ptrdiff_t>(oy * conv.stride + i) - pad;
                        if (y < 0 || y >= ih) {
                            continue;
                        }
                        for (std::size_t j = 0; j < k; ++j) {
                            const auto xx = static_cast<std::ptrdiff_t>(ox * conv.stride + j) - pad;
                            if (xx < 0 || xx >= iw) {
                                continue;
                            }
                            acc = p.mac(acc, x[(c * is.height + static_cast<std::size_t>(y)) * is.width + static_cast<std::size_t>(xx)],
                                        w[((f * is.channels + c) * k + i) * k + j]);
                        }
                    }
                }
                out[o++] = p.finish(acc);
            }
        }
    }
    return Tensor(os, std::move(out));
}

template <class P>
Tensor pool_impl(const P& p, const Tensor& in, const PoolLayer& pool) {
    const Shape is = in.shape();
    const std::size_t k = pool.kernel;
    const Shape os{is.channels, window_out(is.height, 0, k, pool.stride), window_out(is.width, 0, k, pool.stride)};
    const auto x = p.load(in.values());

    std::vector<double> out(os.count());
    std::size_t o = 0;
    for (std::size_t c = 0; c < os.channels; ++c) {
        for (std::size_t oy = 0; oy < os.height; ++oy) {
            for (std::size_t ox = 0; ox < os.width; ++ox) {
                const std::size_t base = (c * is.height + oy * pool.stride) * is.width + ox * pool.stride;
                if (pool.kind == PoolKind::kMax) {
                    auto best = x[base];
                    for (std::size_t i = 0; i < k; ++i) {
                        for (std::size_t j = 0; j < k; ++j) {
                            best = std::max(best, x[base + i * is.width + j]);
                        }
                    }
                    out[o++] = p.store(best);
                } else {
                    auto sum = p.zero();
                    for (std::size_t i = 0; i < k; ++i) {
                        for (std::size_t j = 0; j < k; ++j) {
                            sum = p.add(sum, x[base + i * is.width + j]);
                        }
                    }
                    out[o++] = p.average(sum, k * k);
                }
            }
        }
    }
    return Tensor(os, std::move(out));
}

template <class P>
Tensor fc_impl(const P& p, const Tensor& in, const FcLayer& fc, std::span<const double> weights,
               std::span<const double> biases) {
    const std::size_t fan_in = in.size();
    if (weights.size() != fc.units * fan_in || biases.size() != fc.units) {
        throw std::invalid_argument("fc parameter sizes do not match layer fan-in");
    }
    const auto x = p.load(in.values());
    const auto w = p.load_weights(weights);
    std::vector<double> out(fc.units);
    for (std::size_t u = 0; u < fc.units; ++u) {
        auto acc = p.bias(biases[u]);
        const std::size_t row = u * fan_in;
        for (std::size_t i = 0; i < fan_in; ++i) {
            acc = p.mac(acc, x[i], w[row + i]);
        }
        out[u] = p.finish(acc);
    }
    return Tensor(Shape{fc.units, 1, 1}, std::move(out));
}

int storage_bits(const NumericMode& mode) {
    return std::visit(Overloaded{
                          [](const DoubleMode&) { return 64; },
                          [](const Float32Mode&) { return 32; },
                          [](const FixedMode& m) { return m.activations.total_bits(); },
                      },
                      mode);
}

double flip_bit(double v, unsigned bit, const NumericMode& mode) {
    return std::visit(Overloaded{
                          [&](const DoubleMode&) {
                              return std::bit_cast<double>(std::bit_cast<std::uint64_t>(v) ^ (std::uint64_t{1} << bit));
                          },
                          [&](const Float32Mode&) {
                              const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v)) ^ (1u << bit);
                              return static_cast<double>(std::bit_cast<float>(bits));
                          },
                          [&](const FixedMode& m) {
                              const FixedPointFormat fmt = m.activations;
                              const int width = fmt.total_bits();
                              const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
                              std::uint64_t u = static_cast<std::uint64_t>(quantize(v, fmt).raw) & mask;
                              u ^= std::uint64_t{1} << bit;
                              if (width < 64 && (u >> (width - 1)) != 0) {
                                  u |= ~mask;  // sign-extend
                              }
                              return dequantize(QuantizedValue{static_cast<std::int64_t>(u), fmt});
                          },
                      },
                      mode);
}

void check_mode_formats(const NumericMode& mode) {
    if (const auto* m = std::get_if<FixedMode>(&mode)) {
        for (const FixedPointFormat& fmt : {m->weights, m->activations}) {
            if (fmt.total_bits() > 53) {
                throw ConfigError("fixed format " + fmt.to_string() +
                                  " is wider than 53 bits and cannot be stored exactly as a real");
            }
        }
    }
}

void require_finite(const Tensor& t, const std::string& layer) {
    if (!t.all_finite()) {
        throw EngineError("non-finite value produced at layer " + layer);
    }
}

}  // namespace

std::string to_string(const NumericMode& mode) {
    return std::visit(Overloaded{
                          [](const DoubleMode&) { return std::string("double"); },
                          [](const Float32Mode&) { return std::string("float32"); },
                          [](const FixedMode& m) {
                              return "fixed:w" + m.weights.to_string() + ":a" + m.activations.to_string();
                          },
                      },
                      mode);
}

NumericMode parse_numeric_mode(std::string_view text) {
    if (text == "double") {
        return DoubleMode{};
    }
    if (text == "float32") {
        return Float32Mode{};
    }
    const std::string_view prefix = "fixed:w";
    const auto sep = text.find(":a");
    if (text.substr(0, prefix.size()) != prefix || sep == std::string_view::npos || sep < prefix.size()) {
        throw ConfigError("numeric mode must be double, float32 or fixed:wT.F:aT.F, got '" + std::string(text) + "'");
    }
    try {
        FixedMode mode{FixedPointFormat::parse(text.substr(prefix.size(), sep - prefix.size())),
                       FixedPointFormat::parse(text.substr(sep + 2))};
        check_mode_formats(mode);
        return mode;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("numeric mode '") + std::string(text) + "': " + e.what());
    }
}

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::kSw: return "sw";
        case Stage::kDesign: return "design";
        case Stage::kHw: return "hw";
    }
    return "?";
}

std::optional<Stage> parse_stage(std::string_view text) {
    if (text == "sw") return Stage::kSw;
    if (text == "design") return Stage::kDesign;
    if (text == "hw") return Stage::kHw;
    return std::nullopt;
}

FaultSpec parse_fault(std::string_view text) {
    const auto first = text.find(':');
    const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
    if (second == std::string_view::npos) {
        throw ConfigError("fault must look like <layer>:<scale|zero|bitflip>:<arg>, got '" + std::string(text) + "'");
    }
    FaultSpec fault{std::string(text.substr(0, first)), ScaleFault{}};
    const std::string_view kind = text.substr(first + 1, second - first - 1);
    const std::string_view arg = text.substr(second + 1);
    auto bad_arg = [&]() { return ConfigError("bad argument '" + std::string(arg) + "' for " + std::string(kind) + " fault"); };
    if (kind == "scale") {
        const auto f = parse_real(arg);
        if (!f) throw bad_arg();
        fault.kind = ScaleFault{*f};
    } else if (kind == "zero") {
        const auto i = parse_count(arg);
        if (!i) throw bad_arg();
        fault.kind = ZeroFault{*i};
    } else if (kind == "bitflip") {
        const auto comma = arg.find(',');
        if (comma == std::string_view::npos) throw bad_arg();
        const auto i = parse_count(arg.substr(0, comma));
        const auto b = parse_count(arg.substr(comma + 1));
        if (!i || !b || *b > 63) throw bad_arg();
        fault.kind = BitflipFault{*i, static_cast<unsigned>(*b)};
    } else {
        throw ConfigError("unknown fault kind '" + std::string(kind) + "'");
    }
    return fault;
}

std::string to_string(const FaultSpec& fault) {
    return fault.layer + ":" +
           std::visit(Overloaded{
                          [](const ScaleFault& f) { return "scale:" + format_real(f.factor); },
                          [](const ZeroFault& f) { return "zero:" + std::to_string(f.index); },
                          [](const BitflipFault& f) { return "bitflip:" + std::to_string(f.index) + "," + std::to_string(f.bit); },
                      },
                      fault.kind);
}

void StageConfig::validate(const NetworkSpec& net) const {
    const bool is_double = std::holds_alternative<DoubleMode>(mode);
    if (stage == Stage::kSw && !is_double) {
        throw ConfigError("sw stage must run in double precision, got " + to_string(mode));
    }
    if (stage != Stage::kSw && is_double) {
        throw ConfigError(std::string(to_string(stage)) + " stage needs float32 or fixed mode, got double");
    }
    check_mode_formats(mode);
    if (!fault) {
        return;
    }
    if (stage != Stage::kHw) {
        throw ConfigError("faults can only be injected into the hw stage");
    }
    const auto shapes = infer_shapes(net);
    const auto it = std::find_if(shapes.begin(), shapes.end(), [&](const LayerShape& s) { return s.name == fault->layer; });
    if (it == shapes.end()) {
        throw ConfigError("fault target layer not found: " + fault->layer);
    }
    std::visit(Overloaded{
                   [&](const ScaleFault& f) {
                       if (!std::isfinite(f.factor)) throw ConfigError("scale fault factor must be finite");
                   },
                   [&](const ZeroFault& f) {
                       if (f.index >= it->count())
                           throw ConfigError("fault index " + std::to_string(f.index) + " out of range for layer " +
                                             fault->layer + " (" + std::to_string(it->count()) + " elements)");
                   },
                   [&](const BitflipFault& f) {
                       if (f.index >= it->count())
                           throw ConfigError("fault index " + std::to_string(f.index) + " out of range for layer " +
                                             fault->layer + " (" + std::to_string(it->count()) + " elements)");
                       if (static_cast<int>(f.bit) >= storage_bits(mode))
                           throw ConfigError("bit " + std::to_string(f.bit) + " exceeds the " +
                                             std::to_string(storage_bits(mode)) + "-bit storage of " + to_string(mode));
                   },
               },
               fault->kind);
}

Tensor enter_mode(const Tensor& t, const NumericMode& mode) {
    if (std::holds_alternative<DoubleMode>(mode)) {
        return t;
    }
    std::vector<double> v(t.values().begin(), t.values().end());
    if (const auto* m = std::get_if<FixedMode>(&mode)) {
        for (double& x : v) x = truncate_to(x, m->activations);
    } else {
        for (double& x : v) x = static_cast<float>(x);
    }
    return Tensor(t.shape(), std::move(v));
}

Tensor conv2d_forward(const Tensor& input, const ConvLayer& conv, std::span<const double> weights,
                      std::span<const double> biases, const NumericMode& mode) {
    return with_policy(mode, [&](const auto& p) { return conv_impl(p, input, conv, weights, biases); });
}

Tensor pool_forward(const Tensor& input, const PoolLayer& pool, const NumericMode& mode) {
    return with_policy(mode, [&](const auto& p) { return pool_impl(p, input, pool); });
}

Tensor relu_forward(const Tensor& input) {
    std::vector<double> v(input.values().begin(), input.values().end());
    for (double& x : v) {
        x = x > 0.0 ? x : 0.0;
    }
    return Tensor(input.shape(), std::move(v));
}

Tensor fc_forward(const Tensor& input, const FcLayer& fc, std::span<const double> weights,
                  std::span<const double> biases, const NumericMode& mode) {
    return with_policy(mode, [&](const auto& p) { return fc_impl(p, input, fc, weights, biases); });
}

std::size_t predict(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("cannot predict from an empty output");
    }
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

namespace {

Tensor run_layer(const Tensor& input, const LayerSpec& layer, std::span<const double> weights,
                 std::span<const double> biases, const NumericMode& mode) {
    return std::visit(Overloaded{
                          [&](const ConvLayer& c) { return conv2d_forward(input, c, weights, biases, mode); },
                          [&](const PoolLayer& p) { return pool_forward(input, p, mode); },
                          [&](const ReluLayer&) { return relu_forward(input); },
                          [&](const FcLayer& f) { return fc_forward(input, f, weights, biases, mode); },
                      },
                      layer.op);
}

}  // namespace

Tensor forward_layer(const Tensor& input, const LayerSpec& layer, const ParameterSet& params,
                     const NumericMode& mode) {
    if (!layer.has_parameters()) {
        return run_layer(input, layer, {}, {}, mode);
    }
    const LayerParameters& p = params.at(layer.name);
    return run_layer(input, layer, p.weights, p.biases, mode);
}

Tensor forward_layer_with_fault(const Tensor& input, const LayerSpec& layer, const ParameterSet& params,
                                const NumericMode& mode, const std::optional<FaultSpec>& fault) {
    if (!fault || fault->layer != layer.name) {
        return forward_layer(input, layer, params, mode);
    }
    if (const auto* scale = std::get_if<ScaleFault>(&fault->kind); scale && layer.has_parameters()) {
        const LayerParameters& p = params.at(layer.name);
        std::vector<double> scaled(p.weights);
        for (double& w : scaled) {
            w *= scale->factor;
        }
        return run_layer(input, layer, scaled, p.biases, mode);
    }
    Tensor out = forward_layer(input, layer, params, mode);
    auto values = out.values();
    std::visit(Overloaded{
                   [&](const ScaleFault& f) {
                       for (double& v : values) v *= f.factor;
                       out = enter_mode(out, mode);
                   },
                   [&](const ZeroFault& f) { values[f.index] = 0.0; },
                   [&](const BitflipFault& f) { values[f.index] = flip_bit(values[f.index], f.bit, mode); },
               },
               fault->kind);
    return out;
}

BlobDump run_stage(const NetworkSpec& net, const ParameterSet& params, const Tensor& image,
                   const StageConfig& cfg, std::string image_id) {
    cfg.validate(net);
    if (cfg.stage == Stage::kHw) {
        throw ConfigError("hw stage runs through the stream executor");
    }
    check_parameters(params, net);
    if (image.shape() != net.input_shape) {
        throw EngineError("image shape " + image.shape().to_string() + " does not match network input " +
                          net.input_shape.to_string());
    }
    BlobDump dump{cfg.stage, std::move(image_id), {}, 0};
    dump.layers.reserve(net.layers.size());
    Tensor x = enter_mode(image, cfg.mode);
    for (const auto& layer : net.layers) {
        x = forward_layer(x, layer, params, cfg.mode);
        require_finite(x, layer.name);
        dump.layers.push_back({layer.name, {x.values().begin(), x.values().end()}});
    }
    dump.prediction = predict(x.values());
    return dump;
}

}  // namespace coverify
