// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "coverify/netspec.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "coverify/error.hpp"
#include "coverify/text_format.hpp"

namespace coverify {

namespace {

bool is_identifier(std::string_view s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s.front()))) {
        return false;
    }
    return std::all_of(s.begin(), s.end(), [](char ch) {
        const auto c = static_cast<unsigned char>(ch);
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

std::size_t spatial_out(std::size_t in, std::size_t pad, std::size_t kernel, std::size_t stride,
                        const std::string& layer) {
    const std::size_t padded = in + 2 * pad;
    if (padded < kernel) {
        throw ValidationError("layer " + layer + ": non-positive output dimension (input " +
                              std::to_string(in) + ", pad " + std::to_string(pad) + ", kernel " +
                              std::to_string(kernel) + ")");
    }
    return (padded - kernel) / stride + 1;
}

// key=value pairs of a `layer` line; rejects unknown and repeated keys.
class KeyValues {
public:
    KeyValues(const TokenLine& line, std::size_t first, std::initializer_list<std::string_view> allowed)
        : line_(line.number) {
        for (std::size_t i = first; i < line.tokens.size(); ++i) {
            const std::string& tok = line.tokens[i];
            const auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size()) {
                throw ParseError(line_, "expected key=value, found '" + tok + "'");
            }
            std::string key = tok.substr(0, eq);
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                throw ParseError(line_, "unknown key '" + key + "'");
            }
            if (!values_.emplace(key, tok.substr(eq + 1)).second) {
                throw ParseError(line_, "duplicate key '" + key + "'");
            }
        }
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) const {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            if (!fallback) {
                throw ParseError(line_, "missing required key '" + key + "'");
            }
            return *fallback;
        }
        const auto v = parse_count(it->second);
        if (!v) {
            throw ParseError(line_, "key '" + key + "' needs a non-negative integer, found '" +
                                        it->second + "'");
        }
        return *v;
    }

    const std::string* text(const std::string& key) const {
        const auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }

private:
    std::size_t line_;
    std::map<std::string, std::string> values_;
};

LayerSpec parse_layer_line(const TokenLine& line) {
    const auto& t = line.tokens;
    if (t.size() < 3) {
        throw ParseError(line.number, "expected 'layer <kind> <name> [key=value...]'");
    }
    const std::string& kind = t[1];
    LayerSpec layer{t[2], ReluLayer{}};
    if (!is_identifier(layer.name)) {
        throw ParseError(line.number, "invalid layer name '" + layer.name + "'");
    }
    if (kind == "conv") {
        KeyValues kv(line, 3, {"filters", "kernel", "stride", "pad"});
        layer.op = ConvLayer{kv.count("filters"), kv.count("kernel"), kv.count("stride", 1), kv.count("pad", 0)};
    } else if (kind == "pool") {
        KeyValues kv(line, 3, {"kind", "kernel", "stride"});
        PoolLayer pool;
        if (const std::string* k = kv.text("kind")) {
            if (*k == "max") {
                pool.kind = PoolKind::kMax;
            } else if (*k == "avg") {
                pool.kind = PoolKind::kAvg;
            } else {
                throw ParseError(line.number, "pool kind must be 'max' or 'avg', found '" + *k + "'");
            }
        }
        pool.kernel = kv.count("kernel");
        pool.stride = kv.count("stride", pool.kernel);
        layer.op = pool;
    } else if (kind == "relu") {
        KeyValues kv(line, 3, {});
    } else if (kind == "fc") {
        KeyValues kv(line, 3, {"units"});
        layer.op = FcLayer{kv.count("units")};
    } else {
        throw ParseError(line.number, "unknown layer kind '" + kind + "'");
    }
    return layer;
}

void check_layer_ranges(const LayerSpec& layer) {
    auto require = [&](bool ok, const char* what) {
        if (!ok) {
            throw ValidationError("layer " + layer.name + ": " + what);
        }
    };
    if (const auto* c = std::get_if<ConvLayer>(&layer.op)) {
        require(c->filters >= 1, "filters must be >= 1");
        require(c->kernel >= 1, "kernel must be >= 1");
        require(c->stride >= 1, "stride must be >= 1");
    } else if (const auto* p = std::get_if<PoolLayer>(&layer.op)) {
        require(p->kernel >= 1, "kernel must be >= 1");
        require(p->stride >= 1, "stride must be >= 1");
    } else if (const auto* f = std::get_if<FcLayer>(&layer.op)) {
        require(f->units >= 1, "units must be >= 1");
    }
}

}  // namespace

std::string_view LayerSpec::kind_name() const noexcept {
    switch (op.index()) {
        case 0: return "conv";
        case 1: return "pool";
        case 2: return "relu";
        default: return "fc";
    }
}

const LayerSpec* NetworkSpec::find(std::string_view layer) const noexcept {
    const auto it = std::find_if(layers.begin(), layers.end(), [&](const LayerSpec& l) { return l.name == layer; });
    return it == layers.end() ? nullptr : &*it;
}

Shape layer_output_shape(const LayerSpec& layer, const Shape& in) {
    if (const auto* c = std::get_if<ConvLayer>(&layer.op)) {
        return {c->filters, spatial_out(in.height, c->pad, c->kernel, c->stride, layer.name),
                spatial_out(in.width, c->pad, c->kernel, c->stride, layer.name)};
    }
    if (const auto* p = std::get_if<PoolLayer>(&layer.op)) {
        return {in.channels, spatial_out(in.height, 0, p->kernel, p->stride, layer.name),
                spatial_out(in.width, 0, p->kernel, p->stride, layer.name)};
    }
    if (const auto* f = std::get_if<FcLayer>(&layer.op)) {
        return {f->units, 1, 1};
    }
    return in;
}

void validate(const NetworkSpec& net) {
    if (!is_identifier(net.name)) {
        throw ValidationError("invalid network name '" + net.name + "'");
    }
    if (net.input_shape.count() == 0) {
        throw ValidationError("input shape " + net.input_shape.to_string() + " has a zero dimension");
    }
    if (net.layers.empty()) {
        throw ValidationError("network " + net.name + " has no layers");
    }
    std::set<std::string_view> names;
    const LayerSpec* last_fc = nullptr;
    Shape shape = net.input_shape;
    for (const auto& layer : net.layers) {
        if (!is_identifier(layer.name)) {
            throw ValidationError("invalid layer name '" + layer.name + "'");
        }
        if (!names.insert(layer.name).second) {
            throw ValidationError("duplicate layer name: " + layer.name);
        }
        check_layer_ranges(layer);
        const bool fc_compatible = std::holds_alternative<FcLayer>(layer.op) || std::holds_alternative<ReluLayer>(layer.op);
        if (last_fc != nullptr && !fc_compatible) {
            throw ValidationError("layer " + layer.name + ": " + std::string(layer.kind_name()) +
                                  " layer cannot follow fc layer " + last_fc->name);
        }
        if (std::holds_alternative<FcLayer>(layer.op)) {
            last_fc = &layer;
        }
        shape = layer_output_shape(layer, shape);
    }
}

NetworkSpec parse_topology(std::istream& in) {
    NetworkSpec net;
    bool have_name = false;
    bool have_input = false;
    std::size_t last_line = 1;
    for (const auto& line : tokenize_lines(in)) {
        last_line = line.number;
        const std::string& directive = line.tokens.front();
        if (directive == "network") {
            if (have_name) {
                throw ParseError(line.number, "duplicate 'network' directive");
            }
            if (line.tokens.size() != 2 || !is_identifier(line.tokens[1])) {
                throw ParseError(line.number, "expected 'network <name>'");
            }
            net.name = line.tokens[1];
            have_name = true;
        } else if (directive == "input") {
            if (!have_name) {
                throw ParseError(line.number, "'input' before 'network'");
            }
            if (have_input) {
                throw ParseError(line.number, "duplicate 'input' directive");
            }
            if (line.tokens.size() != 4) {
                throw ParseError(line.number, "expected 'input <C> <H> <W>'");
            }
            std::size_t dims[3];
            for (int i = 0; i < 3; ++i) {
                const auto v = parse_count(line.tokens[i + 1]);
                if (!v || *v == 0) {
                    throw ParseError(line.number, "input dimensions must be positive integers");
                }
                dims[i] = *v;
            }
            net.input_shape = {dims[0], dims[1], dims[2]};
            have_input = true;
        } else if (directive == "layer") {
            if (!have_input) {
                throw ParseError(line.number, "'layer' before 'network' and 'input'");
            }
            net.layers.push_back(parse_layer_line(line));
        } else {
            throw ParseError(line.number, "unknown directive '" + directive + "'");
        }
    }
    if (!have_name) {
        throw ParseError(last_line, "missing 'network' directive");
    }
    if (!have_input) {
        throw ParseError(last_line, "missing 'input' directive");
    }
    validate(net);
    return net;
}

NetworkSpec parse_topology(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_topology(in);
}

std::string format_topology(const NetworkSpec& net) {
    std::ostringstream out;
    out << "network " << net.name << '\n';
    out << "input " << net.input_shape.channels << ' ' << net.input_shape.height << ' '
        << net.input_shape.width << '\n';
    for (const auto& layer : net.layers) {
        out << "layer " << layer.kind_name() << ' ' << layer.name;
        if (const auto* c = std::get_if<ConvLayer>(&layer.op)) {
            out << " filters=" << c->filters << " kernel=" << c->kernel << " stride=" << c->stride
                << " pad=" << c->pad;
        } else if (const auto* p = std::get_if<PoolLayer>(&layer.op)) {
            out << " kind=" << (p->kind == PoolKind::kMax ? "max" : "avg") << " kernel=" << p->kernel
                << " stride=" << p->stride;
        } else if (const auto* f = std::get_if<FcLayer>(&layer.op)) {
            out << " units=" << f->units;
        }
        out << '\n';
    }
    return out.str();
}

std::vector<LayerShape> infer_shapes(const NetworkSpec& net) {
    std::vector<LayerShape> shapes;
    shapes.reserve(net.layers.size());
    Shape shape = net.input_shape;
    for (const auto& layer : net.layers) {
        shape = layer_output_shape(layer, shape);
        shapes.push_back({layer.name, shape});
    }
    return shapes;
}

std::vector<Shape> layer_input_shapes(const NetworkSpec& net) {
    std::vector<Shape> inputs;
    inputs.reserve(net.layers.size());
    Shape shape = net.input_shape;
    for (const auto& layer : net.layers) {
        inputs.push_back(shape);
        shape = layer_output_shape(layer, shape);
    }
    return inputs;
}

std::vector<ParameterCounts> parameter_counts(const NetworkSpec& net) {
    std::vector<ParameterCounts> counts;
    const auto inputs = layer_input_shapes(net);
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& layer = net.layers[i];
        if (const auto* c = std::get_if<ConvLayer>(&layer.op)) {
            counts.push_back({layer.name, c->filters * inputs[i].channels * c->kernel * c->kernel, c->filters});
        } else if (const auto* f = std::get_if<FcLayer>(&layer.op)) {
            counts.push_back({layer.name, f->units * inputs[i].count(), f->units});
        }
    }
    return counts;
}

const LayerParameters* ParameterSet::find(std::string_view layer) const noexcept {
    const auto it = std::find_if(layers_.begin(), layers_.end(), [&](const auto& p) { return p.layer == layer; });
    return it == layers_.end() ? nullptr : &*it;
}

LayerParameters* ParameterSet::find(std::string_view layer) noexcept {
    const auto it = std::find_if(layers_.begin(), layers_.end(), [&](const auto& p) { return p.layer == layer; });
    return it == layers_.end() ? nullptr : &*it;
}

const LayerParameters& ParameterSet::at(std::string_view layer) const {
    if (const auto* p = find(layer)) {
        return *p;
    }
    throw ValidationError("missing layer block: " + std::string(layer));
}

void check_parameters(const ParameterSet& params, const NetworkSpec& net) {
    const auto expected = parameter_counts(net);
    for (const auto& e : expected) {
        const LayerParameters& p = params.at(e.layer);
        if (p.weights.size() != e.weights) {
            throw ValidationError("layer " + e.layer + ": expected " + std::to_string(e.weights) +
                                  " weights, got " + std::to_string(p.weights.size()));
        }
        if (p.biases.size() != e.biases) {
            throw ValidationError("layer " + e.layer + ": expected " + std::to_string(e.biases) +
                                  " biases, got " + std::to_string(p.biases.size()));
        }
    }
    if (params.layers().size() != expected.size()) {
        for (const auto& p : params.layers()) {
            const LayerSpec* layer = net.find(p.layer);
            if (layer == nullptr || !layer->has_parameters()) {
                throw ValidationError("parameters given for non-parameterized or unknown layer: " + p.layer);
            }
        }
    }
}

ParameterSet load_parameters(std::istream& in, const NetworkSpec& net) {
    TokenReader reader(in);
    reader.expect("params");
    const Token& name = reader.next("network name");
    if (name.text != net.name) {
        throw ValidationError("parameter file is for network '" + name.text + "', topology is '" + net.name + "'");
    }

    const auto expected = parameter_counts(net);
    std::map<std::string, LayerParameters> blocks;

    auto read_block = [&](const std::string& layer, const char* keyword, std::size_t want,
                          std::vector<double>& dest) {
        const Token* head = reader.peek();
        if (head == nullptr || head->text != keyword) {
            throw ValidationError(std::string("missing ") + keyword + ": " + layer);
        }
        reader.next(keyword);
        const std::size_t line = reader.line();
        const std::size_t declared = reader.next_count(std::string(keyword) + " count");
        if (declared != want) {
            throw ValidationError("layer " + layer + ": expected " + std::to_string(want) + " " + keyword +
                                  ", got " + std::to_string(declared) + " (line " + std::to_string(line) + ")");
        }
        dest.reserve(declared);
        for (std::size_t i = 0; i < declared; ++i) {
            dest.push_back(reader.next_real(std::string(keyword) + " value"));
        }
    };

    while (!reader.done()) {
        reader.expect("layer");
        const Token& layer_tok = reader.next("layer name");
        const std::string layer = layer_tok.text;
        const auto it = std::find_if(expected.begin(), expected.end(), [&](const auto& e) { return e.layer == layer; });
        if (it == expected.end()) {
            throw ParseError(layer_tok.line, "layer '" + layer + "' is not a parameterized layer of " + net.name);
        }
        if (blocks.count(layer) != 0) {
            throw ParseError(layer_tok.line, "duplicate block for layer '" + layer + "'");
        }
        LayerParameters p{layer, {}, {}};
        read_block(layer, "weights", it->weights, p.weights);
        read_block(layer, "biases", it->biases, p.biases);
        blocks.emplace(layer, std::move(p));
    }

    std::vector<LayerParameters> ordered;
    for (const auto& e : expected) {
        auto it = blocks.find(e.layer);
        if (it == blocks.end()) {
            throw ValidationError("missing layer block: " + e.layer);
        }
        ordered.push_back(std::move(it->second));
    }
    return ParameterSet(std::move(ordered));
}

void write_parameters(const ParameterSet& params, const NetworkSpec& net, std::ostream& out) {
    check_parameters(params, net);
    std::string text = "params " + net.name + "\n";
    auto block = [&](const char* keyword, const std::vector<double>& values) {
        text += keyword;
        text += ' ';
        text += std::to_string(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            text += (i % 8 == 0) ? '\n' : ' ';
            append_real(text, values[i]);
        }
        text += '\n';
    };
    for (const auto& e : parameter_counts(net)) {
        const LayerParameters& p = params.at(e.layer);
        text += "layer " + p.layer + "\n";
        block("weights", p.weights);
        block("biases", p.biases);
    }
    out << text;
    if (!out) {
        throw IoError("failed to write parameter file");
    }
}

ParameterSet quantize_parameters(const ParameterSet& params, FixedPointFormat fmt) {
    ParameterSet result = params;
    for (auto& layer : result.layers()) {
        for (double& w : layer.weights) {
            w = truncate_to(w, fmt);
        }
        for (double& b : layer.biases) {
            b = truncate_to(b, fmt);
        }
    }
    return result;
}

}  // namespace coverify
