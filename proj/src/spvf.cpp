// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "coverify/spvf.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "coverify/error.hpp"
#include "coverify/text_format.hpp"

namespace coverify {

BlobStats compute_stats(std::span<const double> values) {
    BlobStats s;
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    s.min = values.front();
    s.max = values.front();
    for (double v : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    const double n = static_cast<double>(values.size());
    s.mean = sum / n;
    s.range = s.max - s.min;
    double sq = 0.0;
    for (double v : values) {
        sq += (v - s.mean) * (v - s.mean);
    }
    s.std = std::sqrt(sq / n);
    return s;
}

SpvfFile build_spvf(const std::string& network, std::span<const BlobDump> dumps) {
    if (dumps.empty()) {
        throw CalibrationError(0, 1);
    }
    SpvfFile spvf{network, dumps.size(), {}};
    const BlobDump& first = dumps.front();
    for (const auto& rec : first.layers) {
        SpvfLayer layer{rec.name, {}, {}};
        layer.bounds.reserve(rec.values.size());
        for (double v : rec.values) {
            layer.bounds.push_back({v, v});
        }
        spvf.layers.push_back(std::move(layer));
    }
    for (const BlobDump& dump : dumps) {
        if (dump.layers.size() != spvf.layers.size()) {
            throw StructureError("calibration dump " + dump.image_id + " has " + std::to_string(dump.layers.size()) +
                                 " layers, expected " + std::to_string(spvf.layers.size()));
        }
        for (std::size_t l = 0; l < spvf.layers.size(); ++l) {
            SpvfLayer& layer = spvf.layers[l];
            const auto& values = dump.layers[l].values;
            if (dump.layers[l].name != layer.name || values.size() != layer.bounds.size()) {
                throw StructureError("calibration dump " + dump.image_id + " disagrees at layer " + layer.name);
            }
            for (std::size_t i = 0; i < values.size(); ++i) {
                layer.bounds[i].min = std::min(layer.bounds[i].min, values[i]);
                layer.bounds[i].max = std::max(layer.bounds[i].max, values[i]);
            }
            const BlobStats s = compute_stats(values);
            layer.stats.mean += s.mean;
            layer.stats.min += s.min;
            layer.stats.max += s.max;
            layer.stats.range += s.range;
            layer.stats.std += s.std;
        }
    }
    const double n = static_cast<double>(dumps.size());
    for (auto& layer : spvf.layers) {
        layer.stats.mean /= n;
        layer.stats.min /= n;
        layer.stats.max /= n;
        layer.stats.range /= n;
        layer.stats.std /= n;
    }
    return spvf;
}

SpvfFile generate_spvf(const NetworkSpec& net, const ParameterSet& params,
                       std::span<const LabeledImage> calibration, std::size_t n) {
    if (n == 0) {
        throw ConfigError("envelope image count must be >= 1");
    }
    const StageConfig sw{Stage::kSw, DoubleMode{}, std::nullopt};
    std::vector<BlobDump> kept;
    kept.reserve(n);
    for (const auto& item : calibration) {
        BlobDump dump = run_stage(net, params, item.image, sw, item.id);
        if (dump.prediction == item.label) {
            kept.push_back(std::move(dump));
            if (kept.size() == n) {
                break;
            }
        }
    }
    if (kept.size() < n) {
        throw CalibrationError(kept.size(), n);
    }
    return build_spvf(net.name, kept);
}

bool EnvelopeReport::pass() const noexcept { return first_failure() == nullptr; }

const EnvelopeLayerReport* EnvelopeReport::first_failure() const noexcept {
    const auto it = std::find_if(layers.begin(), layers.end(), [](const auto& l) { return !l.pass; });
    return it == layers.end() ? nullptr : &*it;
}

EnvelopeReport check_blobs(const BlobDump& dump, const SpvfFile& spvf, double slack, double pass_fraction) {
    if (!(slack >= 0.0) || !std::isfinite(slack)) {
        throw ConfigError("slack must be a finite value >= 0");
    }
    if (!(pass_fraction >= 0.0 && pass_fraction <= 1.0)) {
        throw ConfigError("pass fraction must lie in [0, 1]");
    }
    const std::size_t common = std::min(dump.layers.size(), spvf.layers.size());
    for (std::size_t l = 0; l < common; ++l) {
        if (dump.layers[l].name != spvf.layers[l].name || dump.layers[l].values.size() != spvf.layers[l].bounds.size()) {
            throw StructureError("dump and envelope disagree at layer " + spvf.layers[l].name + " (dump has " +
                                 dump.layers[l].name + " with " + std::to_string(dump.layers[l].values.size()) +
                                 " elements, envelope expects " + std::to_string(spvf.layers[l].bounds.size()) + ")");
        }
    }
    if (dump.layers.size() != spvf.layers.size()) {
        const std::string& name = common < spvf.layers.size() ? spvf.layers[common].name : dump.layers[common].name;
        throw StructureError("dump and envelope disagree at layer " + name + " (layer count " +
                             std::to_string(dump.layers.size()) + " vs " + std::to_string(spvf.layers.size()) + ")");
    }

    EnvelopeReport report;
    for (std::size_t l = 0; l < spvf.layers.size(); ++l) {
        const SpvfLayer& env = spvf.layers[l];
        const auto& values = dump.layers[l].values;
        const double margin = slack * env.stats.std;
        EnvelopeLayerReport r{env.name, values.size(), 0, {}, {}, false};
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] < env.bounds[i].min - margin || values[i] > env.bounds[i].max + margin) {
                ++r.outside;
                if (r.outside_indices.size() < kMaxListedIndices) {
                    r.outside_indices.push_back(i);
                }
            }
        }
        const BlobStats s = compute_stats(values);
        r.delta = {s.mean - env.stats.mean, s.min - env.stats.min, s.max - env.stats.max,
                   s.range - env.stats.range, s.std - env.stats.std};
        r.pass = r.fraction_inside() >= pass_fraction;
        report.layers.push_back(std::move(r));
    }
    return report;
}

std::string format_spvf(const SpvfFile& spvf) {
    std::string text = "spvf version 1\nnetwork " + spvf.network + "\nimages " + std::to_string(spvf.images) + "\n";
    for (const auto& layer : spvf.layers) {
        text += "layer " + layer.name + " " + std::to_string(layer.bounds.size()) + "\n";
        text += "stats mean=";
        append_real(text, layer.stats.mean);
        text += " min=";
        append_real(text, layer.stats.min);
        text += " max=";
        append_real(text, layer.stats.max);
        text += " range=";
        append_real(text, layer.stats.range);
        text += " std=";
        append_real(text, layer.stats.std);
        text += "\nbounds\n";
        for (const auto& b : layer.bounds) {
            append_real(text, b.min);
            text += ' ';
            append_real(text, b.max);
            text += '\n';
        }
    }
    return text;
}

void write_spvf(const SpvfFile& spvf, std::ostream& out) {
    out << format_spvf(spvf);
    out.flush();
    if (!out) {
        throw IoError("failed to write envelope file");
    }
}

SpvfFile read_spvf(std::istream& in) {
    TokenReader reader(in);
    reader.expect("spvf");
    reader.expect("version");
    const std::size_t version_line = reader.line();
    if (reader.next_count("version") != 1) {
        throw ParseError(version_line, "unsupported spvf version");
    }
    SpvfFile spvf;
    reader.expect("network");
    spvf.network = reader.next("network name").text;
    reader.expect("images");
    spvf.images = reader.next_count("image count");

    auto stat = [&](std::string_view key) {
        const Token& t = reader.next(std::string(key) + "=<value>");
        const std::string prefix = std::string(key) + "=";
        const auto v = t.text.rfind(prefix, 0) == 0 ? parse_real(std::string_view(t.text).substr(prefix.size()))
                                                    : std::nullopt;
        if (!v) {
            throw ParseError(t.line, "expected " + prefix + "<value>, found '" + t.text + "'");
        }
        return *v;
    };

    while (!reader.done()) {
        reader.expect("layer");
        SpvfLayer layer;
        layer.name = reader.next("layer name").text;
        const std::size_t count = reader.next_count("element count");
        reader.expect("stats");
        layer.stats.mean = stat("mean");
        layer.stats.min = stat("min");
        layer.stats.max = stat("max");
        layer.stats.range = stat("range");
        layer.stats.std = stat("std");
        reader.expect("bounds");
        layer.bounds.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t line = reader.line();
            ElementBounds b{reader.next_real("element minimum"), reader.next_real("element maximum")};
            if (b.min > b.max) {
                throw ParseError(line, "layer " + layer.name + " element " + std::to_string(i) + ": min exceeds max");
            }
            layer.bounds.push_back(b);
        }
        spvf.layers.push_back(std::move(layer));
    }
    return spvf;
}

SpvfFile parse_spvf(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_spvf(in);
}

std::string format_envelope_report(const EnvelopeReport& report) {
    std::ostringstream out;
    for (const auto& l : report.layers) {
        out << "envelope " << l.name << " checked=" << l.checked << " outside=" << l.outside
            << " inside_fraction=" << format_real(l.fraction_inside()) << " pass=" << (l.pass ? 1 : 0);
        if (!l.outside_indices.empty()) {
            out << " indices=";
            for (std::size_t i = 0; i < l.outside_indices.size(); ++i) {
                out << (i ? "," : "") << l.outside_indices[i];
            }
            if (l.outside > l.outside_indices.size()) {
                out << ",...";
            }
        }
        out << " delta_mean=" << format_real(l.delta.mean) << " delta_std=" << format_real(l.delta.std) << '\n';
    }
    out << "envelope_result pass=" << (report.pass() ? 1 : 0) << '\n';
    return out.str();
}

}  // namespace coverify
