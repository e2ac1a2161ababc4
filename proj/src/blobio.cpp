// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "coverify/blobio.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "coverify/error.hpp"
#include "coverify/text_format.hpp"

namespace coverify {

namespace {

constexpr std::size_t kValuesPerLine = 8;

void append_values(std::string& text, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        append_real(text, values[i]);
        text += (i + 1) % kValuesPerLine == 0 || i + 1 == values.size() ? '\n' : ' ';
    }
}

}  // namespace

std::string format_blob_dump(const BlobDump& dump) {
    std::string text = "blobdump version 1\nstage ";
    text += to_string(dump.stage);
    text += "\nimage " + dump.image_id + "\n";
    for (const auto& layer : dump.layers) {
        text += "layer " + layer.name + " " + std::to_string(layer.values.size()) + "\n";
        append_values(text, layer.values);
    }
    text += "prediction " + std::to_string(dump.prediction) + "\n";
    return text;
}

void write_blob_dump(const BlobDump& dump, std::ostream& out) {
    out << format_blob_dump(dump);
    out.flush();
    if (!out) {
        throw IoError("failed to write blob dump");
    }
}

BlobDump read_blob_dump(std::istream& in) {
    TokenReader reader(in);
    reader.expect("blobdump");
    reader.expect("version");
    const std::size_t version_line = reader.line();
    if (reader.next_count("version") != 1) {
        throw ParseError(version_line, "unsupported blobdump version");
    }
    reader.expect("stage");
    const Token& stage = reader.next("stage");
    const auto parsed = parse_stage(stage.text);
    if (!parsed) {
        throw ParseError(stage.line, "unknown stage '" + stage.text + "'");
    }
    BlobDump dump{*parsed, {}, {}, 0};
    reader.expect("image");
    dump.image_id = reader.next("image id").text;

    while (true) {
        const Token& head = reader.next("'layer' or 'prediction'");
        if (head.text == "prediction") {
            const std::size_t line = reader.line();
            dump.prediction = reader.next_count("prediction");
            if (!reader.done()) {
                throw ParseError(reader.line(), "trailing content after prediction");
            }
            if (!dump.layers.empty() && dump.prediction >= dump.layers.back().values.size()) {
                throw ParseError(line, "prediction " + std::to_string(dump.prediction) +
                                           " out of range for final layer");
            }
            break;
        }
        if (head.text != "layer") {
            throw ParseError(head.line, "expected 'layer' or 'prediction', found '" + head.text + "'");
        }
        LayerRecord record{reader.next("layer name").text, {}};
        const std::size_t decl_line = reader.line();
        const std::size_t count = reader.next_count("element count");
        record.values.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const Token* t = reader.peek();
            const auto v = t != nullptr ? parse_real(t->text) : std::nullopt;
            if (!v) {
                throw ParseError(t != nullptr ? t->line : reader.line(),
                                 "layer " + record.name + " declares " + std::to_string(count) + " values (line " +
                                     std::to_string(decl_line) + ") but provides " + std::to_string(i));
            }
            reader.next("value");
            record.values.push_back(*v);
        }
        dump.layers.push_back(std::move(record));
    }
    return dump;
}

BlobDump parse_blob_dump(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_blob_dump(in);
}

void write_tensor(const Tensor& t, std::ostream& out) {
    const Shape s = t.shape();
    std::string text = "tensor " + std::to_string(s.channels) + " " + std::to_string(s.height) + " " +
                       std::to_string(s.width) + "\n";
    append_values(text, t.values());
    out << text;
    if (!out) {
        throw IoError("failed to write tensor");
    }
}

Tensor read_tensor(std::istream& in) {
    TokenReader reader(in);
    reader.expect("tensor");
    Shape s;
    s.channels = reader.next_count("channels");
    s.height = reader.next_count("height");
    s.width = reader.next_count("width");
    if (s.count() == 0) {
        throw ParseError(reader.line(), "tensor dimensions must be positive");
    }
    std::vector<double> values;
    values.reserve(s.count());
    for (std::size_t i = 0; i < s.count(); ++i) {
        values.push_back(reader.next_real("tensor value"));
    }
    if (!reader.done()) {
        throw ParseError(reader.line(), "more values than the declared " + s.to_string() + " shape holds");
    }
    return Tensor(s, std::move(values));
}

Tensor import_gray8(std::span<const std::uint8_t> pixels, std::size_t height, std::size_t width) {
    if (pixels.size() != height * width) {
        throw std::invalid_argument("raster has " + std::to_string(pixels.size()) + " bytes, expected " +
                                    std::to_string(height * width));
    }
    std::vector<double> values(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        values[i] = static_cast<double>(pixels[i]) / 255.0;
    }
    return Tensor(Shape{1, height, width}, std::move(values));
}

}  // namespace coverify
