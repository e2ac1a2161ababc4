// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace coverify {

struct Shape {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t count() const noexcept { return channels * height * width; }
    std::string to_string() const;

    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Dense C×H×W blob stored channel-major, then row-major.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape);
    /// Throws std::invalid_argument when data.size() != shape.count().
    Tensor(Shape shape, std::vector<double> data);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const double> values() const noexcept { return data_; }
    std::span<double> values() noexcept { return data_; }

    double& at(std::size_t c, std::size_t y, std::size_t x) { return data_[index(c, y, x)]; }
    double at(std::size_t c, std::size_t y, std::size_t x) const { return data_[index(c, y, x)]; }

    /// Moves the element buffer out, leaving an empty tensor.
    std::vector<double> release() &&;

    bool all_finite() const noexcept;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::size_t index(std::size_t c, std::size_t y, std::size_t x) const noexcept {
        return (c * shape_.height + y) * shape_.width + x;
    }

    Shape shape_;
    std::vector<double> data_;
};

}  // namespace coverify
