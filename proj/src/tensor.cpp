// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "coverify/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace coverify {

std::string Shape::to_string() const {
    return std::to_string(channels) + "x" + std::to_string(height) + "x" + std::to_string(width);
}

Tensor::Tensor(Shape shape) : shape_(shape), data_(shape.count(), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.count()) {
        throw std::invalid_argument("tensor of shape " + shape_.to_string() + " needs " +
                                    std::to_string(shape_.count()) + " elements, got " +
                                    std::to_string(data_.size()));
    }
}

std::vector<double> Tensor::release() && {
    shape_ = {};
    return std::exchange(data_, {});
}

bool Tensor::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace coverify
