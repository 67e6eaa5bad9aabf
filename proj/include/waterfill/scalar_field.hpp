#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace waterfill {

/// Dense row-major grid of doubles. (x, y) addresses column x of row y.
class ScalarField {
public:
    ScalarField() = default;

    ScalarField(int width, int height, double value = 0.0)
        : width_(width), height_(height) {
        if (width < 1 || height < 1)
            throw std::invalid_argument("ScalarField: dimensions must be positive");
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), value);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    double at(int x, int y) const { return data_[idx(x, y)]; }
    double& at(int x, int y) { return data_[idx(x, y)]; }

    const double* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }
    double* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }

    const std::vector<double>& values() const { return data_; }
    std::vector<double>& values() { return data_; }

    bool same_size(const ScalarField& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    void fill(double value) { data_.assign(data_.size(), value); }

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

} // namespace waterfill
