#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace wayplan {

// Dense row-major matrix of doubles. Small graphs only, so no blocking or
// vectorization tricks.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), d_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return d_.size(); }

    double& operator()(int r, int c) {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return d_[static_cast<std::size_t>(r) * cols_ + c];
    }
    double operator()(int r, int c) const {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return d_[static_cast<std::size_t>(r) * cols_ + c];
    }

    double* data() { return d_.data(); }
    const double* data() const { return d_.data(); }
    std::vector<double>& raw() { return d_; }
    const std::vector<double>& raw() const { return d_; }

    bool operator==(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && d_ == o.d_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> d_;
};

// out = a * b
Mat matmul(const Mat& a, const Mat& b);
// out = a^T * b
Mat matmul_tn(const Mat& a, const Mat& b);
// out = a * b^T
Mat matmul_nt(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);

} // namespace wayplan
