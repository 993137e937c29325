#include "hbd/matrix.hpp"

#include <algorithm>

#include "hbd/errors.hpp"

namespace hbd {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows, std::size_t cols) {
    Matrix m(0, rows.empty() ? cols : rows.front().size());
    for (const auto& r : rows) {
        if (r.size() != m.cols_) throw DimensionError("ragged matrix rows");
        m.append_row(r);
    }
    return m;
}

void Matrix::append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) throw DimensionError("row length does not match column count");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

void Matrix::resize_cols(std::size_t cols) {
    if (cols < cols_) throw DimensionError("resize_cols cannot shrink");
    std::vector<double> next(rows_ * cols, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        std::copy_n(data_.begin() + i * cols_, cols_, next.begin() + i * cols);
    data_ = std::move(next);
    cols_ = cols;
}

std::vector<double> Matrix::multiply(std::span<const double> x) const {
    if (x.size() != cols_) throw DimensionError("multiply: size mismatch");
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = dot(row(i), x);
    return out;
}

std::vector<double> Matrix::transpose_multiply(std::span<const double> x) const {
    if (x.size() != rows_) throw DimensionError("transpose_multiply: size mismatch");
    std::vector<double> out(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        if (x[i] == 0.0) continue;
        auto r = row(i);
        for (std::size_t j = 0; j < cols_; ++j) out[j] += x[i] * r[j];
    }
    return out;
}

bool Matrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace hbd
