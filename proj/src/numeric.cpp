// SPDX-License-Identifier: Apache-2.0
#include "geodiv/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "geodiv/error.hpp"

namespace geodiv::numeric {

namespace {

constexpr std::size_t kLeafSize = 8;

double pairwise_sum_impl(const double* xs, std::size_t n) {
    if (n <= kLeafSize) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += xs[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_impl(xs, half) + pairwise_sum_impl(xs + half, n - half);
}

void pairwise_rows_impl(std::span<const std::vector<double>> rows, std::vector<double>& out) {
    if (rows.size() <= kLeafSize) {
        std::fill(out.begin(), out.end(), 0.0);
        for (const auto& row : rows)
            for (std::size_t j = 0; j < out.size(); ++j) out[j] += row[j];
        return;
    }
    const std::size_t half = rows.size() / 2;
    std::vector<double> right(out.size());
    pairwise_rows_impl(rows.subspan(0, half), out);
    pairwise_rows_impl(rows.subspan(half), right);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += right[j];
}

}  // namespace

double pairwise_sum(std::span<const double> xs) {
    return pairwise_sum_impl(xs.data(), xs.size());
}

std::vector<double> pairwise_sum_rows(std::span<const std::vector<double>> rows) {
    if (rows.empty()) return {};
    const std::size_t dim = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != dim) throw DomainError("pairwise_sum_rows: ragged rows");
    std::vector<double> out(dim);
    pairwise_rows_impl(rows, out);
    return out;
}

double mean(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("mean of an empty series");
    return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DomainError("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> v) {
    // Scaled to avoid overflow on large raw encoder outputs.
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double s = 0.0;
    for (double x : v) {
        const double y = x / scale;
        s += y * y;
    }
    return scale * std::sqrt(s);
}

std::vector<double> normalized(std::span<const double> v) {
    const double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot normalize a zero or non-finite vector");
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x /= n;
    return out;
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw DomainError("median of an empty series");
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace geodiv::numeric
