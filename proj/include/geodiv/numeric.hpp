// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace geodiv::numeric {

/// Pairwise (tree) summation. The reduction order depends only on the input
/// length, so results are reproducible for a fixed element order.
double pairwise_sum(std::span<const double> xs);

/// Element-wise pairwise sum of equally sized rows.
std::vector<double> pairwise_sum_rows(std::span<const std::vector<double>> rows);

double mean(std::span<const double> xs);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);

/// Returns v / |v|. Throws DomainError on a zero or non-finite norm.
std::vector<double> normalized(std::span<const double> v);

double median(std::vector<double> xs);

}  // namespace geodiv::numeric
