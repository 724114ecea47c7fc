// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "geodiv/geo.hpp"
#include "geodiv/projection.hpp"
#include "geodiv/similarity.hpp"
#include "geodiv/store.hpp"
#include "geodiv/supplement.hpp"

// CSV is the canonical output. Every writer returns the full file body with a
// header row and '\n' line endings; numbers use the shortest round-trip form.
namespace geodiv::report {

std::string filter_csv(const std::vector<RemovedGroup>& removed);
std::string stats_csv(const CorpusStats& s);
std::string coverage_csv(const std::vector<CoverageGap>& gaps);

/// Rows = topics, columns = countries; empty cell = missing or absent.
std::string grid_csv(const SimilarityGrid& grid);
std::string thresholds_csv(const std::vector<SimilarityGrid>& grids, const AnnotationTargetSet& targets);
std::string targets_csv(const AnnotationTargetSet& targets);
std::string excluded_csv(const AnnotationTargetSet& targets);
std::string agreement_csv(const std::vector<RepAgreement>& table);

std::string ranking_csv(const CountryRanking& ranking);
std::string cross_country_csv(const CrossCountryGrid& grid);
std::string aggregate_csv(const AggregateScores& scores);

std::string correlation_csv(const geo::CorrelationReport& report);
std::string observations_csv(const geo::CorrelationReport& report);
std::string size_correlation_csv(const geo::SizeCorrelation& sc);

std::string scatter_csv(const PcaProjection& p);
std::string eval_csv(const EvalReport& report);
std::string eval_targets_csv(const EvalReport& report);

// SVG renderings are best-effort companions to the CSVs.

/// Both axes sorted from least to most similar (row/column means).
std::string heatmap_svg(const SimilarityGrid& grid);
/// High-resource point drawn as a star.
std::string scatter_svg(const PcaProjection& p);
/// One line per regime; x is the kept target-country data ratio.
std::string eval_svg(const EvalReport& report);

}  // namespace geodiv::report
