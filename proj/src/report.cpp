// SPDX-License-Identifier: Apache-2.0
#include "geodiv/report.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "geodiv/csv.hpp"

namespace geodiv::report {

using csv::join;
using csv::number;

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? number(*v) : std::string{}; }

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Diverging red (low) to blue (high) ramp over [lo, hi].
std::string ramp(double v, double lo, double hi) {
    const double t = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.5;
    const int r = static_cast<int>(std::lround(215 * (1 - t) + 33 * t));
    const int g = static_cast<int>(std::lround(48 * (1 - t) + 102 * t));
    const int b = static_cast<int>(std::lround(39 * (1 - t) + 172 * t));
    return fmt::format("#{:02x}{:02x}{:02x}", r, g, b);
}

}  // namespace

std::string filter_csv(const std::vector<RemovedGroup>& removed) {
    std::string out = "topic,country,rep_type,count\n";
    for (const auto& r : removed) out += join({r.topic, r.country, r.rep_type, std::to_string(r.count)}) + "\n";
    return out;
}

std::string stats_csv(const CorpusStats& s) {
    std::string out = "key,value\n";
    out += "n_topics," + std::to_string(s.n_topics) + "\n";
    out += "n_countries," + std::to_string(s.n_countries) + "\n";
    out += "n_pairs," + std::to_string(s.n_pairs) + "\n";
    out += "n_low_images," + std::to_string(s.n_low_images) + "\n";
    out += "n_high_images," + std::to_string(s.n_high_images) + "\n";
    out += "mean_images_per_pair," + number(s.mean_images_per_pair) + "\n";
    out += "median_images_per_pair," + number(s.median_images_per_pair) + "\n";
    out += "designated_rep," + csv::escape(s.designated_rep) + "\n";
    return out;
}

std::string coverage_csv(const std::vector<CoverageGap>& gaps) {
    std::string out = "topic,country,present_in,absent_in\n";
    auto bar = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "|" : "") + v[i];
        return s;
    };
    for (const auto& g : gaps) out += join({g.pair.topic, g.pair.country, bar(g.present_in), bar(g.absent_in)}) + "\n";
    return out;
}

std::string grid_csv(const SimilarityGrid& grid) {
    const auto topics = grid.topics();
    const auto countries = grid.countries();
    std::vector<std::string> header{"topic"};
    header.insert(header.end(), countries.begin(), countries.end());
    std::string out = join(header) + "\n";
    for (const auto& t : topics) {
        std::vector<std::string> row{t};
        for (const auto& c : countries) {
            auto it = grid.cells.find({t, c});
            row.push_back(it == grid.cells.end() ? std::string{} : number(it->second));
        }
        out += join(row) + "\n";
    }
    return out;
}

std::string thresholds_csv(const std::vector<SimilarityGrid>& grids, const AnnotationTargetSet& targets) {
    std::string out = "rep_type,threshold,n_cells,n_missing\n";
    for (const auto& g : grids)
        out += join({g.rep_type, number(targets.per_rep_thresholds.at(g.rep_type)), std::to_string(g.cells.size()),
                     std::to_string(g.missing.size())}) +
               "\n";
    return out;
}

std::string targets_csv(const AnnotationTargetSet& targets) {
    std::vector<std::string> header{"topic", "country", "mean_score"};
    for (const auto& r : targets.reps) header.push_back(r + "_score");
    for (const auto& r : targets.reps) header.push_back(r + "_threshold");
    std::string out = join(header) + "\n";
    for (const auto& p : targets.targets) {
        std::vector<std::string> row{p.topic, p.country, number(targets.headline_score(p))};
        const auto& scores = targets.per_rep_scores.at(p);
        for (const auto& r : targets.reps) row.push_back(number(scores.at(r)));
        for (const auto& r : targets.reps) row.push_back(number(targets.per_rep_thresholds.at(r)));
        out += join(row) + "\n";
    }
    return out;
}

std::string excluded_csv(const AnnotationTargetSet& targets) {
    std::string out = "topic,country\n";
    for (const auto& p : targets.excluded) out += join({p.topic, p.country}) + "\n";
    return out;
}

std::string agreement_csv(const std::vector<RepAgreement>& table) {
    std::string out = "rep_a,rep_b,r,shared_cells,note\n";
    for (const auto& a : table)
        out += join({a.rep_a, a.rep_b, opt_number(a.r), std::to_string(a.shared_cells), a.error}) + "\n";
    return out;
}

std::string ranking_csv(const CountryRanking& ranking) {
    std::vector<std::string> reps;
    if (!ranking.rep_breakdown.empty())
        for (const auto& [rep, _] : ranking.rep_breakdown.begin()->second) reps.push_back(rep);
    std::vector<std::string> header{"rank", "topic", "anchor", "country", "score"};
    for (const auto& r : reps) header.push_back(r);
    std::string out = join(header) + "\n";
    std::size_t rank = 1;
    for (const auto& [country, score] : ranking.ranked) {
        std::vector<std::string> row{std::to_string(rank++), ranking.topic, ranking.anchor, country, number(score)};
        for (const auto& r : reps) row.push_back(number(ranking.rep_breakdown.at(country).at(r)));
        out += join(row) + "\n";
    }
    return out;
}

std::string cross_country_csv(const CrossCountryGrid& grid) {
    const auto& m = grid.averaged;
    std::vector<std::string> header{"country"};
    header.insert(header.end(), m.countries().begin(), m.countries().end());
    std::string out = join(header) + "\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        std::vector<std::string> row{m.countries()[i]};
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(opt_number(m.at(i, j)));
        out += join(row) + "\n";
    }
    return out;
}

std::string aggregate_csv(const AggregateScores& scores) {
    std::string out = "kind,name,score,observations\n";
    for (const auto& e : scores.countries)
        out += join({"country", e.name, number(e.score), std::to_string(e.observations)}) + "\n";
    for (const auto& e : scores.topics)
        out += join({"topic", e.name, number(e.score), std::to_string(e.observations)}) + "\n";
    return out;
}

std::string correlation_csv(const geo::CorrelationReport& report) {
    std::string out = "country,r,n_pairs,skipped\n";
    out += join({"GLOBAL", number(report.global_r), std::to_string(report.n_pairs), "0"}) + "\n";
    for (const auto& c : report.per_country)
        out += join({c.country, opt_number(c.r), std::to_string(c.n_pairs), c.skipped ? "1" : "0"}) + "\n";
    return out;
}

std::string observations_csv(const geo::CorrelationReport& report) {
    std::string out = "country_a,country_b,distance_km,similarity,shared_topics,fallback\n";
    for (const auto& o : report.observations)
        out += join({o.country_a, o.country_b, number(o.distance_km), number(o.similarity),
                     std::to_string(o.shared_topics), o.fallback ? "1" : "0"}) +
               "\n";
    return out;
}

std::string size_correlation_csv(const geo::SizeCorrelation& sc) {
    std::string out = "level,name,images,score\n";
    out += join({"topic_r", "", "", opt_number(sc.topic_r)}) + "\n";
    out += join({"country_r", "", "", opt_number(sc.country_r)}) + "\n";
    for (const auto& r : sc.topics) out += join({"topic", r.name, std::to_string(r.images), number(r.score)}) + "\n";
    for (const auto& r : sc.countries)
        out += join({"country", r.name, std::to_string(r.images), number(r.score)}) + "\n";
    return out;
}

std::string scatter_csv(const PcaProjection& p) {
    std::string out = "label,x,y,r1,r2\n";
    for (const auto& pt : p.points)
        out += join({pt.label, number(pt.x), number(pt.y), number(p.explained_variance_ratio[0]),
                     number(p.explained_variance_ratio[1])}) +
               "\n";
    return out;
}

std::string eval_csv(const EvalReport& report) {
    std::string out = "regime,ratio,accuracy,target_accuracy,n_train,n_test,shortfall,final_loss\n";
    const auto n_test = report.cells.empty() ? 0 : report.cells.front().n_test;
    out += join({"upper_bound", number(0.0), number(report.upper_bound_accuracy),
                 opt_number(report.upper_bound_target_accuracy), "", std::to_string(n_test), "0", ""}) +
           "\n";
    for (const auto& c : report.cells)
        out += join({std::string(to_string(c.regime)), number(c.ratio), number(c.accuracy), opt_number(c.target_accuracy),
                     std::to_string(c.n_train), std::to_string(c.n_test), std::to_string(c.shortfall),
                     number(c.final_loss)}) +
               "\n";
    return out;
}

std::string eval_targets_csv(const EvalReport& report) {
    std::string out = "topic,country\n";
    for (const auto& t : report.targets) out += join({t.topic, t.country}) + "\n";
    return out;
}

std::string heatmap_svg(const SimilarityGrid& grid) {
    auto topics = grid.topics();
    auto countries = grid.countries();
    std::map<std::string, std::vector<double>> by_topic, by_country;
    double lo = 1.0, hi = -1.0;
    for (const auto& [p, s] : grid.cells) {
        by_topic[p.topic].push_back(s);
        by_country[p.country].push_back(s);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    auto mean_of = [](const std::map<std::string, std::vector<double>>& m, const std::string& k) {
        auto it = m.find(k);
        if (it == m.end() || it->second.empty()) return 2.0;  // undefined rows sort last
        double s = 0;
        for (double v : it->second) s += v;
        return s / static_cast<double>(it->second.size());
    };
    auto by_mean = [&](const auto& m) {
        return [&, m](const std::string& a, const std::string& b) {
            const double x = mean_of(m, a), y = mean_of(m, b);
            return x != y ? x < y : a < b;
        };
    };
    std::sort(topics.begin(), topics.end(), by_mean(by_topic));
    std::sort(countries.begin(), countries.end(), by_mean(by_country));

    constexpr int cell = 14, left = 160, top = 120;
    const int width = left + cell * static_cast<int>(countries.size()) + 20;
    const int height = top + cell * static_cast<int>(topics.size()) + 20;
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"10\">\n<title>{}</title>\n",
        width, height, xml_escape(grid.rep_type));
    for (std::size_t j = 0; j < countries.size(); ++j)
        out += fmt::format("<text transform=\"translate({},{}) rotate(-60)\">{}</text>\n",
                           left + static_cast<int>(j) * cell + cell / 2, top - 4, xml_escape(countries[j]));
    for (std::size_t i = 0; i < topics.size(); ++i) {
        const int y = top + static_cast<int>(i) * cell;
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", left - 4, y + cell - 3,
                           xml_escape(topics[i]));
        for (std::size_t j = 0; j < countries.size(); ++j) {
            const int x = left + static_cast<int>(j) * cell;
            auto it = grid.cells.find({topics[i], countries[j]});
            if (it == grid.cells.end()) {
                out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#eeeeee\"/>\n", x, y, cell, cell);
            } else {
                out += fmt::format(
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"><title>{} / {}: {:.3f}</title></rect>\n",
                    x, y, cell, cell, ramp(it->second, lo, hi), xml_escape(topics[i]), xml_escape(countries[j]),
                    it->second);
            }
        }
    }
    out += "</svg>\n";
    return out;
}

std::string scatter_svg(const PcaProjection& p) {
    constexpr double size = 480, pad = 50;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    for (const auto& pt : p.points) {
        xmin = std::min(xmin, pt.x);
        xmax = std::max(xmax, pt.x);
        ymin = std::min(ymin, pt.y);
        ymax = std::max(ymax, pt.y);
    }
    const double sx = xmax > xmin ? (size - 2 * pad) / (xmax - xmin) : 1.0;
    const double sy = ymax > ymin ? (size - 2 * pad) / (ymax - ymin) : 1.0;
    auto px = [&](double x) { return pad + (x - xmin) * sx; };
    auto py = [&](double y) { return size - pad - (y - ymin) * sy; };

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" font-family=\"sans-serif\" "
        "font-size=\"10\">\n<title>{1}</title>\n<text x=\"{2}\" y=\"20\">{1} (PC1 {3:.1f}%, PC2 {4:.1f}%)</text>\n",
        size, xml_escape(p.topic), pad, 100 * p.explained_variance_ratio[0], 100 * p.explained_variance_ratio[1]);
    for (const auto& pt : p.points) {
        const double x = px(pt.x), y = py(pt.y);
        if (pt.label == kHighLabel) {
            std::string pts;
            for (int k = 0; k < 10; ++k) {
                const double r = k % 2 == 0 ? 8.0 : 3.5;
                const double a = -std::numbers::pi / 2 + k * std::numbers::pi / 5;
                pts += fmt::format("{:.2f},{:.2f} ", x + r * std::cos(a), y + r * std::sin(a));
            }
            out += fmt::format("<polygon points=\"{}\" fill=\"#d4a017\" stroke=\"black\"/>\n", pts);
        } else {
            out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"#2166ac\"/>\n", x, y);
        }
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", x + 6, y - 6, xml_escape(pt.label));
    }
    out += "</svg>\n";
    return out;
}

std::string eval_svg(const EvalReport& report) {
    constexpr double w = 560, h = 360, pad = 50;
    auto px = [&](double kept) { return pad + kept * (w - 2 * pad); };
    auto py = [&](double acc) { return h - pad - acc * (h - 2 * pad); };
    const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3", "#666666"};

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"11\">\n",
        w, h);
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", pad, h - pad, w - pad);
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", pad, h - pad, pad);
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">target-country data ratio</text>\n", w / 2, h - 12);
    out += fmt::format("<text transform=\"translate(14,{}) rotate(-90)\" text-anchor=\"middle\">accuracy (%)</text>\n", h / 2);
    out += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"black\" stroke-dasharray=\"4,3\"/>\n",
                       pad, py(report.upper_bound_accuracy), w - pad);

    std::size_t k = 0;
    for (auto regime : kAllRegimes) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& c : report.cells)
            if (c.regime == regime) pts.emplace_back(1.0 - c.ratio, c.accuracy);
        std::sort(pts.begin(), pts.end());
        std::string path;
        for (const auto& [x, y] : pts) path += fmt::format("{:.2f},{:.2f} ", px(x), py(y));
        out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", path, colors[k]);
        out += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", w - pad + 4 - 90, pad + 14 * k, colors[k],
                           to_string(regime));
        ++k;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace geodiv::report
