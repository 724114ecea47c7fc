// SPDX-License-Identifier: Apache-2.0
// geodiv command-line entry point.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "geodiv/error.hpp"
#include "geodiv/geo.hpp"
#include "geodiv/interchange.hpp"
#include "geodiv/manifest.hpp"
#include "geodiv/projection.hpp"
#include "geodiv/report.hpp"
#include "geodiv/similarity.hpp"
#include "geodiv/store.hpp"
#include "geodiv/supplement.hpp"
#include "geodiv/synth.hpp"
#include "geodiv/topic_map.hpp"

namespace fs = std::filesystem;
using namespace geodiv;

namespace {

constexpr const char* kOutEnv = "GEODIV_OUT_DIR";

struct Common {
    std::vector<std::string> stores;
    std::string topic_map;
    std::size_t min_images = 10;
    std::vector<std::string> reps;
    std::uint64_t seed = 0;
    std::string out;
    unsigned threads = 1;
};

// Collects written files so the manifest can digest them.
class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
    }

    void write(const std::string& name, const std::string& body) {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out || !out.write(body.data(), static_cast<std::streamsize>(body.size())))
            throw IoError("cannot write '" + path.string() + "'");
        written_.push_back(name);
    }

    // SVG is a companion; failures are reported and never change the exit status.
    template <class F>
    void write_svg(const std::string& name, F&& render) {
        try {
            write(name, render());
        } catch (const std::exception& e) {
            std::cerr << "warning: skipped " << name << ": " << e.what() << "\n";
        }
    }

    // Registers a file some other writer put in the directory.
    void adopt(const std::string& name) { written_.push_back(name); }

    const fs::path& dir() const { return dir_; }
    const std::vector<std::string>& written() const { return written_; }

private:
    fs::path dir_;
    std::vector<std::string> written_;
};

void adopt_store_files(OutputDir& out, const std::string& name, const std::vector<std::string>& reps, bool packed) {
    out.adopt(name);
    if (packed)
        for (const auto& rep : reps) out.adopt(interchange::sidecar_path(name, rep).filename().string());
}

std::string default_out() {
    const char* env = std::getenv(kOutEnv);
    return env && *env ? env : "geodiv-out";
}

std::string safe_name(std::string s) {
    for (auto& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    return s;
}

std::map<std::string, std::string> option_values(const CLI::App& sub) {
    std::map<std::string, std::string> out;
    for (const auto* opt : sub.get_options()) {
        const auto name = opt->get_name();
        // --out names where results go, not what they are; keep it out of the digest.
        if (name.empty() || name == "--help" || name == "--out") continue;
        std::string value;
        if (opt->count() > 0) {
            const auto& res = opt->results();
            for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
            if (opt->get_type_size() == 0 && res.empty()) value = "true";
        } else {
            value = opt->get_default_str();
        }
        out[name] = value;
    }
    return out;
}

std::vector<fs::path> store_paths(const Common& c) {
    if (c.stores.empty()) throw ConfigError("--store is required");
    std::vector<fs::path> out;
    for (const auto& s : c.stores) {
        if (!fs::exists(s)) throw IoError("input file not found: " + s);
        out.emplace_back(s);
    }
    return out;
}

TopicMapConfig load_topic_map(const Common& c) {
    if (c.topic_map.empty()) return {};
    if (!fs::exists(c.topic_map)) throw IoError("input file not found: " + c.topic_map);
    return TopicMapConfig::load(c.topic_map);
}

struct Loaded {
    Store store;
    std::vector<RemovedGroup> removed;
    std::vector<fs::path> inputs;
};

Loaded load_store(const Common& c) {
    Loaded l;
    l.inputs = store_paths(c);
    const auto raw = ingest(l.inputs, load_topic_map(c));
    if (!c.topic_map.empty()) l.inputs.emplace_back(c.topic_map);
    auto filtered = filter_min_images(raw, c.min_images);
    l.store = std::move(filtered.store);
    l.removed = std::move(filtered.removed);
    for (const auto& rep : c.reps)
        if (!l.store.has_rep(rep)) throw MissingGroupError("rep_type '" + rep + "' not present after filtering");
    return l;
}

void finish(const std::string& command, const CLI::App& sub, const Common& c, const std::vector<fs::path>& inputs,
            OutputDir& out) {
    auto m = make_manifest(command, option_values(sub), inputs, c.seed);
    for (const auto& name : out.written()) m.output_digests[name] = sha256_file(out.dir() / name);
    out.write("manifest.json", m.to_json());
    std::cout << fmt::format("{}: wrote {} file(s) to {}\n", command, out.written().size(), out.dir().string());
}

void add_common(CLI::App* sub, Common& c, bool needs_store = true) {
    if (needs_store) {
        sub->add_option("--store", c.stores, "Interchange JSONL file(s), comma separated")->delimiter(',')->required();
        sub->add_option("--topic-map", c.topic_map, "YAML topic rename/drop/hyponym map");
        sub->add_option("--min-images", c.min_images, "Minimum images per (topic, country, rep) group")
            ->capture_default_str();
        sub->add_option("--reps", c.reps, "Representation types, comma separated (default: all)")->delimiter(',');
        sub->add_option("--threads", c.threads, "Worker thread cap")->capture_default_str()->check(CLI::Range(1u, 1024u));
    }
    sub->add_option("--out", c.out, std::string("Output directory (default: $") + kOutEnv + " or ./geodiv-out)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geographic diversity analysis over image embeddings"};
    app.set_version_flag("--version", GEODIV_VERSION);
    app.require_subcommand(1);

    Common c;

    auto* ingest_cmd = app.add_subcommand("ingest", "Validate, map and filter interchange files into one store file");
    add_common(ingest_cmd, c);
    bool packed = false;
    ingest_cmd->add_flag("--packed", packed, "Write vectors to binary sidecars");

    auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics, filter log and coverage gaps");
    add_common(stats_cmd, c);

    auto* heatmap_cmd = app.add_subcommand("heatmap", "Low- vs high-resource similarity grid per rep");
    add_common(heatmap_cmd, c);

    auto* targets_cmd = app.add_subcommand("select-targets", "Pairs below threshold under every rep");
    add_common(targets_cmd, c);
    bool strict = false;
    std::vector<std::string> threshold_overrides;
    targets_cmd->add_flag("--strict", strict, "Fail when reps disagree on the candidate pairs");
    targets_cmd->add_option("--threshold", threshold_overrides, "Override a rep's threshold, as rep=value");

    auto* rank_cmd = app.add_subcommand("rank", "Rank countries by similarity to an anchor for one topic");
    add_common(rank_cmd, c);
    std::string topic, country;
    rank_cmd->add_option("--topic", topic, "Topic")->required();
    rank_cmd->add_option("--country", country, "Anchor country")->required();

    auto* geo_cmd = app.add_subcommand("geo-corr", "Correlate capital distance with visual similarity");
    add_common(geo_cmd, c);
    std::string capitals;
    geo_cmd->add_option("--capitals", capitals, "CSV with country,capital,lat,lon")->required();

    auto* size_cmd = app.add_subcommand("size-corr", "Correlate image counts with similarity scores");
    add_common(size_cmd, c);

    auto* pca_cmd = app.add_subcommand("pca", "2-D PCA of a topic's country centroids");
    add_common(pca_cmd, c);
    std::string pca_rep = "clip";
    bool no_high = false;
    pca_cmd->add_option("--topic", topic, "Topic")->required();
    pca_cmd->add_option("--rep", pca_rep, "Representation to project")->capture_default_str();
    pca_cmd->add_flag("--no-high", no_high, "Leave out the high-resource centroid");

    auto* eval_cmd = app.add_subcommand("eval", "Data replacement experiment with a linear probe");
    add_common(eval_cmd, c);
    EvalConfig ec;
    eval_cmd->add_option("--seed", c.seed, "Seed for targets, split, shuffling and donors")->required();
    eval_cmd->add_option("--rep", ec.rep_type, "Representation the probe trains on")->capture_default_str();
    eval_cmd->add_option("--lr", ec.learning_rate, "Peak learning rate")->capture_default_str();
    eval_cmd->add_option("--epochs", ec.epochs, "Epochs")->capture_default_str();
    eval_cmd->add_option("--batch-size", ec.batch_size, "Batch size")->capture_default_str();
    eval_cmd->add_option("--warmup-epochs", ec.warmup_epochs, "Linear warmup epochs")->capture_default_str();
    eval_cmd->add_option("--weight-decay", ec.weight_decay, "AdamW decoupled weight decay")->capture_default_str();
    eval_cmd->add_option("--ratios", ec.ratios, "Replacement ratios, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    eval_cmd->add_option("--split", ec.split_fraction, "Train fraction per (topic, country)")->capture_default_str();

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic interchange file from a spec");
    add_common(synth_cmd, c, false);
    std::string spec_path;
    synth_cmd->add_option("--spec", spec_path, "Synthetic corpus spec (JSON)")->required();
    synth_cmd->add_option("--seed", c.seed, "Seed")->required();
    synth_cmd->add_flag("--packed", packed, "Write vectors to binary sidecars");

    for (auto* sub : {ingest_cmd, stats_cmd, heatmap_cmd, targets_cmd, rank_cmd, geo_cmd, size_cmd, pca_cmd})
        sub->add_option("--seed", c.seed, "Seed (recorded; unused by this command)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        OutputDir out(c.out.empty() ? default_out() : c.out);

        if (*ingest_cmd) {
            auto l = load_store(c);
            std::vector<EmbeddingRecord> records(l.store.records().begin(), l.store.records().end());
            interchange::write_file(out.dir() / "store.jsonl", records, packed);
            adopt_store_files(out, "store.jsonl", l.store.rep_types(), packed);
            out.write("filter.csv", report::filter_csv(l.removed));
            finish("ingest", *ingest_cmd, c, l.inputs, out);
            return 0;
        }

        if (*synth_cmd) {
            if (!fs::exists(spec_path)) throw IoError("input file not found: " + spec_path);
            const auto spec = SynthSpec::load(spec_path);
            const auto records = generate_synthetic_records(spec, c.seed);
            interchange::write_file(out.dir() / "synthetic.jsonl", records, packed);
            std::set<std::string> reps;
            for (const auto& r : records) reps.insert(r.rep_type);
            adopt_store_files(out, "synthetic.jsonl", {reps.begin(), reps.end()}, packed);
            finish("synth", *synth_cmd, c, {fs::path(spec_path)}, out);
            return 0;
        }

        const auto l = load_store(c);

        if (*stats_cmd) {
            out.write("stats.csv", report::stats_csv(stats(l.store)));
            out.write("filter.csv", report::filter_csv(l.removed));
            out.write("coverage.csv", report::coverage_csv(l.store.coverage_gaps()));
            finish("stats", *stats_cmd, c, l.inputs, out);
        } else if (*heatmap_cmd) {
            const SimilarityEngine engine(l.store, c.reps, c.threads);
            for (const auto& grid : engine.low_high_grids()) {
                const auto base = safe_name(grid.rep_type);
                out.write("grid_" + base + ".csv", report::grid_csv(grid));
                out.write_svg("heatmap_" + base + ".svg", [&] { return report::heatmap_svg(grid); });
            }
            finish("heatmap", *heatmap_cmd, c, l.inputs, out);
        } else if (*targets_cmd) {
            const SimilarityEngine engine(l.store, c.reps, c.threads);
            TargetOptions opts;
            opts.strict = strict;
            for (const auto& o : threshold_overrides) {
                const auto eq = o.find('=');
                if (eq == std::string::npos) throw ConfigError("--threshold expects rep=value, got '" + o + "'");
                try {
                    opts.thresholds[o.substr(0, eq)] = std::stod(o.substr(eq + 1));
                } catch (const std::logic_error&) {
                    throw ConfigError("--threshold value is not a number: '" + o + "'");
                }
            }
            const auto grids = engine.low_high_grids();
            const auto targets = select_targets(grids, opts);
            out.write("targets.csv", report::targets_csv(targets));
            out.write("excluded.csv", report::excluded_csv(targets));
            out.write("thresholds.csv", report::thresholds_csv(grids, targets));
            if (grids.size() >= 2) out.write("agreement.csv", report::agreement_csv(rep_agreement(grids)));
            finish("select-targets", *targets_cmd, c, l.inputs, out);
        } else if (*rank_cmd) {
            const SimilarityEngine engine(l.store, c.reps, c.threads);
            const auto t = canonical_topic(topic);
            const auto a = canonical_topic(country);
            const auto ranking = engine.rank_similar(t, a);
            out.write("ranking.csv", report::ranking_csv(ranking));
            out.write("cross_country.csv", report::cross_country_csv(engine.cross_country_grid(t)));
            finish("rank", *rank_cmd, c, l.inputs, out);
        } else if (*geo_cmd) {
            if (!fs::exists(capitals)) throw IoError("input file not found: " + capitals);
            const SimilarityEngine engine(l.store, c.reps, c.threads);
            const auto table = geo::CapitalTable::load(capitals);
            const auto rep = geo::geo_visual_correlation(engine, table);
            out.write("geo_correlation.csv", report::correlation_csv(rep));
            out.write("geo_observations.csv", report::observations_csv(rep));
            auto inputs = l.inputs;
            inputs.emplace_back(capitals);
            finish("geo-corr", *geo_cmd, c, inputs, out);
        } else if (*size_cmd) {
            const SimilarityEngine engine(l.store, c.reps, c.threads);
            out.write("size_correlation.csv", report::size_correlation_csv(geo::size_similarity_correlation(engine)));
            out.write("aggregate.csv", report::aggregate_csv(engine.aggregate_scores()));
            finish("size-corr", *size_cmd, c, l.inputs, out);
        } else if (*pca_cmd) {
            const SimilarityEngine engine(l.store, {pca_rep}, c.threads);
            const auto p = project_topic(engine, canonical_topic(topic), pca_rep, !no_high);
            out.write("pca.csv", report::scatter_csv(p));
            out.write_svg("pca.svg", [&] { return report::scatter_svg(p); });
            finish("pca", *pca_cmd, c, l.inputs, out);
        } else if (*eval_cmd) {
            ec.seed = c.seed;
            ec.similarity_reps = c.reps;
            const auto r = run_experiment(l.store, ec, c.threads);
            out.write("eval.csv", report::eval_csv(r));
            out.write("eval_targets.csv", report::eval_targets_csv(r));
            out.write_svg("eval.svg", [&] { return report::eval_svg(r); });
            finish("eval", *eval_cmd, c, l.inputs, out);
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
