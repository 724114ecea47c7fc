// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "geodiv/error.hpp"
#include "geodiv/geo.hpp"
#include "geodiv/projection.hpp"
#include "geodiv/similarity.hpp"
#include "geodiv/store.hpp"
#include "geodiv/supplement.hpp"
#include "geodiv/synth.hpp"
#include "geodiv/topic_map.hpp"

namespace py = pybind11;
using namespace geodiv;

namespace {

py::dict grid_dict(const SimilarityGrid& g) {
    py::dict cells;
    for (const auto& [p, v] : g.cells) cells[py::make_tuple(p.topic, p.country)] = v;
    py::list missing;
    for (const auto& p : g.missing) missing.append(py::make_tuple(p.topic, p.country));
    py::dict d;
    d["rep_type"] = g.rep_type;
    d["cells"] = cells;
    d["missing"] = missing;
    return d;
}

py::list pairs_list(const std::vector<PairKey>& ps) {
    py::list out;
    for (const auto& p : ps) out.append(py::make_tuple(p.topic, p.country));
    return out;
}

EvalConfig eval_config(const py::dict& d) {
    EvalConfig c;
    for (const auto& [k, v] : d) {
        const auto key = k.cast<std::string>();
        if (key == "learning_rate") c.learning_rate = v.cast<double>();
        else if (key == "epochs") c.epochs = v.cast<std::size_t>();
        else if (key == "batch_size") c.batch_size = v.cast<std::size_t>();
        else if (key == "warmup_epochs") c.warmup_epochs = v.cast<std::size_t>();
        else if (key == "weight_decay") c.weight_decay = v.cast<double>();
        else if (key == "ratios") c.ratios = v.cast<std::vector<double>>();
        else if (key == "split_fraction") c.split_fraction = v.cast<double>();
        else if (key == "seed") c.seed = v.cast<std::uint64_t>();
        else if (key == "rep_type") c.rep_type = v.cast<std::string>();
        else if (key == "similarity_reps") c.similarity_reps = v.cast<std::vector<std::string>>();
        else throw ConfigError("unknown eval option '" + key + "'");
    }
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Geographic diversity analysis over image embeddings";
    m.attr("__version__") = GEODIV_VERSION;

    auto base = py::register_exception<Error>(m, "GeodivError", PyExc_RuntimeError);
    py::register_exception<IngestError>(m, "IngestError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<MissingGroupError>(m, "MissingGroupError", base.ptr());
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());
    py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
    py::register_exception<UndefinedCorrelationError>(m, "UndefinedCorrelationError", base.ptr());

    py::class_<Store>(m, "Store")
        .def_static(
            "ingest",
            [](const std::vector<std::filesystem::path>& paths, std::optional<std::filesystem::path> topic_map) {
                return ingest(paths, topic_map ? TopicMapConfig::load(*topic_map) : TopicMapConfig{});
            },
            py::arg("paths"), py::arg("topic_map") = py::none())
        .def_static(
            "synthetic",
            [](const std::string& spec_json, std::uint64_t seed) {
                return generate_synthetic(SynthSpec::from_json(spec_json), seed);
            },
            py::arg("spec_json"), py::arg("seed"))
        .def("__len__", &Store::size)
        .def_property_readonly("rep_types", &Store::rep_types)
        .def_property_readonly("topics", &Store::topics)
        .def_property_readonly("countries", &Store::countries)
        .def_property_readonly("min_images", &Store::min_images)
        .def("pairs", [](const Store& s, std::optional<std::string> rep) {
            return pairs_list(rep ? s.pairs(*rep) : s.pairs());
        }, py::arg("rep_type") = py::none())
        .def("filter_min_images", [](const Store& s, std::size_t n) {
            auto r = filter_min_images(s, n);
            py::list removed;
            for (const auto& g : r.removed) removed.append(py::make_tuple(g.topic, g.country, g.rep_type, g.count));
            return py::make_tuple(std::move(r.store), removed);
        }, py::arg("min_images") = 10)
        .def("stats", [](const Store& s) {
            const auto st = stats(s);
            py::dict d;
            d["n_topics"] = st.n_topics;
            d["n_countries"] = st.n_countries;
            d["n_pairs"] = st.n_pairs;
            d["n_low_images"] = st.n_low_images;
            d["n_high_images"] = st.n_high_images;
            d["mean_images_per_pair"] = st.mean_images_per_pair;
            d["median_images_per_pair"] = st.median_images_per_pair;
            return d;
        });

    m.def("cosine", [](const std::vector<double>& a, const std::vector<double>& b) { return cosine(a, b); });
    m.def("centroid", [](const std::vector<std::vector<double>>& members) { return centroid_of(members).direction; });

    py::class_<SimilarityEngine>(m, "SimilarityEngine")
        .def(py::init<const Store&, std::vector<std::string>, unsigned>(), py::arg("store"),
             py::arg("reps") = std::vector<std::string>{}, py::arg("threads") = 1, py::keep_alive<1, 2>())
        .def_property_readonly("reps", &SimilarityEngine::reps)
        .def("low_high_grid", [](const SimilarityEngine& e, const std::string& rep) {
            return grid_dict(e.low_high_grid(rep));
        })
        .def("select_targets", [](const SimilarityEngine& e, bool strict) {
            TargetOptions o;
            o.strict = strict;
            const auto t = e.select_targets(o);
            py::dict d;
            d["targets"] = pairs_list(t.targets);
            d["thresholds"] = t.per_rep_thresholds;
            d["excluded"] = pairs_list(t.excluded);
            d["n_candidates"] = t.n_candidates;
            return d;
        }, py::arg("strict") = false)
        .def("rep_agreement", [](const SimilarityEngine& e) {
            const auto grids = e.low_high_grids();
            py::list out;
            for (const auto& a : rep_agreement(grids))
                out.append(py::make_tuple(a.rep_a, a.rep_b, a.r, a.shared_cells));
            return out;
        })
        .def("rank_similar", [](const SimilarityEngine& e, const std::string& topic, const std::string& anchor) {
            return e.rank_similar(topic, anchor).ranked;
        }, py::arg("topic"), py::arg("anchor"))
        .def("aggregate_scores", [](const SimilarityEngine& e) {
            const auto a = e.aggregate_scores();
            py::dict d;
            py::list countries, topics;
            for (const auto& s : a.countries) countries.append(py::make_tuple(s.name, s.score, s.observations));
            for (const auto& s : a.topics) topics.append(py::make_tuple(s.name, s.score, s.observations));
            d["countries"] = countries;
            d["topics"] = topics;
            return d;
        });

    m.def("vincenty_distance", [](double lat1, double lon1, double lat2, double lon2) {
        const auto d = geo::vincenty_inverse({lat1, lon1}, {lat2, lon2});
        return py::make_tuple(d.km, d.fallback);
    }, "Geodesic distance in km on WGS-84 and whether the spherical fallback was used.");
    m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return geo::pearson(x, y); });
    m.def("geo_visual_correlation", [](const SimilarityEngine& e, const std::filesystem::path& capitals) {
        const auto r = geo::geo_visual_correlation(e, geo::CapitalTable::load(capitals));
        py::dict d;
        d["global_r"] = r.global_r;
        d["n_pairs"] = r.n_pairs;
        py::dict per;
        for (const auto& c : r.per_country) per[py::str(c.country)] = py::make_tuple(c.r, c.n_pairs);
        d["per_country"] = per;
        d["skipped_countries"] = r.skipped_countries;
        return d;
    });

    m.def("pca2d", [](const std::vector<std::pair<std::string, std::vector<double>>>& vectors) {
        const auto p = pca2d(vectors);
        py::dict d;
        py::list pts;
        for (const auto& q : p.points) pts.append(py::make_tuple(q.label, q.x, q.y));
        d["points"] = pts;
        d["explained_variance_ratio"] = p.explained_variance_ratio;
        d["components"] = p.components;
        return d;
    });

    m.def("run_experiment", [](const Store& store, const py::dict& config, unsigned threads) {
        const auto cfg = eval_config(config);
        EvalReport r;
        {
            py::gil_scoped_release release;
            r = run_experiment(store, cfg, threads);
        }
        py::dict d;
        d["upper_bound_accuracy"] = r.upper_bound_accuracy;
        d["targets"] = pairs_list(r.targets);
        py::list cells;
        for (const auto& c : r.cells) {
            py::dict cd;
            cd["regime"] = std::string(to_string(c.regime));
            cd["ratio"] = c.ratio;
            cd["accuracy"] = c.accuracy;
            cd["target_accuracy"] = c.target_accuracy;
            cd["n_train"] = c.n_train;
            cd["n_test"] = c.n_test;
            cd["shortfall"] = c.shortfall;
            cells.append(cd);
        }
        d["cells"] = cells;
        return d;
    }, py::arg("store"), py::arg("config") = py::dict(), py::arg("threads") = 1);
}
