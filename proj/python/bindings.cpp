// Python bindings for the main operations: embedding IO and geometry,
// word2vec training, cultural dimensions, survey validation, and resampled
// confidence intervals.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wordgeom/pipeline.hpp"

namespace py = pybind11;
using namespace wordgeom;

namespace {

std::vector<double> row_copy(const Embedding& emb, const std::string& token) {
    auto r = emb.vector(token);
    return {r.begin(), r.end()};
}

StatisticSpec statistic_from_json(const std::string& text) {
    return StatisticSpec::parse(text);
}

py::dict ci_to_dict(const ConfidenceInterval& ci) {
    py::dict d;
    d["estimate"] = ci.estimate;
    d["lower"] = ci.lower;
    d["upper"] = ci.upper;
    d["level"] = ci.level;
    py::list values;
    py::list failures;
    for (const auto& r : ci.replicates) {
        if (r.value) {
            values.append(*r.value);
        } else {
            py::dict f;
            f["replicate"] = r.index;
            f["error"] = r.error;
            failures.append(f);
        }
    }
    d["replicate_values"] = values;
    d["failures"] = failures;
    return d;
}

}  // namespace

PYBIND11_MODULE(wordgeom, m) {
    m.doc() = "Cultural-dimension analysis of word embedding spaces";

    py::register_exception<missing_token_error>(m, "MissingTokenError",
                                                PyExc_KeyError);
    py::register_exception<parse_error>(m, "ParseError", PyExc_ValueError);

    py::class_<Embedding>(m, "Embedding")
        .def("__len__", &Embedding::size)
        .def_property_readonly("dim", &Embedding::dim)
        .def_property_readonly("normalized", &Embedding::normalized)
        .def_property_readonly("tokens", &Embedding::tokens)
        .def("__contains__", &Embedding::contains)
        .def("vector", &row_copy, py::arg("token"))
        .def("index_of", [](const Embedding& e, const std::string& t) {
            return e.index_of(t);
        });

    m.def(
        "load_embedding",
        [](const std::string& path, const std::string& format, bool case_fold,
           std::optional<std::size_t> max_vocab) {
            LoadOptions options;
            options.case_fold = case_fold;
            options.max_vocab = max_vocab;
            return load_embedding(path, format_from_string(format), options);
        },
        py::arg("path"), py::arg("format") = "word2vec-binary",
        py::arg("case_fold") = false, py::arg("max_vocab") = std::nullopt);
    m.def(
        "save_embedding",
        [](const Embedding& emb, const std::string& path,
           const std::string& format) {
            save_embedding(emb, path, format_from_string(format));
        },
        py::arg("embedding"), py::arg("path"),
        py::arg("format") = "word2vec-binary");
    m.def(
        "normalize",
        [](const Embedding& emb) { return normalize(emb); },
        py::arg("embedding"));
    m.def(
        "cosine",
        [](const std::vector<double>& u, const std::vector<double>& v) {
            return cosine(u, v);
        },
        py::arg("u"), py::arg("v"));
    m.def(
        "nearest_neighbors",
        [](const Embedding& emb, const std::vector<double>& query,
           std::size_t count, const std::vector<std::string>& exclude) {
            std::unordered_set<std::string> excl(exclude.begin(),
                                                 exclude.end());
            std::vector<std::pair<std::string, double>> out;
            for (const auto& n : nearest_neighbors(emb, query, count, excl))
                out.emplace_back(n.token, n.cosine);
            return out;
        },
        py::arg("embedding"), py::arg("query"), py::arg("count") = 10,
        py::arg("exclude") = std::vector<std::string>{});
    m.def("analogy", &analogy, py::arg("embedding"), py::arg("a"),
          py::arg("b"), py::arg("c"));
    m.def(
        "entity_vector",
        [](const Embedding& emb, const std::vector<std::string>& tokens) {
            auto ev = entity_vector(emb, tokens);
            return py::make_tuple(ev.vector, ev.found, ev.missing);
        },
        py::arg("embedding"), py::arg("tokens"));

    // ---- training ---------------------------------------------------------
    py::class_<TrainingConfig>(m, "TrainingConfig")
        .def(py::init<>())
        .def_readwrite("dim", &TrainingConfig::dim)
        .def_readwrite("window", &TrainingConfig::window)
        .def_readwrite("negative", &TrainingConfig::negative)
        .def_readwrite("epochs", &TrainingConfig::epochs)
        .def_readwrite("min_count", &TrainingConfig::min_count)
        .def_readwrite("subsample_t", &TrainingConfig::subsample_t)
        .def_readwrite("initial_lr", &TrainingConfig::initial_lr)
        .def_readwrite("seed", &TrainingConfig::seed)
        .def_readwrite("workers", &TrainingConfig::workers)
        .def_readwrite("dynamic_window", &TrainingConfig::dynamic_window)
        .def_property(
            "architecture",
            [](const TrainingConfig& c) {
                return c.architecture == Architecture::cbow ? "cbow" : "sgns";
            },
            [](TrainingConfig& c, const std::string& name) {
                c.architecture = architecture_from_string(name);
            });

    py::class_<ModelState>(m, "ModelState")
        .def_readonly("input", &ModelState::input)
        .def_readonly("context", &ModelState::context)
        .def_readonly("epoch_loss", &ModelState::epoch_loss)
        .def_readonly("epoch_pairs", &ModelState::epoch_pairs);

    m.def("load_plain_corpus", &load_plain_corpus, py::arg("path"));
    m.def("load_weighted_corpus", &load_weighted_corpus, py::arg("path"));
    py::class_<Corpus>(m, "Corpus")
        .def_property_readonly("record_count", &Corpus::record_count)
        .def_property_readonly("token_occurrences",
                               &Corpus::token_occurrences);
    m.def("train", &train, py::arg("corpus"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    // ---- dimensions ---------------------------------------------------------
    py::class_<CulturalDimension>(m, "CulturalDimension")
        .def_readonly("name", &CulturalDimension::name)
        .def_readonly("vector", &CulturalDimension::vector)
        .def_property_readonly(
            "pairs_used",
            [](const CulturalDimension& d) {
                std::vector<std::pair<std::string, std::string>> out;
                for (const auto& p : d.pairs_used)
                    out.emplace_back(p.first, p.second);
                return out;
            })
        .def_property_readonly("pairs_skipped", [](const CulturalDimension& d) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& s : d.pairs_skipped)
                out.emplace_back(s.pair.first + " " + s.pair.second, s.reason);
            return out;
        });

    m.def(
        "build_dimension",
        [](const Embedding& emb,
           const std::vector<std::pair<std::string, std::string>>& pairs,
           const std::string& on_missing, const std::string& name) {
            std::vector<AntonymPair> ps;
            for (const auto& [a, b] : pairs) ps.push_back({a, b});
            OnMissing mode = on_missing == "error" ? OnMissing::error
                                                   : OnMissing::skip;
            return build_dimension(emb, ps, mode, name);
        },
        py::arg("embedding"), py::arg("pairs"), py::arg("on_missing") = "skip",
        py::arg("name") = "");
    m.def(
        "project",
        [](const Embedding& emb, const std::string& token,
           const CulturalDimension& dim) { return project(emb, token, dim); },
        py::arg("embedding"), py::arg("token"), py::arg("dimension"));
    m.def("project_all", &project_all, py::arg("embedding"),
          py::arg("dimension"));
    m.def(
        "dimension_angle",
        [](const CulturalDimension& a, const CulturalDimension& b) {
            auto angle = dimension_angle(a, b);
            return py::make_tuple(angle.cosine, angle.degrees);
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "variance_explained",
        [](const Embedding& emb, const CulturalDimension& dim, bool centered) {
            return variance_explained(emb, dim, centered);
        },
        py::arg("embedding"), py::arg("dimension"), py::arg("centered") = true);
    m.def("top_component_variance", &top_component_variance,
          py::arg("embedding"), py::arg("rel_tol") = 1e-7,
          py::arg("max_iters") = 10000, py::arg("threads") = 1,
          py::call_guard<py::gil_scoped_release>());

    m.def("load_antonym_lexicon", &load_antonym_lexicon, py::arg("path"));
    py::class_<AntonymLexicon>(m, "AntonymLexicon")
        .def_property_readonly(
            "pairs",
            [](const AntonymLexicon& lex) {
                std::vector<std::pair<std::string, std::string>> out;
                for (const auto& p : lex.pairs)
                    out.emplace_back(p.first, p.second);
                return out;
            })
        .def_readonly("provenance", &AntonymLexicon::provenance);
    m.def("filter_lexicon", &filter_lexicon, py::arg("lexicon"),
          py::arg("embedding"), py::arg("top_n"));
    m.def(
        "scan_nearest_dimensions",
        [](const Embedding& emb, const CulturalDimension& focal,
           const AntonymLexicon& lex, std::size_t top_k) {
            auto result = scan_nearest_dimensions(emb, focal, lex, top_k);
            std::vector<std::tuple<std::string, std::string, double>> ranked;
            for (const auto& r : result.ranked)
                ranked.emplace_back(r.pair.first, r.pair.second, r.cosine);
            return py::make_tuple(ranked, result.pairs_dropped);
        },
        py::arg("embedding"), py::arg("focal"), py::arg("lexicon"),
        py::arg("top_k") = 10);

    // ---- resampling -----------------------------------------------------------
    py::class_<ResamplingPlan>(m, "ResamplingPlan")
        .def_static("parse", &ResamplingPlan::parse, py::arg("json_text"))
        .def_static("load", &ResamplingPlan::load, py::arg("path"))
        .def("to_json", &ResamplingPlan::to_json);
    m.def(
        "bootstrap_ci",
        [](const Corpus& corpus, const ResamplingPlan& plan) {
            ConfidenceInterval ci = [&] {
                py::gil_scoped_release release;
                return bootstrap_ci(corpus, plan);
            }();
            return ci_to_dict(ci);
        },
        py::arg("corpus"), py::arg("plan"));
    m.def(
        "subsample_ci",
        [](const Corpus& corpus, const ResamplingPlan& plan) {
            ConfidenceInterval ci = [&] {
                py::gil_scoped_release release;
                return subsample_ci(corpus, plan);
            }();
            return ci_to_dict(ci);
        },
        py::arg("corpus"), py::arg("plan"));
    m.def(
        "statistic_eval",
        [](const Embedding& emb, const std::string& spec_json) {
            return statistic_eval(emb, statistic_from_json(spec_json));
        },
        py::arg("embedding"), py::arg("statistic_json"));

    // ---- validation --------------------------------------------------------
    m.def(
        "validation_report",
        [](const std::string& responses, const std::string& demographics,
           const std::string& population, const Embedding& emb,
           const std::vector<std::tuple<std::string, std::string, int>>&
               scales,
           double alpha) {
            ValidationInputs inputs;
            inputs.responses_csv = responses;
            inputs.demographics_csv = demographics;
            inputs.population_csv = population;
            inputs.alpha = alpha;
            for (const auto& [scale, spec_path, orientation] : scales)
                inputs.scales.emplace_back(
                    scale, load_dimension_spec(spec_path), orientation);
            return validation_report(inputs, emb).to_json().dump(2);
        },
        py::arg("responses_csv"), py::arg("demographics_csv"),
        py::arg("population_csv"), py::arg("embedding"), py::arg("scales"),
        py::arg("alpha") = 0.01);
    m.def(
        "welch_t_test",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            auto r = welch_t_test(a, b);
            return py::make_tuple(r.t, r.df, r.p);
        },
        py::arg("a"), py::arg("b"));
    m.def("pearson", &pearson, py::arg("x"), py::arg("y"));
}
