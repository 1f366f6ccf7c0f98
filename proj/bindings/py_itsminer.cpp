#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "itsminer/corpus/corpus.hpp"
#include "itsminer/errors.hpp"
#include "itsminer/eval/metrics.hpp"
#include "itsminer/eval/ranking.hpp"
#include "itsminer/features/features.hpp"
#include "itsminer/learn/learn.hpp"
#include "itsminer/runner/runner.hpp"
#include "itsminer/textprep/textprep.hpp"

namespace py = pybind11;
using namespace itsminer;

namespace {

corpus::SuccessLabel label_from_string(const std::string& name) {
    auto label = corpus::parse_success_label(name);
    if (!label) throw ConfigError("unknown label '" + name + "'");
    return *label;
}

learn::ClassifierKind kind_from_string(const std::string& name) {
    auto kind = learn::parse_classifier_kind(name);
    if (!kind) throw ConfigError("unknown classifier '" + name + "'");
    return *kind;
}

features::WeightingScheme weighting_from_string(const std::string& name) {
    if (name == "tf") return features::WeightingScheme::TF;
    if (name == "tfidf") return features::WeightingScheme::TFIDF;
    throw ConfigError("unknown weighting '" + name + "'");
}

std::vector<corpus::SuccessLabel> labels_from_strings(const std::vector<std::string>& names) {
    std::vector<corpus::SuccessLabel> labels;
    labels.reserve(names.size());
    for (const std::string& n : names) labels.push_back(label_from_string(n));
    return labels;
}

py::object optional_to_py(const std::optional<double>& v) {
    if (!v) return py::none();
    return py::float_(*v);
}

py::dict metrics_to_dict(const eval::MetricSet& m) {
    py::dict d;
    d["accuracy"] = optional_to_py(m.accuracy);
    d["precision_successful"] = optional_to_py(m.precision_successful);
    d["precision_unsuccessful"] = optional_to_py(m.precision_unsuccessful);
    d["recall_successful"] = optional_to_py(m.recall_successful);
    d["recall_unsuccessful"] = optional_to_py(m.recall_unsuccessful);
    d["f1_successful"] = optional_to_py(m.f1_successful);
    d["f1_unsuccessful"] = optional_to_py(m.f1_unsuccessful);
    return d;
}

}  // namespace

PYBIND11_MODULE(itsminer, m) {
    m.doc() = "issue-success prediction toolkit: text preprocessing, n-gram/tf-idf "
              "featurization, seven classifiers, evaluation metrics and the experiment grid";

    py::register_exception<Error>(m, "ItsminerError");

    // --- textprep ---------------------------------------------------------
    m.def("apply_replacements", &textprep::apply_replacements, py::arg("text"),
          "Replace URLs, users, votes, numbers, versions, emails, code and paths "
          "with placeholder tokens.");
    m.def(
        "tokenize",
        [](const std::string& text) {
            std::vector<std::string> out;
            for (const auto& t : textprep::tokenize(text)) out.push_back(t.surface);
            return out;
        },
        py::arg("text"));
    m.def(
        "pos_tag",
        [](const std::vector<std::string>& tokens) {
            std::vector<std::string> out;
            out.reserve(tokens.size());
            for (const std::string& t : tokens)
                out.emplace_back(textprep::pos_tag_name(textprep::PosTagger::bundled().tag_word(t)));
            return out;
        },
        py::arg("tokens"));

    // --- features ---------------------------------------------------------
    py::class_<features::SparseVector>(m, "SparseVector")
        .def(py::init([](std::int32_t dim, std::vector<std::pair<std::int32_t, double>> entries) {
                 features::SparseVector v;
                 v.dim = dim;
                 v.entries = std::move(entries);
                 return v;
             }),
             py::arg("dim"), py::arg("entries"))
        .def_readonly("dim", &features::SparseVector::dim)
        .def_readonly("entries", &features::SparseVector::entries)
        .def("l2_norm", &features::SparseVector::l2_norm)
        .def("__repr__", [](const features::SparseVector& v) {
            return "<SparseVector dim=" + std::to_string(v.dim) + " nnz=" +
                   std::to_string(v.entries.size()) + ">";
        });

    m.def(
        "extract_ngrams",
        [](const std::vector<std::string>& units, int n_min, int n_max) {
            return std::map<std::string, double>(features::extract_ngrams(units, n_min, n_max));
        },
        py::arg("units"), py::arg("n_min"), py::arg("n_max"));

    py::class_<features::Vocabulary>(m, "Vocabulary")
        .def_static(
            "fit",
            [](const std::vector<std::map<std::string, double>>& docs, int min_df,
               std::optional<int> max_features, const std::string& family) {
                std::vector<features::FeatureCounts> counts(docs.begin(), docs.end());
                features::FeatureFamily f = family == "pos"
                                                ? features::FeatureFamily::pos_ngrams()
                                                : features::FeatureFamily::word_ngrams();
                return features::Vocabulary::fit(counts, f, min_df, max_features);
            },
            py::arg("documents"), py::arg("min_df") = 2, py::arg("max_features") = py::none(),
            py::arg("family") = "word")
        .def_property_readonly("size", &features::Vocabulary::size)
        .def_property_readonly("n_documents", &features::Vocabulary::n_documents)
        .def("index_of", &features::Vocabulary::index_of, py::arg("feature"))
        .def("df", &features::Vocabulary::df, py::arg("feature"))
        .def("features", &features::Vocabulary::features)
        .def("save", &features::Vocabulary::save, py::arg("path"))
        .def_static("load", &features::Vocabulary::load, py::arg("path"));

    m.def(
        "vectorize",
        [](const std::map<std::string, double>& doc, const features::Vocabulary& vocab,
           const std::string& weighting) {
            return features::vectorize(features::FeatureCounts(doc.begin(), doc.end()), vocab,
                                       weighting_from_string(weighting));
        },
        py::arg("document"), py::arg("vocabulary"), py::arg("weighting") = "tfidf");

    // --- learn --------------------------------------------------------------
    py::class_<learn::HyperParams>(m, "HyperParams")
        .def(py::init<>())
        .def_readwrite("mnb_alpha", &learn::HyperParams::mnb_alpha)
        .def_readwrite("lr_c", &learn::HyperParams::lr_c)
        .def_readwrite("lr_max_iter", &learn::HyperParams::lr_max_iter)
        .def_readwrite("svc_c", &learn::HyperParams::svc_c)
        .def_readwrite("svc_gamma", &learn::HyperParams::svc_gamma)
        .def_readwrite("tree_max_depth", &learn::HyperParams::tree_max_depth)
        .def_readwrite("mlp_hidden", &learn::HyperParams::mlp_hidden)
        .def_readwrite("mlp_max_iter", &learn::HyperParams::mlp_max_iter)
        .def_readwrite("rfc_trees", &learn::HyperParams::rfc_trees)
        .def_readwrite("gbc_stages", &learn::HyperParams::gbc_stages)
        .def_readwrite("gbc_learning_rate", &learn::HyperParams::gbc_learning_rate)
        .def_readwrite("seed", &learn::HyperParams::seed);

    py::class_<learn::TrainedModel>(m, "TrainedModel")
        .def_property_readonly("kind",
                               [](const learn::TrainedModel& model) {
                                   return std::string(learn::classifier_kind_name(model.kind));
                               })
        .def_readonly("vocab_dim", &learn::TrainedModel::vocab_dim)
        .def_readonly("n_train", &learn::TrainedModel::n_train)
        .def_readonly("converged", &learn::TrainedModel::converged);

    m.def(
        "fit",
        [](const std::string& kind, const std::vector<features::SparseVector>& X,
           const std::vector<std::string>& y, const learn::HyperParams& params) {
            return learn::fit(kind_from_string(kind), X, labels_from_strings(y), params);
        },
        py::arg("kind"), py::arg("X"), py::arg("y"), py::arg("params") = learn::HyperParams{});
    m.def(
        "predict",
        [](const learn::TrainedModel& model, const features::SparseVector& x) {
            return std::string(corpus::success_label_name(learn::predict(model, x)));
        },
        py::arg("model"), py::arg("x"));
    m.def("predict_score", &learn::predict_score, py::arg("model"), py::arg("x"));
    m.def("save_model", &learn::save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &learn::load_model, py::arg("path"));

    // --- eval ---------------------------------------------------------------
    py::class_<eval::ConfusionMatrix>(m, "ConfusionMatrix")
        .def(py::init([](std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn) {
                 return eval::ConfusionMatrix{tp, fp, tn, fn};
             }),
             py::arg("tp"), py::arg("fp"), py::arg("tn"), py::arg("fn"))
        .def_readonly("tp", &eval::ConfusionMatrix::tp)
        .def_readonly("fp", &eval::ConfusionMatrix::fp)
        .def_readonly("tn", &eval::ConfusionMatrix::tn)
        .def_readonly("fn", &eval::ConfusionMatrix::fn);

    m.def(
        "confusion",
        [](const std::vector<std::string>& actual, const std::vector<std::string>& predicted) {
            return eval::confusion(labels_from_strings(actual), labels_from_strings(predicted));
        },
        py::arg("actual"), py::arg("predicted"));
    m.def(
        "metrics", [](const eval::ConfusionMatrix& cm) { return metrics_to_dict(eval::metrics(cm)); },
        py::arg("confusion_matrix"));
    m.def(
        "descriptive_stats",
        [](const std::vector<double>& values) {
            eval::DescriptiveStats s = eval::descriptive_stats(values);
            py::dict d;
            d["min"] = s.min;
            d["max"] = s.max;
            d["mean"] = s.mean;
            d["variance"] = s.variance;
            d["std"] = s.std_dev;
            return d;
        },
        py::arg("values"));
    m.def("pearson", &eval::pearson, py::arg("x"), py::arg("y"));
    m.def(
        "rank_features",
        [](const std::vector<std::pair<std::string, std::vector<std::string>>>& rankings,
           int top_k) {
            std::vector<eval::ExperimentRanking> rs;
            for (const auto& [id, features] : rankings)
                rs.push_back(eval::ExperimentRanking{id, features});
            std::vector<std::tuple<std::string, std::int64_t, double>> out;
            for (const auto& e : eval::rank_features(rs, top_k))
                out.emplace_back(e.feature, e.n, e.ar);
            return out;
        },
        py::arg("rankings"), py::arg("top_k") = 100);

    // --- corpus ---------------------------------------------------------------
    m.def(
        "map_resolution",
        [](const std::string& tag) -> py::object {
            auto label = corpus::map_resolution(tag);
            if (!label) return py::none();
            return py::str(corpus::success_label_name(*label));
        },
        py::arg("resolution_tag"));

    // --- runner ----------------------------------------------------------------
    m.def("default_time_grid", &runner::default_time_grid);
    m.def("default_config_text", &runner::default_config_text);
    m.def(
        "grid_size",
        [](const std::string& config_text) {
            return runner::build_grid(runner::parse_config_text(config_text)).size();
        },
        py::arg("config_text"));
    m.def(
        "run_grid",
        [](const std::string& config_text, const std::string& corpus_path,
           const std::string& out_dir) {
            runner::RunConfig config = runner::parse_config_text(config_text);
            corpus::Corpus c = corpus::read_corpus(corpus_path);
            runner::GridOutcome outcome = runner::run_grid(config, c, out_dir);
            std::int64_t ran = 0, skipped = 0;
            for (const auto& r : outcome.results) (r.skipped() ? skipped : ran)++;
            py::dict d;
            d["experiments"] = py::int_(outcome.results.size());
            d["ran"] = py::int_(ran);
            d["skipped"] = py::int_(skipped);
            d["results_csv"] = outcome.results_csv;
            d["stats_csv"] = outcome.stats_csv;
            d["success_series_csv"] = outcome.success_series_csv;
            d["pearson_csv"] = outcome.pearson_csv;
            return d;
        },
        py::arg("config_text"), py::arg("corpus_path"), py::arg("out_dir"));
}
