#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "itsminer/errors.hpp"
#include "itsminer/learn/learn.hpp"

using nlohmann::json;

namespace itsminer::learn {

const char* classifier_kind_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::MNB: return "mnb";
        case ClassifierKind::LR: return "lr";
        case ClassifierKind::SVC: return "svc";
        case ClassifierKind::DTC: return "dtc";
        case ClassifierKind::MLPC: return "mlpc";
        case ClassifierKind::RFC: return "rfc";
        case ClassifierKind::GBC: return "gbc";
    }
    return "mnb";
}

std::optional<ClassifierKind> parse_classifier_kind(const std::string& name) {
    std::string n;
    for (unsigned char c : name) n += static_cast<char>(std::tolower(c));
    if (n == "mnb") return ClassifierKind::MNB;
    if (n == "lr") return ClassifierKind::LR;
    if (n == "svc") return ClassifierKind::SVC;
    if (n == "dtc") return ClassifierKind::DTC;
    if (n == "mlpc") return ClassifierKind::MLPC;
    if (n == "rfc") return ClassifierKind::RFC;
    if (n == "gbc") return ClassifierKind::GBC;
    return std::nullopt;
}

namespace detail {

double dot_sparse(const SparseVector& a, const SparseVector& b) {
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() && j < b.entries.size()) {
        if (a.entries[i].first == b.entries[j].first) {
            sum += a.entries[i].second * b.entries[j].second;
            ++i;
            ++j;
        } else if (a.entries[i].first < b.entries[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    return sum;
}

double value_at(const SparseVector& x, std::int32_t feature) {
    auto it = std::lower_bound(x.entries.begin(), x.entries.end(), feature,
                               [](const auto& e, std::int32_t f) { return e.first < f; });
    if (it != x.entries.end() && it->first == feature) return it->second;
    return 0.0;
}

}  // namespace detail

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

std::vector<int> to_binary_labels(const std::vector<SuccessLabel>& y) {
    std::vector<int> y01;
    y01.reserve(y.size());
    for (SuccessLabel l : y) y01.push_back(l == SuccessLabel::Successful ? 1 : 0);
    return y01;
}

double mlp_forward(const MlpModel& m, const SparseVector& x);

double score_impl(const TrainedModel& model, const SparseVector& x) {
    switch (model.kind) {
        case ClassifierKind::MNB: {
            const auto& nb = model.as<NaiveBayesModel>();
            double joint[2];
            for (int c = 0; c < 2; ++c) {
                double s = nb.log_prior[c];
                for (const auto& [idx, w] : x.entries)
                    s += w * nb.feature_log_prob[c][static_cast<std::size_t>(idx)];
                joint[c] = s;
            }
            double m = std::max(joint[0], joint[1]);
            double e0 = std::exp(joint[0] - m), e1 = std::exp(joint[1] - m);
            return e1 / (e0 + e1);
        }
        case ClassifierKind::LR: {
            const auto& lm = model.as<LinearModel>();
            double z = lm.bias;
            for (const auto& [idx, w] : x.entries) z += w * lm.weights[static_cast<std::size_t>(idx)];
            return sigmoid(z);
        }
        case ClassifierKind::SVC: {
            const auto& svm = model.as<SvmModel>();
            double f = svm.decision_value(x);
            return sigmoid(-(svm.platt_a * f + svm.platt_b));
        }
        case ClassifierKind::DTC:
            return model.as<TreeModel>().leaf_value(x);
        case ClassifierKind::MLPC:
            return mlp_forward(model.as<MlpModel>(), x);
        case ClassifierKind::RFC: {
            const auto& forest = model.as<ForestModel>();
            std::int64_t votes = 0;
            for (const TreeModel& t : forest.trees)
                if (t.leaf_value(x) > 0.5) ++votes;
            return static_cast<double>(votes) / static_cast<double>(forest.trees.size());
        }
        case ClassifierKind::GBC: {
            const auto& boost = model.as<BoostModel>();
            double f = boost.f0;
            for (const TreeModel& t : boost.trees) f += boost.learning_rate * t.leaf_value(x);
            return sigmoid(f);
        }
    }
    return 0.0;
}

double mlp_forward(const MlpModel& m, const SparseVector& x) {
    std::vector<double> act;
    // first layer consumes the sparse input directly
    {
        int out = m.layer_sizes[1];
        int in = m.layer_sizes[0];
        act.assign(static_cast<std::size_t>(out), 0.0);
        const auto& w = m.weights[0];
        for (int o = 0; o < out; ++o) {
            double z = m.biases[0][static_cast<std::size_t>(o)];
            const double* row = &w[static_cast<std::size_t>(o) * in];
            for (const auto& [idx, v] : x.entries) z += row[idx] * v;
            act[static_cast<std::size_t>(o)] = (m.layer_sizes.size() > 2) ? std::max(0.0, z) : z;
        }
    }
    for (std::size_t l = 1; l + 1 < m.layer_sizes.size(); ++l) {
        int out = m.layer_sizes[l + 1];
        int in = m.layer_sizes[l];
        std::vector<double> next(static_cast<std::size_t>(out), 0.0);
        bool last = (l + 2 == m.layer_sizes.size());
        for (int o = 0; o < out; ++o) {
            double z = m.biases[l][static_cast<std::size_t>(o)];
            const double* row = &m.weights[l][static_cast<std::size_t>(o) * in];
            for (int i = 0; i < in; ++i) z += row[i] * act[static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(o)] = last ? z : std::max(0.0, z);
        }
        act = std::move(next);
    }
    return sigmoid(act[0]);
}

}  // namespace

double TreeModel::leaf_value(const SparseVector& x) const {
    std::int32_t node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(node)];
        node = (detail::value_at(x, n.feature) <= n.threshold) ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

double SvmModel::decision_value(const SparseVector& x) const {
    double f = bias;
    if (kernel == SvmKernel::Linear) {
        for (std::size_t i = 0; i < support_vectors.size(); ++i)
            f += dual_coef[i] * detail::dot_sparse(support_vectors[i], x);
    } else {
        double xx = detail::dot_sparse(x, x);
        for (std::size_t i = 0; i < support_vectors.size(); ++i) {
            const SparseVector& sv = support_vectors[i];
            double svsv = detail::dot_sparse(sv, sv);
            double k = std::exp(-gamma * (xx + svsv - 2.0 * detail::dot_sparse(sv, x)));
            f += dual_coef[i] * k;
        }
    }
    return f;
}

TrainedModel fit(ClassifierKind kind, const std::vector<SparseVector>& X,
                 const std::vector<SuccessLabel>& y, const HyperParams& params) {
    if (X.size() != y.size())
        throw DimensionMismatch("fit: " + std::to_string(X.size()) + " vectors vs " +
                                std::to_string(y.size()) + " labels");
    if (X.size() < 2) throw SingleClassError("fit needs at least two samples");
    std::int32_t dim = X.empty() ? 0 : X.front().dim;
    for (const SparseVector& v : X)
        if (v.dim != dim) throw DimensionMismatch("fit: mixed vector dimensionalities");

    std::vector<int> y01 = to_binary_labels(y);
    bool has0 = false, has1 = false;
    for (int v : y01) (v ? has1 : has0) = true;
    if (!has0 || !has1) throw SingleClassError("fit: training labels cover a single class");

    TrainedModel model;
    model.kind = kind;
    model.vocab_dim = dim;
    model.params = params;
    model.seed = params.seed;
    model.n_train = static_cast<std::int64_t>(X.size());

    detail::Problem p{X, y01, dim};
    switch (kind) {
        case ClassifierKind::MNB: model.payload = detail::fit_naive_bayes(p, params); break;
        case ClassifierKind::LR: {
            bool converged = true;
            model.payload = detail::fit_logistic_regression(p, params, converged);
            model.converged = converged;
            break;
        }
        case ClassifierKind::SVC: model.payload = detail::fit_svm(p, params); break;
        case ClassifierKind::DTC: model.payload = detail::fit_decision_tree(p, params); break;
        case ClassifierKind::MLPC: {
            bool converged = true;
            model.payload = detail::fit_mlp(p, params, converged);
            model.converged = converged;
            break;
        }
        case ClassifierKind::RFC: model.payload = detail::fit_forest(p, params); break;
        case ClassifierKind::GBC: model.payload = detail::fit_boosting(p, params); break;
    }
    return model;
}

double predict_score(const TrainedModel& model, const SparseVector& x) {
    if (x.dim != model.vocab_dim)
        throw DimensionMismatch("predict: vector of dim " + std::to_string(x.dim) +
                                " against model of dim " + std::to_string(model.vocab_dim));
    return score_impl(model, x);
}

SuccessLabel predict(const TrainedModel& model, const SparseVector& x) {
    return predict_score(model, x) > 0.5 ? SuccessLabel::Successful : SuccessLabel::Unsuccessful;
}

std::optional<std::vector<double>> coefficient_scores(const TrainedModel& model,
                                                      SuccessLabel target_class) {
    bool positive = target_class == SuccessLabel::Successful;
    if (model.kind == ClassifierKind::MNB) {
        const auto& nb = model.as<NaiveBayesModel>();
        std::vector<double> scores(static_cast<std::size_t>(model.vocab_dim));
        for (std::size_t f = 0; f < scores.size(); ++f) {
            double ratio = nb.feature_log_prob[1][f] - nb.feature_log_prob[0][f];
            scores[f] = positive ? ratio : -ratio;
        }
        return scores;
    }
    if (model.kind == ClassifierKind::LR) {
        const auto& lm = model.as<LinearModel>();
        std::vector<double> scores(lm.weights.size());
        for (std::size_t f = 0; f < scores.size(); ++f)
            scores[f] = positive ? lm.weights[f] : -lm.weights[f];
        return scores;
    }
    return std::nullopt;
}

// --- persistence ---------------------------------------------------------------

namespace {

json sparse_to_json(const SparseVector& v) {
    json idx = json::array(), val = json::array();
    for (const auto& [i, w] : v.entries) {
        idx.push_back(i);
        val.push_back(w);
    }
    return json{{"dim", v.dim}, {"idx", std::move(idx)}, {"val", std::move(val)}};
}

SparseVector sparse_from_json(const json& j) {
    SparseVector v;
    v.dim = j.at("dim").get<std::int32_t>();
    const auto& idx = j.at("idx");
    const auto& val = j.at("val");
    v.entries.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        v.entries.emplace_back(idx[i].get<std::int32_t>(), val[i].get<double>());
    return v;
}

json tree_to_json(const TreeModel& t) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes)
        nodes.push_back(json{{"f", n.feature},
                             {"t", n.threshold},
                             {"l", n.left},
                             {"r", n.right},
                             {"v", n.value},
                             {"n", n.n_samples}});
    return json{{"nodes", std::move(nodes)}};
}

TreeModel tree_from_json(const json& j) {
    TreeModel t;
    for (const auto& n : j.at("nodes"))
        t.nodes.push_back(TreeNode{n.at("f").get<std::int32_t>(), n.at("t").get<double>(),
                                   n.at("l").get<std::int32_t>(), n.at("r").get<std::int32_t>(),
                                   n.at("v").get<double>(), n.at("n").get<std::int64_t>()});
    return t;
}

json params_to_json(const HyperParams& p) {
    return json{{"mnb_alpha", p.mnb_alpha},
                {"lr_c", p.lr_c},
                {"lr_tol", p.lr_tol},
                {"lr_max_iter", p.lr_max_iter},
                {"svc_c", p.svc_c},
                {"svc_kernel", p.svc_kernel == SvmKernel::Rbf ? "rbf" : "linear"},
                {"svc_gamma", p.svc_gamma},
                {"svc_tol", p.svc_tol},
                {"tree_max_depth", p.tree_max_depth},
                {"tree_min_samples_split", p.tree_min_samples_split},
                {"tree_min_samples_leaf", p.tree_min_samples_leaf},
                {"mlp_hidden", p.mlp_hidden},
                {"mlp_l2", p.mlp_l2},
                {"mlp_tol", p.mlp_tol},
                {"mlp_max_iter", p.mlp_max_iter},
                {"rfc_trees", p.rfc_trees},
                {"gbc_learning_rate", p.gbc_learning_rate},
                {"gbc_stages", p.gbc_stages},
                {"gbc_max_depth", p.gbc_max_depth},
                {"seed", p.seed}};
}

HyperParams params_from_json(const json& j) {
    HyperParams p;
    p.mnb_alpha = j.value("mnb_alpha", p.mnb_alpha);
    p.lr_c = j.value("lr_c", p.lr_c);
    p.lr_tol = j.value("lr_tol", p.lr_tol);
    p.lr_max_iter = j.value("lr_max_iter", p.lr_max_iter);
    p.svc_c = j.value("svc_c", p.svc_c);
    p.svc_kernel = j.value("svc_kernel", "rbf") == std::string("linear") ? SvmKernel::Linear
                                                                         : SvmKernel::Rbf;
    p.svc_gamma = j.value("svc_gamma", p.svc_gamma);
    p.svc_tol = j.value("svc_tol", p.svc_tol);
    p.tree_max_depth = j.value("tree_max_depth", p.tree_max_depth);
    p.tree_min_samples_split = j.value("tree_min_samples_split", p.tree_min_samples_split);
    p.tree_min_samples_leaf = j.value("tree_min_samples_leaf", p.tree_min_samples_leaf);
    p.mlp_hidden = j.value("mlp_hidden", p.mlp_hidden);
    p.mlp_l2 = j.value("mlp_l2", p.mlp_l2);
    p.mlp_tol = j.value("mlp_tol", p.mlp_tol);
    p.mlp_max_iter = j.value("mlp_max_iter", p.mlp_max_iter);
    p.rfc_trees = j.value("rfc_trees", p.rfc_trees);
    p.gbc_learning_rate = j.value("gbc_learning_rate", p.gbc_learning_rate);
    p.gbc_stages = j.value("gbc_stages", p.gbc_stages);
    p.gbc_max_depth = j.value("gbc_max_depth", p.gbc_max_depth);
    p.seed = j.value("seed", p.seed);
    return p;
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
    json j{{"format", "itsminer-model"},
           {"version", 1},
           {"kind", classifier_kind_name(model.kind)},
           {"vocab_dim", model.vocab_dim},
           {"seed", model.seed},
           {"n_train", model.n_train},
           {"converged", model.converged},
           {"params", params_to_json(model.params)}};

    switch (model.kind) {
        case ClassifierKind::MNB: {
            const auto& nb = model.as<NaiveBayesModel>();
            j["payload"] = json{{"log_prior", {nb.log_prior[0], nb.log_prior[1]}},
                                {"log_prob_0", nb.feature_log_prob[0]},
                                {"log_prob_1", nb.feature_log_prob[1]}};
            break;
        }
        case ClassifierKind::LR: {
            const auto& lm = model.as<LinearModel>();
            j["payload"] = json{{"weights", lm.weights}, {"bias", lm.bias}};
            break;
        }
        case ClassifierKind::SVC: {
            const auto& svm = model.as<SvmModel>();
            json svs = json::array();
            for (const SparseVector& sv : svm.support_vectors) svs.push_back(sparse_to_json(sv));
            j["payload"] = json{{"kernel", svm.kernel == SvmKernel::Rbf ? "rbf" : "linear"},
                                {"gamma", svm.gamma},
                                {"support_vectors", std::move(svs)},
                                {"dual_coef", svm.dual_coef},
                                {"bias", svm.bias},
                                {"platt_a", svm.platt_a},
                                {"platt_b", svm.platt_b}};
            break;
        }
        case ClassifierKind::DTC: j["payload"] = tree_to_json(model.as<TreeModel>()); break;
        case ClassifierKind::MLPC: {
            const auto& mlp = model.as<MlpModel>();
            j["payload"] = json{{"layer_sizes", mlp.layer_sizes},
                                {"weights", mlp.weights},
                                {"biases", mlp.biases}};
            break;
        }
        case ClassifierKind::RFC: {
            json trees = json::array();
            for (const TreeModel& t : model.as<ForestModel>().trees) trees.push_back(tree_to_json(t));
            j["payload"] = json{{"trees", std::move(trees)}};
            break;
        }
        case ClassifierKind::GBC: {
            const auto& boost = model.as<BoostModel>();
            json trees = json::array();
            for (const TreeModel& t : boost.trees) trees.push_back(tree_to_json(t));
            j["payload"] = json{{"f0", boost.f0},
                                {"learning_rate", boost.learning_rate},
                                {"trees", std::move(trees)},
                                {"staged_train_loss", boost.staged_train_loss}};
            break;
        }
    }

    std::ofstream out(path);
    if (!out) throw IoError("cannot write model: " + path);
    out << j.dump() << "\n";
    if (!out) throw IoError("write failed: " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read model: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("bad model file: ") + e.what(), 1);
    }
    if (j.value("format", "") != "itsminer-model") throw SchemaError("not a model file", 1);

    TrainedModel model;
    auto kind = parse_classifier_kind(j.at("kind").get<std::string>());
    if (!kind) throw SchemaError("unknown classifier kind", 1);
    model.kind = *kind;
    model.vocab_dim = j.at("vocab_dim").get<std::int32_t>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.n_train = j.at("n_train").get<std::int64_t>();
    model.converged = j.at("converged").get<bool>();
    model.params = params_from_json(j.at("params"));

    const json& p = j.at("payload");
    switch (model.kind) {
        case ClassifierKind::MNB: {
            NaiveBayesModel nb;
            nb.log_prior[0] = p.at("log_prior")[0].get<double>();
            nb.log_prior[1] = p.at("log_prior")[1].get<double>();
            nb.feature_log_prob[0] = p.at("log_prob_0").get<std::vector<double>>();
            nb.feature_log_prob[1] = p.at("log_prob_1").get<std::vector<double>>();
            model.payload = std::move(nb);
            break;
        }
        case ClassifierKind::LR: {
            LinearModel lm;
            lm.weights = p.at("weights").get<std::vector<double>>();
            lm.bias = p.at("bias").get<double>();
            model.payload = std::move(lm);
            break;
        }
        case ClassifierKind::SVC: {
            SvmModel svm;
            svm.kernel = p.at("kernel").get<std::string>() == "linear" ? SvmKernel::Linear
                                                                       : SvmKernel::Rbf;
            svm.gamma = p.at("gamma").get<double>();
            for (const auto& sv : p.at("support_vectors"))
                svm.support_vectors.push_back(sparse_from_json(sv));
            svm.dual_coef = p.at("dual_coef").get<std::vector<double>>();
            svm.bias = p.at("bias").get<double>();
            svm.platt_a = p.at("platt_a").get<double>();
            svm.platt_b = p.at("platt_b").get<double>();
            model.payload = std::move(svm);
            break;
        }
        case ClassifierKind::DTC: model.payload = tree_from_json(p); break;
        case ClassifierKind::MLPC: {
            MlpModel mlp;
            mlp.layer_sizes = p.at("layer_sizes").get<std::vector<int>>();
            mlp.weights = p.at("weights").get<std::vector<std::vector<double>>>();
            mlp.biases = p.at("biases").get<std::vector<std::vector<double>>>();
            model.payload = std::move(mlp);
            break;
        }
        case ClassifierKind::RFC: {
            ForestModel forest;
            for (const auto& t : p.at("trees")) forest.trees.push_back(tree_from_json(t));
            model.payload = std::move(forest);
            break;
        }
        case ClassifierKind::GBC: {
            BoostModel boost;
            boost.f0 = p.at("f0").get<double>();
            boost.learning_rate = p.at("learning_rate").get<double>();
            for (const auto& t : p.at("trees")) boost.trees.push_back(tree_from_json(t));
            boost.staged_train_loss = p.at("staged_train_loss").get<std::vector<double>>();
            model.payload = std::move(boost);
            break;
        }
    }
    return model;
}

}  // namespace itsminer::learn
