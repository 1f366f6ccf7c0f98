#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "itsminer/corpus/records.hpp"
#include "itsminer/features/features.hpp"

namespace itsminer::learn {

using corpus::SuccessLabel;
using features::SparseVector;

enum class ClassifierKind : std::uint8_t { MNB, LR, SVC, DTC, MLPC, RFC, GBC };

const char* classifier_kind_name(ClassifierKind k);
std::optional<ClassifierKind> parse_classifier_kind(const std::string& name);

enum class SvmKernel : std::uint8_t { Linear, Rbf };

struct HyperParams {
    // multinomial naive bayes
    double mnb_alpha = 1.0;
    // logistic regression
    double lr_c = 1.0;
    double lr_tol = 1e-4;
    int lr_max_iter = 100;
    // support vector classifier
    double svc_c = 1.0;
    SvmKernel svc_kernel = SvmKernel::Rbf;
    double svc_gamma = 0.0;  // 0 = 1 / (dim * variance of feature values)
    double svc_tol = 1e-3;
    // decision trees (DTC and the forest's base trees)
    int tree_max_depth = 0;  // 0 = unlimited
    int tree_min_samples_split = 2;
    int tree_min_samples_leaf = 1;
    // multi-layer perceptron
    std::vector<int> mlp_hidden = {5, 2};
    double mlp_l2 = 1e-5;
    double mlp_tol = 1e-4;
    int mlp_max_iter = 200;
    // random forest
    int rfc_trees = 100;
    // gradient boosting
    double gbc_learning_rate = 0.1;
    int gbc_stages = 100;
    int gbc_max_depth = 3;
    // shared
    std::uint64_t seed = 1;
};

// --- learned parameter payloads ----------------------------------------------

struct NaiveBayesModel {
    // index 1 = Successful, 0 = Unsuccessful
    double log_prior[2] = {0.0, 0.0};
    std::vector<double> feature_log_prob[2];  // dense, size vocab_dim
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 = leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;  // classification: positive fraction; regression: leaf output
    std::int64_t n_samples = 0;
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    double leaf_value(const SparseVector& x) const;
};

struct SvmModel {
    SvmKernel kernel = SvmKernel::Rbf;
    double gamma = 0.0;
    std::vector<SparseVector> support_vectors;
    std::vector<double> dual_coef;  // alpha_i * y_i
    double bias = 0.0;
    // logistic link fitted on training decision values
    double platt_a = 0.0;
    double platt_b = 0.0;

    double decision_value(const SparseVector& x) const;
};

struct MlpModel {
    std::vector<int> layer_sizes;            // input, hidden..., 1
    std::vector<std::vector<double>> weights;  // weights[l]: (out x in) row-major
    std::vector<std::vector<double>> biases;
};

struct ForestModel {
    std::vector<TreeModel> trees;
};

struct BoostModel {
    double f0 = 0.0;
    double learning_rate = 0.1;
    std::vector<TreeModel> trees;           // regression trees on the logistic gradient
    std::vector<double> staged_train_loss;  // training deviance after each stage
};

class TrainedModel {
public:
    ClassifierKind kind = ClassifierKind::MNB;
    std::int32_t vocab_dim = 0;
    HyperParams params;
    std::uint64_t seed = 0;
    std::int64_t n_train = 0;
    bool converged = true;  // false when an iterative fit hit max_iter

    std::variant<NaiveBayesModel, LinearModel, SvmModel, TreeModel, MlpModel, ForestModel,
                 BoostModel>
        payload;

    template <typename T>
    const T& as() const {
        return std::get<T>(payload);
    }
};

/// Trains one classifier. Requires both classes present, at least two
/// samples, and all vectors of one dimensionality; throws SingleClassError
/// or DimensionMismatch otherwise. Deterministic under a fixed params.seed.
TrainedModel fit(ClassifierKind kind, const std::vector<SparseVector>& X,
                 const std::vector<SuccessLabel>& y, const HyperParams& params = {});

/// P(Successful | x) in [0, 1].
double predict_score(const TrainedModel& model, const SparseVector& x);

/// Successful iff predict_score > 0.5; an exact 0.5 tie goes to Unsuccessful.
SuccessLabel predict(const TrainedModel& model, const SparseVector& x);

/// JSON model dump; loading reproduces bit-identical predictions.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

// --- objective functions exposed for gradient verification --------------------

/// L2-regularized logistic objective 0.5*||w||^2 + C*sum(log(1+exp(-y*f)))
/// at packed parameters [w..., b]. Fills `grad` (same packing) when given.
double lr_objective(const std::vector<SparseVector>& X, const std::vector<int>& y01, double c,
                    const std::vector<double>& packed, std::vector<double>* grad);

/// Binary cross-entropy plus 0.5*l2*||W||^2/n for the (layer_sizes) net at
/// packed parameters (weights then biases, layer by layer).
double mlp_objective(const std::vector<SparseVector>& X, const std::vector<int>& y01,
                     const std::vector<int>& layer_sizes, double l2,
                     const std::vector<double>& packed, std::vector<double>* grad);

std::size_t mlp_parameter_count(const std::vector<int>& layer_sizes);

/// Largest KKT violation over the training set (0 = exact optimum).
double svm_kkt_violation(const TrainedModel& model, const std::vector<SparseVector>& X,
                         const std::vector<SuccessLabel>& y);

/// Feature scores for importance ranking from model coefficients, when the
/// kind has them (MNB: class log-ratio; LR: signed weight). nullopt for
/// kinds without a natural per-feature coefficient.
std::optional<std::vector<double>> coefficient_scores(const TrainedModel& model,
                                                      SuccessLabel target_class);

// --- internal fit entry points (one per translation unit) ---------------------

namespace detail {
struct Problem {
    const std::vector<SparseVector>& X;
    const std::vector<int>& y01;  // 1 = Successful
    std::int32_t dim;
};
NaiveBayesModel fit_naive_bayes(const Problem& p, const HyperParams& params);
LinearModel fit_logistic_regression(const Problem& p, const HyperParams& params, bool& converged);
SvmModel fit_svm(const Problem& p, const HyperParams& params);
TreeModel fit_decision_tree(const Problem& p, const HyperParams& params);
MlpModel fit_mlp(const Problem& p, const HyperParams& params, bool& converged);
ForestModel fit_forest(const Problem& p, const HyperParams& params);
BoostModel fit_boosting(const Problem& p, const HyperParams& params);

double dot_sparse(const SparseVector& a, const SparseVector& b);
double value_at(const SparseVector& x, std::int32_t feature);
}  // namespace detail

}  // namespace itsminer::learn
