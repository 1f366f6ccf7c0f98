#include "itsminer/runner/grid.hpp"

#include <fstream>
#include <sstream>

#include "itsminer/errors.hpp"
#include "itsminer/rng.hpp"

namespace itsminer::runner {

std::vector<std::int64_t> default_time_grid() {
    std::vector<std::int64_t> grid = {1, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    for (std::int64_t n = 150; n <= 3500; n += 50) grid.push_back(n);
    return grid;
}

std::string ExperimentSpec::id() const {
    std::string s = corpus::issue_type_name(issue_type);
    s += "-";
    s += learn::classifier_kind_name(classifier);
    s += "-n" + std::to_string(horizon_days);
    s += weighting == features::WeightingScheme::TF ? "-tf" : "-tfidf";
    s += family == features::FeatureFamilyKind::WordNgrams ? "-word" : "-pos";
    if (balanced_test) s += "-bal";
    return s;
}

RunConfig::RunConfig() {
    issue_types = {corpus::IssueType::Bug, corpus::IssueType::Improvement,
                   corpus::IssueType::NewFeature};
    classifiers = {learn::ClassifierKind::MNB, learn::ClassifierKind::LR,
                   learn::ClassifierKind::SVC, learn::ClassifierKind::DTC,
                   learn::ClassifierKind::MLPC, learn::ClassifierKind::RFC,
                   learn::ClassifierKind::GBC};
    horizons = default_time_grid();
    weightings = {features::WeightingScheme::TF, features::WeightingScheme::TFIDF};
    families = {features::FeatureFamilyKind::WordNgrams, features::FeatureFamilyKind::PosNgrams};
}

std::vector<ExperimentSpec> build_grid(const RunConfig& config) {
    if (config.issue_types.empty()) throw ConfigError("grid has no issue types");
    if (config.classifiers.empty()) throw ConfigError("grid has no classifiers");
    if (config.horizons.empty()) throw ConfigError("grid has no horizons");
    if (config.weightings.empty()) throw ConfigError("grid has no weighting schemes");
    if (config.families.empty()) throw ConfigError("grid has no feature families");

    std::vector<ExperimentSpec> specs;
    specs.reserve(config.issue_types.size() * config.classifiers.size() * config.horizons.size() *
                  config.weightings.size() * config.families.size());
    for (corpus::IssueType type : config.issue_types) {
        for (learn::ClassifierKind classifier : config.classifiers) {
            for (std::int64_t horizon : config.horizons) {
                for (features::WeightingScheme weighting : config.weightings) {
                    for (features::FeatureFamilyKind family : config.families) {
                        ExperimentSpec spec;
                        spec.issue_type = type;
                        spec.classifier = classifier;
                        spec.horizon_days = horizon;
                        spec.weighting = weighting;
                        spec.family = family;
                        spec.balanced_test = config.balanced_test;
                        // per-spec seed from the global seed and the spec id,
                        // so any grid subset reproduces the full grid's runs
                        spec.seed = hash_fnv1a(spec.id(), mix_seed(config.seed, 0x5eed));
                        specs.push_back(spec);
                    }
                }
            }
        }
    }
    return specs;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream stream(s);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("key '" + key + "' wants a boolean, got '" + value + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + " is not key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        std::string qualified = section.empty() ? key : section + "." + key;

        try {
            if (qualified == "grid.issue_types") {
                config.issue_types.clear();
                for (const std::string& name : split_csv_list(value)) {
                    auto type = corpus::parse_issue_type(name);
                    if (!type) throw ConfigError("unknown issue type '" + name + "'");
                    config.issue_types.push_back(*type);
                }
            } else if (qualified == "grid.classifiers") {
                config.classifiers.clear();
                for (const std::string& name : split_csv_list(value)) {
                    auto kind = learn::parse_classifier_kind(name);
                    if (!kind) throw ConfigError("unknown classifier '" + name + "'");
                    config.classifiers.push_back(*kind);
                }
            } else if (qualified == "grid.horizons") {
                if (value == "default") {
                    config.horizons = default_time_grid();
                } else {
                    config.horizons.clear();
                    for (const std::string& n : split_csv_list(value))
                        config.horizons.push_back(std::stoll(n));
                }
            } else if (qualified == "grid.weightings") {
                config.weightings.clear();
                for (const std::string& name : split_csv_list(value)) {
                    if (name == "tf") config.weightings.push_back(features::WeightingScheme::TF);
                    else if (name == "tfidf")
                        config.weightings.push_back(features::WeightingScheme::TFIDF);
                    else throw ConfigError("unknown weighting '" + name + "'");
                }
            } else if (qualified == "grid.families") {
                config.families.clear();
                for (const std::string& name : split_csv_list(value)) {
                    if (name == "word")
                        config.families.push_back(features::FeatureFamilyKind::WordNgrams);
                    else if (name == "pos")
                        config.families.push_back(features::FeatureFamilyKind::PosNgrams);
                    else throw ConfigError("unknown feature family '" + name + "'");
                }
            } else if (qualified == "grid.balanced_test") {
                config.balanced_test = parse_bool(value, qualified);
            } else if (qualified == "features.min_df") {
                config.min_df = std::stoi(value);
            } else if (qualified == "features.max_features") {
                config.max_features = std::stoi(value);
            } else if (qualified == "features.word_n_min") {
                config.word_n_min = std::stoi(value);
            } else if (qualified == "features.word_n_max") {
                config.word_n_max = std::stoi(value);
            } else if (qualified == "features.pos_n_min") {
                config.pos_n_min = std::stoi(value);
            } else if (qualified == "features.pos_n_max") {
                config.pos_n_max = std::stoi(value);
            } else if (qualified == "split.train_fraction") {
                config.train_fraction = std::stod(value);
            } else if (qualified == "run.seed") {
                config.seed = std::stoull(value);
            } else if (qualified == "run.workers") {
                config.workers = std::stoi(value);
            } else if (qualified == "run.rankings") {
                config.rankings = parse_bool(value, qualified);
            } else if (qualified == "run.rank_dump_limit") {
                config.rank_dump_limit = std::stoi(value);
            } else if (qualified == "run.importance") {
                if (value != "weights" && value != "model")
                    throw ConfigError("run.importance must be 'weights' or 'model'");
                config.importance = value;
            } else if (qualified == "learn.mnb_alpha") {
                config.hyper.mnb_alpha = std::stod(value);
            } else if (qualified == "learn.lr_c") {
                config.hyper.lr_c = std::stod(value);
            } else if (qualified == "learn.lr_max_iter") {
                config.hyper.lr_max_iter = std::stoi(value);
            } else if (qualified == "learn.svc_c") {
                config.hyper.svc_c = std::stod(value);
            } else if (qualified == "learn.svc_kernel") {
                if (value == "linear") config.hyper.svc_kernel = learn::SvmKernel::Linear;
                else if (value == "rbf") config.hyper.svc_kernel = learn::SvmKernel::Rbf;
                else throw ConfigError("learn.svc_kernel must be 'linear' or 'rbf'");
            } else if (qualified == "learn.svc_gamma") {
                config.hyper.svc_gamma = std::stod(value);
            } else if (qualified == "learn.mlp_max_iter") {
                config.hyper.mlp_max_iter = std::stoi(value);
            } else if (qualified == "learn.rfc_trees") {
                config.hyper.rfc_trees = std::stoi(value);
            } else if (qualified == "learn.gbc_stages") {
                config.hyper.gbc_stages = std::stoi(value);
            } else if (qualified == "learn.gbc_learning_rate") {
                config.hyper.gbc_learning_rate = std::stod(value);
            } else {
                throw ConfigError("unknown config key '" + qualified + "'");
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError("bad value for '" + qualified + "': " + value);
        } catch (const std::out_of_range&) {
            throw ConfigError("value out of range for '" + qualified + "': " + value);
        }
    }

    if (config.train_fraction <= 0.0 || config.train_fraction >= 1.0)
        throw ConfigError("split.train_fraction must be in (0, 1)");
    if (config.workers < 1) throw ConfigError("run.workers must be >= 1");
    return config;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string default_config_text() {
    return R"(# experiment grid configuration (defaults shown)

[grid]
# issue types to study: bug, improvement, new_feature
issue_types = bug, improvement, new_feature
# classifiers: mnb, lr, svc, dtc, mlpc, rfc, gbc
classifiers = mnb, lr, svc, dtc, mlpc, rfc, gbc
# day horizons: 'default' is the 80-value grid 1,5,10,20..100,150..3500
horizons = default
# weighting schemes: tf, tfidf
weightings = tf, tfidf
# feature families: word (1..10-grams), pos (2..5-grams)
families = word, pos
# balance the test split too (accuracy runs); false keeps it realistic
balanced_test = false

[features]
# drop features seen in fewer than min_df training documents
min_df = 2
# keep at most this many features by document frequency (0 = unlimited)
max_features = 100000
word_n_min = 1
word_n_max = 10
pos_n_min = 2
pos_n_max = 5

[split]
# fraction of documents in the training set
train_fraction = 0.75

[run]
# global seed; every experiment derives its own seed from it
seed = 42
# parallel experiment workers
workers = 2
# dump per-experiment feature importance orders for the rank command
rankings = false
# cap per-experiment ranking dumps at this many features (0 = full order;
# a cap approximates AR for features beyond it)
rank_dump_limit = 0
# importance source: 'weights' (vectorization mass) or 'model' (coefficients
# where the classifier has them, weights otherwise)
importance = weights

[learn]
mnb_alpha = 1.0
lr_c = 1.0
lr_max_iter = 100
svc_c = 1.0
svc_kernel = rbf
# 0 means 1 / (dim * feature variance)
svc_gamma = 0
mlp_max_iter = 200
rfc_trees = 100
gbc_stages = 100
gbc_learning_rate = 0.1
)";
}

}  // namespace itsminer::runner
