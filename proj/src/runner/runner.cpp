#include "itsminer/runner/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "itsminer/errors.hpp"
#include "itsminer/eval/ranking.hpp"
#include "itsminer/rng.hpp"
#include "itsminer/textprep/textprep.hpp"

namespace fs = std::filesystem;

namespace itsminer::runner {

namespace {

features::FeatureCounts featurize(const std::string& text, features::FeatureFamilyKind family,
                                  const RunConfig& config) {
    std::vector<textprep::Token> tokens = textprep::tokenize(text);
    std::vector<std::string> units;
    units.reserve(tokens.size());
    if (family == features::FeatureFamilyKind::WordNgrams) {
        for (textprep::Token& t : tokens) units.push_back(std::move(t.surface));
        return features::extract_ngrams(units, config.word_n_min, config.word_n_max);
    }
    for (textprep::PosTag tag : textprep::PosTagger::bundled().tag(tokens))
        units.emplace_back(textprep::pos_tag_name(tag));
    return features::extract_ngrams(units, config.pos_n_min, config.pos_n_max);
}

features::FeatureFamily family_config(features::FeatureFamilyKind kind, const RunConfig& config) {
    if (kind == features::FeatureFamilyKind::WordNgrams)
        return features::FeatureFamily::word_ngrams(config.word_n_min, config.word_n_max);
    return features::FeatureFamily::pos_ngrams(config.pos_n_min, config.pos_n_max);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string metric_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : "";  // Undefined stays an empty cell
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const corpus::Corpus& corpus,
                                const RunConfig& config) {
    ExperimentResult result;
    result.spec = spec;
    auto started = std::chrono::steady_clock::now();

    try {
        std::vector<Document> window = select_window(corpus, spec.issue_type, spec.horizon_days);
        auto [train, test] = split_train_test(window, config.train_fraction, mix_seed(spec.seed, 1));
        train = undersample(train, mix_seed(spec.seed, 2));
        if (spec.balanced_test) test = balance_test(test, mix_seed(spec.seed, 3));

        // vocabulary fitted on training documents only
        std::vector<features::FeatureCounts> train_counts;
        train_counts.reserve(train.size());
        for (const Document& doc : train)
            train_counts.push_back(featurize(doc.text, spec.family, config));
        std::optional<int> max_features;
        if (config.max_features > 0) max_features = config.max_features;
        features::Vocabulary vocab =
            features::Vocabulary::fit(train_counts, family_config(spec.family, config),
                                      config.min_df, max_features);

        std::vector<features::SparseVector> x_train;
        std::vector<learn::SuccessLabel> y_train;
        x_train.reserve(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) {
            x_train.push_back(features::vectorize(train_counts[i], vocab, spec.weighting));
            y_train.push_back(train[i].label);
        }

        learn::HyperParams hyper = config.hyper;
        hyper.seed = mix_seed(spec.seed, 4);
        learn::TrainedModel model = learn::fit(spec.classifier, x_train, y_train, hyper);

        std::vector<learn::SuccessLabel> y_test, predicted;
        y_test.reserve(test.size());
        predicted.reserve(test.size());
        for (const Document& doc : test) {
            features::SparseVector x =
                features::vectorize(featurize(doc.text, spec.family, config), vocab, spec.weighting);
            predicted.push_back(learn::predict(model, x));
            y_test.push_back(doc.label);
        }

        result.metrics = eval::metrics(eval::confusion(y_test, predicted));
        result.n_train = static_cast<std::int64_t>(train.size());
        result.n_test = static_cast<std::int64_t>(test.size());
        for (const Document& d : train)
            (d.label == corpus::SuccessLabel::Successful ? result.train_successful
                                                         : result.train_unsuccessful)++;
        for (const Document& d : test)
            (d.label == corpus::SuccessLabel::Successful ? result.test_successful
                                                         : result.test_unsuccessful)++;
        result.vocab_size = vocab.size();

        if (config.rankings) {
            auto order_for = [&](corpus::SuccessLabel target) {
                if (config.importance == "model") {
                    if (auto scores = learn::coefficient_scores(model, target))
                        return eval::importance_from_scores(vocab, *scores);
                }
                std::vector<features::SparseVector> class_vectors;
                for (std::size_t i = 0; i < train.size(); ++i)
                    if (train[i].label == target) class_vectors.push_back(x_train[i]);
                return eval::importance_from_weights(vocab, class_vectors);
            };
            result.ranking_successful = order_for(corpus::SuccessLabel::Successful);
            result.ranking_unsuccessful = order_for(corpus::SuccessLabel::Unsuccessful);
            if (config.rank_dump_limit > 0) {
                auto cap = static_cast<std::size_t>(config.rank_dump_limit);
                if (result.ranking_successful->size() > cap) result.ranking_successful->resize(cap);
                if (result.ranking_unsuccessful->size() > cap)
                    result.ranking_unsuccessful->resize(cap);
            }
        }
    } catch (const EmptyWindow& e) {
        result.skip_reason = std::string("EmptyWindow: ") + e.what();
    } catch (const TooFewDocuments& e) {
        result.skip_reason = std::string("TooFewDocuments: ") + e.what();
    } catch (const SingleClassError& e) {
        result.skip_reason = std::string("SingleClassError: ") + e.what();
    } catch (const EmptyVocabulary& e) {
        result.skip_reason = std::string("EmptyVocabulary: ") + e.what();
    }

    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

namespace {

const char* kResultsHeader =
    "experiment_id,issue_type,classifier,horizon_days,weighting,family,balanced_test,seed,"
    "n_train,n_test,train_successful,train_unsuccessful,test_successful,test_unsuccessful,"
    "vocab_size,accuracy,precision_successful,precision_unsuccessful,recall_successful,"
    "recall_unsuccessful,f1_successful,f1_unsuccessful,skip_reason";

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string result_row(const ExperimentResult& r) {
    std::ostringstream out;
    const ExperimentSpec& s = r.spec;
    out << s.id() << "," << corpus::issue_type_name(s.issue_type) << ","
        << learn::classifier_kind_name(s.classifier) << "," << s.horizon_days << ","
        << (s.weighting == features::WeightingScheme::TF ? "tf" : "tfidf") << ","
        << (s.family == features::FeatureFamilyKind::WordNgrams ? "word" : "pos") << ","
        << (s.balanced_test ? "true" : "false") << "," << s.seed << "," << r.n_train << ","
        << r.n_test << "," << r.train_successful << "," << r.train_unsuccessful << ","
        << r.test_successful << "," << r.test_unsuccessful << "," << r.vocab_size << ","
        << metric_cell(r.metrics.accuracy) << "," << metric_cell(r.metrics.precision_successful)
        << "," << metric_cell(r.metrics.precision_unsuccessful) << ","
        << metric_cell(r.metrics.recall_successful) << ","
        << metric_cell(r.metrics.recall_unsuccessful) << "," << metric_cell(r.metrics.f1_successful)
        << "," << metric_cell(r.metrics.f1_unsuccessful) << "," << csv_escape(r.skip_reason);
    return out.str();
}

void write_success_series(const RunConfig& config, const corpus::Corpus& corpus,
                          const std::string& series_path, const std::string& pearson_path) {
    // distinct projects in stored order
    std::vector<std::string> projects;
    for (const corpus::IssueRecord& issue : corpus.issues)
        if (std::find(projects.begin(), projects.end(), issue.project_key) == projects.end())
            projects.push_back(issue.project_key);

    std::vector<std::int64_t> horizons = config.horizons;
    std::sort(horizons.begin(), horizons.end());
    horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());

    std::ofstream series(series_path);
    if (!series) throw IoError("cannot write " + series_path);
    series << "project_key,horizon_days,n_qualifying,pct_successful\n";

    std::ofstream pearson_out(pearson_path);
    if (!pearson_out) throw IoError("cannot write " + pearson_path);
    pearson_out << "project_key,n_points,pearson\n";

    for (const std::string& project : projects) {
        std::vector<double> xs, ys;
        for (std::int64_t horizon : horizons) {
            std::int64_t qualifying = 0, successful = 0;
            for (const corpus::IssueRecord& issue : corpus.issues) {
                if (issue.project_key != project) continue;
                if (corpus::resolution_days(issue) <= horizon) continue;
                ++qualifying;
                if (issue.label == corpus::SuccessLabel::Successful) ++successful;
            }
            if (qualifying == 0) continue;
            double pct =
                100.0 * static_cast<double>(successful) / static_cast<double>(qualifying);
            series << csv_escape(project) << "," << horizon << "," << qualifying << ","
                   << format_double(pct) << "\n";
            xs.push_back(static_cast<double>(horizon));
            ys.push_back(pct);
        }
        std::string cell;
        if (xs.size() >= 2) {
            try {
                cell = format_double(eval::pearson(xs, ys));
            } catch (const DegenerateSeries&) {
                cell = "";
            }
        }
        pearson_out << csv_escape(project) << "," << xs.size() << "," << cell << "\n";
    }
}

void dump_ranking(const fs::path& dir, std::ofstream& manifest, const ExperimentResult& r,
                  corpus::SuccessLabel target, const std::vector<std::string>& order) {
    std::string name = r.spec.id() + "." + corpus::success_label_name(target) + ".txt";
    std::ofstream out(dir / name);
    if (!out) throw IoError("cannot write ranking " + (dir / name).string());
    for (const std::string& feature : order) out << feature << "\n";
    manifest << r.spec.id() << "," << corpus::success_label_name(target) << ","
             << corpus::issue_type_name(r.spec.issue_type) << "," << r.vocab_size << "," << name
             << "\n";
}

ResultRow to_row(const ExperimentResult& r) {
    ResultRow row;
    row.spec = r.spec;
    row.experiment_id = r.spec.id();
    row.metrics = r.metrics;
    row.n_train = r.n_train;
    row.n_test = r.n_test;
    row.skip_reason = r.skip_reason;
    return row;
}

}  // namespace

GridOutcome run_grid(const RunConfig& config, const corpus::Corpus& corpus,
                     const std::string& out_dir) {
    std::vector<ExperimentSpec> specs = build_grid(config);
    fs::create_directories(out_dir);

    GridOutcome outcome;
    outcome.results.resize(specs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= specs.size()) break;
            try {
                outcome.results[i] = run_experiment(specs[i], corpus, config);
            } catch (const Error& e) {
                outcome.results[i].spec = specs[i];
                outcome.results[i].skip_reason = std::string("error: ") + e.what();
            }
        }
    };
    int n_workers = std::max(1, std::min<int>(config.workers, static_cast<int>(specs.size())));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();

    // results: one row per spec, in spec order
    outcome.results_csv = (fs::path(out_dir) / "results.csv").string();
    {
        std::ofstream out(outcome.results_csv);
        if (!out) throw IoError("cannot write " + outcome.results_csv);
        out << kResultsHeader << "\n";
        for (const ExperimentResult& r : outcome.results) out << result_row(r) << "\n";
    }

    // Appendix-C-shaped descriptive statistics
    outcome.stats_csv = (fs::path(out_dir) / "stats.csv").string();
    {
        std::vector<ResultRow> rows;
        rows.reserve(outcome.results.size());
        for (const ExperimentResult& r : outcome.results) rows.push_back(to_row(r));
        write_stats_report(outcome.stats_csv, rows, "csv");
    }

    // success-percentage-vs-horizon series and its per-project correlation
    outcome.success_series_csv = (fs::path(out_dir) / "success_vs_time.csv").string();
    outcome.pearson_csv = (fs::path(out_dir) / "pearson_by_project.csv").string();
    write_success_series(config, corpus, outcome.success_series_csv, outcome.pearson_csv);

    if (config.rankings) {
        fs::path rank_dir = fs::path(out_dir) / "rankings";
        fs::create_directories(rank_dir);
        outcome.rankings_dir = rank_dir.string();
        std::ofstream manifest(rank_dir / "manifest.csv");
        if (!manifest) throw IoError("cannot write rankings manifest");
        manifest << "experiment_id,class,issue_type,vocab_size,file\n";
        for (const ExperimentResult& r : outcome.results) {
            if (r.skipped()) continue;
            if (r.ranking_successful)
                dump_ranking(rank_dir, manifest, r, corpus::SuccessLabel::Successful,
                             *r.ranking_successful);
            if (r.ranking_unsuccessful)
                dump_ranking(rank_dir, manifest, r, corpus::SuccessLabel::Unsuccessful,
                             *r.ranking_unsuccessful);
        }
    }
    return outcome;
}

// --- results.csv reader ---------------------------------------------------------

namespace {

std::vector<std::string> parse_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::optional<double> parse_metric_cell(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::stod(s);
}

}  // namespace

std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read results: " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty results file", 1);
    if (line != kResultsHeader) throw SchemaError("unexpected results header", 1);

    std::vector<ResultRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f = parse_csv_line(line);
        if (f.size() != 23) throw SchemaError("wrong column count", line_no);
        ResultRow row;
        row.experiment_id = f[0];
        auto type = corpus::parse_issue_type(f[1]);
        auto kind = learn::parse_classifier_kind(f[2]);
        if (!type || !kind) throw SchemaError("bad issue_type or classifier", line_no);
        row.spec.issue_type = *type;
        row.spec.classifier = *kind;
        row.spec.horizon_days = std::stoll(f[3]);
        row.spec.weighting =
            f[4] == "tf" ? features::WeightingScheme::TF : features::WeightingScheme::TFIDF;
        row.spec.family = f[5] == "word" ? features::FeatureFamilyKind::WordNgrams
                                         : features::FeatureFamilyKind::PosNgrams;
        row.spec.balanced_test = f[6] == "true";
        row.spec.seed = std::stoull(f[7]);
        row.n_train = std::stoll(f[8]);
        row.n_test = std::stoll(f[9]);
        row.metrics.accuracy = parse_metric_cell(f[15]);
        row.metrics.precision_successful = parse_metric_cell(f[16]);
        row.metrics.precision_unsuccessful = parse_metric_cell(f[17]);
        row.metrics.recall_successful = parse_metric_cell(f[18]);
        row.metrics.recall_unsuccessful = parse_metric_cell(f[19]);
        row.metrics.f1_successful = parse_metric_cell(f[20]);
        row.metrics.f1_unsuccessful = parse_metric_cell(f[21]);
        row.skip_reason = f[22];
        rows.push_back(std::move(row));
    }
    return rows;
}

// --- reports ---------------------------------------------------------------------

namespace {

struct MetricSelector {
    const char* name;
    std::optional<double> eval::MetricSet::* member;
};

constexpr MetricSelector kMetricSelectors[] = {
    {"accuracy", &eval::MetricSet::accuracy},
    {"precision_successful", &eval::MetricSet::precision_successful},
    {"precision_unsuccessful", &eval::MetricSet::precision_unsuccessful},
    {"recall_successful", &eval::MetricSet::recall_successful},
    {"recall_unsuccessful", &eval::MetricSet::recall_unsuccessful},
    {"f1_successful", &eval::MetricSet::f1_successful},
    {"f1_unsuccessful", &eval::MetricSet::f1_unsuccessful},
};

}  // namespace

void write_stats_report(const std::string& path, const std::vector<ResultRow>& rows,
                        const std::string& format) {
    if (format != "csv" && format != "md") throw ConfigError("report format must be csv or md");

    // (issue_type, classifier) -> defined metric values
    std::map<std::pair<int, int>, std::map<std::string, std::vector<double>>> groups;
    for (const ResultRow& row : rows) {
        if (!row.skip_reason.empty()) continue;
        auto& metric_values =
            groups[{static_cast<int>(row.spec.issue_type), static_cast<int>(row.spec.classifier)}];
        for (const MetricSelector& sel : kMetricSelectors) {
            const std::optional<double>& v = row.metrics.*(sel.member);
            if (v) metric_values[sel.name].push_back(*v);
        }
    }

    std::ofstream out(path);
    if (!out) throw IoError("cannot write report: " + path);

    if (format == "csv") {
        out << "issue_type,classifier,metric,n,min,max,mean,variance,std_dev\n";
        for (const auto& [key, metric_values] : groups) {
            for (const MetricSelector& sel : kMetricSelectors) {
                auto it = metric_values.find(sel.name);
                out << corpus::issue_type_name(static_cast<corpus::IssueType>(key.first)) << ","
                    << learn::classifier_kind_name(static_cast<learn::ClassifierKind>(key.second))
                    << "," << sel.name << ",";
                if (it == metric_values.end() || it->second.empty()) {
                    out << "0,,,,,\n";  // the metric was never defined for this cell
                    continue;
                }
                eval::DescriptiveStats s = eval::descriptive_stats(it->second);
                out << it->second.size() << "," << format_double(s.min) << ","
                    << format_double(s.max) << "," << format_double(s.mean) << ","
                    << format_double(s.variance) << "," << format_double(s.std_dev) << "\n";
            }
        }
        return;
    }

    // markdown: one table per (issue type, metric), classifiers as columns
    for (int t = 0; t < 3; ++t) {
        bool type_has_rows = false;
        for (const auto& [key, _] : groups) type_has_rows |= key.first == t;
        if (!type_has_rows) continue;
        out << "## " << corpus::issue_type_name(static_cast<corpus::IssueType>(t)) << "\n\n";
        for (const MetricSelector& sel : kMetricSelectors) {
            out << "### " << sel.name << "\n\n|  |";
            std::vector<int> kinds;
            for (const auto& [key, _] : groups)
                if (key.first == t) kinds.push_back(key.second);
            for (int k : kinds)
                out << " " << learn::classifier_kind_name(static_cast<learn::ClassifierKind>(k))
                    << " |";
            out << "\n|--|";
            for (std::size_t i = 0; i < kinds.size(); ++i) out << "--|";
            out << "\n";
            const char* stat_names[] = {"min", "max", "mean", "variance", "std_dev"};
            for (int stat = 0; stat < 5; ++stat) {
                out << "| " << stat_names[stat] << " |";
                for (int k : kinds) {
                    const auto& metric_values = groups.at({t, k});
                    auto it = metric_values.find(sel.name);
                    if (it == metric_values.end() || it->second.empty()) {
                        out << " - |";
                        continue;
                    }
                    eval::DescriptiveStats s = eval::descriptive_stats(it->second);
                    double v[] = {s.min, s.max, s.mean, s.variance, s.std_dev};
                    out << " " << format_double(v[stat]) << " |";
                }
                out << "\n";
            }
            out << "\n";
        }
    }
}

void write_feature_rank_report(const std::string& rankings_dir, const std::string& out_path,
                               int top_k) {
    fs::path dir(rankings_dir);
    std::ifstream manifest(dir / "manifest.csv");
    if (!manifest) throw IoError("cannot read rankings manifest under " + rankings_dir);

    struct GroupKey {
        std::string issue_type;
        std::string klass;
        bool operator<(const GroupKey& o) const {
            return std::tie(issue_type, klass) < std::tie(o.issue_type, o.klass);
        }
    };
    std::map<GroupKey, std::vector<eval::ExperimentRanking>> groups;

    std::string line;
    std::getline(manifest, line);  // header
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f = parse_csv_line(line);
        if (f.size() != 5) throw SchemaError("malformed manifest row", 0);
        eval::ExperimentRanking ranking;
        ranking.experiment_id = f[0];
        std::ifstream rank_file(dir / f[4]);
        if (!rank_file) throw IoError("missing ranking file " + f[4]);
        std::string feature;
        while (std::getline(rank_file, feature))
            if (!feature.empty()) ranking.ordered_features.push_back(feature);
        groups[GroupKey{f[2], f[1]}].push_back(std::move(ranking));
    }

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write " + out_path);
    out << "feature,n,ar,class,issue_type\n";
    for (const auto& [key, rankings] : groups) {
        for (const eval::FeatureRankEntry& e : eval::rank_features(rankings, top_k))
            out << csv_escape(e.feature) << "," << e.n << "," << format_double(e.ar) << ","
                << key.klass << "," << key.issue_type << "\n";
    }
}

}  // namespace itsminer::runner
