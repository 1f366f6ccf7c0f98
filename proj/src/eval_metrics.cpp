#include "itsminer/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "itsminer/errors.hpp"

namespace itsminer::eval {

ConfusionMatrix confusion(const std::vector<corpus::SuccessLabel>& actual,
                          const std::vector<corpus::SuccessLabel>& predicted) {
    if (actual.size() != predicted.size())
        throw LengthMismatch("confusion: " + std::to_string(actual.size()) + " actual vs " +
                             std::to_string(predicted.size()) + " predicted labels");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        bool actual_pos = actual[i] == corpus::SuccessLabel::Successful;
        bool predicted_pos = predicted[i] == corpus::SuccessLabel::Successful;
        if (actual_pos && predicted_pos) ++cm.tp;
        else if (actual_pos && !predicted_pos) ++cm.fn;
        else if (!actual_pos && predicted_pos) ++cm.fp;
        else ++cm.tn;
    }
    return cm;
}

namespace {

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> f1_from(std::optional<double> precision, std::optional<double> recall) {
    if (!precision || !recall) return std::nullopt;
    double den = *precision + *recall;
    if (den == 0.0) return std::nullopt;
    return 2.0 * (*precision * *recall) / den;
}

}  // namespace

MetricSet metrics(const ConfusionMatrix& cm) {
    MetricSet m;
    m.accuracy = ratio(cm.tp + cm.tn, cm.total());
    m.precision_successful = ratio(cm.tp, cm.tp + cm.fp);
    m.precision_unsuccessful = ratio(cm.tn, cm.tn + cm.fn);
    m.recall_successful = ratio(cm.tp, cm.tp + cm.fn);
    m.recall_unsuccessful = ratio(cm.tn, cm.tn + cm.fp);
    m.f1_successful = f1_from(m.precision_successful, m.recall_successful);
    m.f1_unsuccessful = f1_from(m.precision_unsuccessful, m.recall_unsuccessful);
    return m;
}

DescriptiveStats descriptive_stats(const std::vector<double>& values) {
    if (values.empty()) throw EmptyInput("descriptive_stats on empty list");
    DescriptiveStats s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.variance = sq / static_cast<double>(values.size());
    s.std_dev = std::sqrt(s.variance);
    return s;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw LengthMismatch("pearson: series of lengths " + std::to_string(x.size()) + " and " +
                             std::to_string(y.size()));
    if (x.size() < 2) throw LengthMismatch("pearson needs at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateSeries("pearson: constant series");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace itsminer::eval
