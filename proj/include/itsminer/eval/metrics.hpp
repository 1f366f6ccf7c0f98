#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "itsminer/corpus/records.hpp"

namespace itsminer::eval {

/// Positive = Successful throughout.
struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
};

ConfusionMatrix confusion(const std::vector<corpus::SuccessLabel>& actual,
                          const std::vector<corpus::SuccessLabel>& predicted);

/// A metric is Undefined (nullopt) exactly when its denominator is zero.
/// Undefined is never silently collapsed to 0.
struct MetricSet {
    std::optional<double> accuracy;
    std::optional<double> precision_successful;
    std::optional<double> precision_unsuccessful;
    std::optional<double> recall_successful;
    std::optional<double> recall_unsuccessful;
    std::optional<double> f1_successful;
    std::optional<double> f1_unsuccessful;
};

MetricSet metrics(const ConfusionMatrix& cm);

struct DescriptiveStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double variance = 0.0;  // population variance (divide by n)
    double std_dev = 0.0;
};

DescriptiveStats descriptive_stats(const std::vector<double>& values);

/// Product-moment correlation. Throws LengthMismatch or DegenerateSeries.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace itsminer::eval
