#ifndef OSOS_METRICS_HPP
#define OSOS_METRICS_HPP

#include <cstddef>
#include <filesystem>
#include <vector>

#include "osos/matrix.hpp"

namespace osos {

enum class Task { Regression, Classification };

struct MetricsReport {
    std::vector<double> mae;  // per output column
    std::vector<double> mse;

    // classification only (argmax decode)
    std::size_t n_classes = 0;
    std::vector<std::size_t> confusion;  // n_classes x n_classes, row = truth
    std::vector<double> auc;             // one-vs-rest, per class
    double accuracy = 0.0;

    // timings, filled by whoever measured them
    double it_seconds = 0.0;
    double obt_seconds = 0.0;
    double obt_per_sample_seconds = 0.0;
    double infer_per_sample_seconds = 0.0;

    std::size_t n_samples = 0;
};

std::size_t argmax_row(const Matrix& m, std::size_t row);

// Regression: per-output MAE and MSE. Classification: argmax decode,
// confusion matrix, average accuracy, and trapezoidal one-vs-rest AUC
// per class (prediction column c is the score for class c).
MetricsReport compute_metrics(const Matrix& pred, const Matrix& truth, Task task);

void write_metrics_csv(const std::filesystem::path& path, const MetricsReport& report);

}  // namespace osos

#endif
