#include "osos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace osos {

std::size_t argmax_row(const Matrix& m, std::size_t row) {
    auto r = m.row(row);
    std::size_t best = 0;
    for (std::size_t j = 1; j < r.size(); ++j)
        if (r[j] > r[best]) best = j;
    return best;
}

namespace {

// Trapezoidal area under the ROC curve for one class: scores sorted
// descending, ties handled by advancing through equal-score groups
// before emitting a point.
double roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::size_t n_pos = 0;
    for (bool p : positive) n_pos += p ? 1 : 0;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return 0.5;

    double area = 0.0;
    double tp = 0, fp = 0, prev_tp = 0, prev_fp = 0;
    std::size_t i = 0;
    while (i < n) {
        const double s = scores[order[i]];
        while (i < n && scores[order[i]] == s) {
            if (positive[order[i]])
                ++tp;
            else
                ++fp;
            ++i;
        }
        area += (fp - prev_fp) * (tp + prev_tp) / 2.0;
        prev_tp = tp;
        prev_fp = fp;
    }
    return area / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace

MetricsReport compute_metrics(const Matrix& pred, const Matrix& truth, Task task) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
        throw DimensionError("compute_metrics: prediction/truth shape mismatch");
    const std::size_t n = pred.rows();
    const std::size_t n_out = pred.cols();
    if (n == 0) throw DimensionError("compute_metrics: empty input");

    MetricsReport rep;
    rep.n_samples = n;
    rep.mae.assign(n_out, 0.0);
    rep.mse.assign(n_out, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t o = 0; o < n_out; ++o) {
            const double e = pred(i, o) - truth(i, o);
            rep.mae[o] += std::fabs(e);
            rep.mse[o] += e * e;
        }
    for (std::size_t o = 0; o < n_out; ++o) {
        rep.mae[o] /= static_cast<double>(n);
        rep.mse[o] /= static_cast<double>(n);
    }

    if (task == Task::Classification) {
        rep.n_classes = n_out;
        rep.confusion.assign(n_out * n_out, 0);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t t = argmax_row(truth, i);
            const std::size_t p = argmax_row(pred, i);
            ++rep.confusion[t * n_out + p];
            if (t == p) ++correct;
        }
        rep.accuracy = static_cast<double>(correct) / static_cast<double>(n);

        rep.auc.resize(n_out);
        std::vector<double> scores(n);
        std::vector<bool> positive(n);
        for (std::size_t c = 0; c < n_out; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                scores[i] = pred(i, c);
                positive[i] = argmax_row(truth, i) == c;
            }
            rep.auc[c] = roc_auc(scores, positive);
        }
    }
    return rep;
}

void write_metrics_csv(const std::filesystem::path& path, const MetricsReport& rep) {
    std::ofstream os(path);
    if (!os) throw IoError("write_metrics_csv: cannot open " + path.string());
    os << "metric,index,value\n";
    char buf[32];
    auto put = [&](const char* name, std::size_t idx, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << name << ',' << idx << ',' << buf << '\n';
    };
    for (std::size_t o = 0; o < rep.mae.size(); ++o) put("mae", o, rep.mae[o]);
    for (std::size_t o = 0; o < rep.mse.size(); ++o) put("mse", o, rep.mse[o]);
    if (rep.n_classes > 0) {
        put("accuracy", 0, rep.accuracy);
        for (std::size_t c = 0; c < rep.auc.size(); ++c) put("auc", c, rep.auc[c]);
        for (std::size_t t = 0; t < rep.n_classes; ++t)
            for (std::size_t p = 0; p < rep.n_classes; ++p)
                put("confusion", t * rep.n_classes + p,
                    static_cast<double>(rep.confusion[t * rep.n_classes + p]));
    }
    if (rep.it_seconds > 0.0) put("it_seconds", 0, rep.it_seconds);
    if (rep.obt_seconds > 0.0) {
        put("obt_seconds", 0, rep.obt_seconds);
        put("obt_per_sample_seconds", 0, rep.obt_per_sample_seconds);
    }
    if (rep.infer_per_sample_seconds > 0.0)
        put("infer_per_sample_seconds", 0, rep.infer_per_sample_seconds);
    if (!os) throw IoError("write_metrics_csv: stream failure");
}

}  // namespace osos
