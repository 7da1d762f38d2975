#include "osos/fxp.hpp"

#include <cmath>
#include <fstream>

#include "osos/metrics.hpp"

namespace osos {

double quantize(double v, const FxpFormat& fmt, FxpStats* stats) {
    if (fmt.int_bits < 1 || fmt.frac_bits < 0)
        throw std::invalid_argument("quantize: int_bits >= 1 and frac_bits >= 0 required");
    const double scale = std::ldexp(1.0, fmt.frac_bits);
    const double hi_raw = std::ldexp(1.0, fmt.int_bits + fmt.frac_bits) - 1.0;
    const double lo_raw = -std::ldexp(1.0, fmt.int_bits + fmt.frac_bits);
    double raw = std::nearbyint(v * scale);  // FE_TONEAREST: ties to even
    if (raw > hi_raw) {
        raw = hi_raw;
        if (stats) ++stats->saturation_events;
    } else if (raw < lo_raw) {
        raw = lo_raw;
        if (stats) ++stats->saturation_events;
    }
    return raw / scale;
}

FxpMatrix FxpMatrix::from_matrix(const Matrix& m, const FxpFormat& fmt, FxpStats* stats) {
    FxpMatrix out;
    out.fmt = fmt;
    out.rows = m.rows();
    out.cols = m.cols();
    out.raw.resize(m.size());
    const double scale = std::ldexp(1.0, fmt.frac_bits);
    auto src = m.data();
    for (std::size_t i = 0; i < src.size(); ++i)
        out.raw[i] = static_cast<std::int64_t>(quantize(src[i], fmt, stats) * scale);
    return out;
}

Matrix FxpMatrix::to_matrix() const {
    Matrix m(rows, cols);
    const double inv = std::ldexp(1.0, -fmt.frac_bits);
    auto dst = m.data();
    for (std::size_t i = 0; i < raw.size(); ++i)
        dst[i] = static_cast<double>(raw[i]) * inv;
    return m;
}

namespace {

// Quantized dot product: operands assumed quantized, each
// multiply-accumulate result requantized before the next step.
double qdot(std::span<const double> a, std::span<const double> b, const FxpFormat& fmt,
            FxpStats* stats) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc = quantize(acc + a[i] * b[i], fmt, stats);
    return acc;
}

void quantize_in_place(Matrix& m, const FxpFormat& fmt, FxpStats* stats) {
    for (double& v : m.data()) v = quantize(v, fmt, stats);
}

}  // namespace

void fxp_obt_update(OnlineState& state, const ElmModel& model,
                    std::span<const double> x, std::span<const double> y,
                    const FxpFormat& fmt, FxpStats* stats) {
    if (x.size() != model.topo.n_in) throw DimensionError("fxp_obt_update: x length != n_in");
    if (y.size() != model.topo.n_out) throw DimensionError("fxp_obt_update: y length != n_out");
    const std::size_t L = model.topo.n_hidden;
    const std::size_t n_out = model.topo.n_out;

    quantize_in_place(state.p, fmt, stats);
    quantize_in_place(state.eta, fmt, stats);

    // h = sigmoid(W x + b), MACs quantized, activation evaluated in
    // double then quantized (hardware keeps a wide LUT for it).
    std::vector<double> h(L);
    for (std::size_t j = 0; j < L; ++j) {
        double z = quantize(model.bias[j], fmt, stats);
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double xd = quantize(x[d], fmt, stats);
            const double wd = quantize(model.w(d, j), fmt, stats);
            z = quantize(z + xd * wd, fmt, stats);
        }
        h[j] = quantize(sigmoid(z), fmt, stats);
    }

    std::vector<double> c(L), d(L);
    for (std::size_t i = 0; i < L; ++i) c[i] = qdot(state.p.row(i), h, fmt, stats);
    for (std::size_t j = 0; j < L; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < L; ++i)
            acc = quantize(acc + h[i] * state.p(i, j), fmt, stats);
        d[j] = acc;
    }

    // Quantization noise can push the denominator at or below zero once
    // P's true quadratic form decays under the resolution; the division
    // stays in double and the (possibly infinite) result saturates like
    // any other overflow. Only non-finite state is an error.
    const double denom = quantize(1.0 + qdot(h, c, fmt, stats), fmt, stats);
    const double recip = quantize(1.0 / denom, fmt, stats);

    for (std::size_t i = 0; i < L; ++i) {
        auto prow = state.p.row(i);
        for (std::size_t j = 0; j < L; ++j) {
            const double num = quantize(c[i] * d[j], fmt, stats);
            prow[j] = quantize(prow[j] - quantize(num * recip, fmt, stats), fmt, stats);
        }
    }
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i + 1; j < L; ++j) {
            const double avg = quantize(0.5 * (state.p(i, j) + state.p(j, i)), fmt, stats);
            state.p(i, j) = avg;
            state.p(j, i) = avg;
        }

    std::vector<double> r(n_out);
    for (std::size_t o = 0; o < n_out; ++o) {
        double acc = 0.0;
        for (std::size_t j = 0; j < L; ++j)
            acc = quantize(acc + h[j] * state.eta(j, o), fmt, stats);
        r[o] = quantize(quantize(y[o], fmt, stats) - acc, fmt, stats);
    }
    std::vector<double> gain(L);
    for (std::size_t i = 0; i < L; ++i) gain[i] = qdot(state.p.row(i), h, fmt, stats);
    for (std::size_t i = 0; i < L; ++i) {
        auto erow = state.eta.row(i);
        for (std::size_t o = 0; o < n_out; ++o)
            erow[o] = quantize(erow[o] + quantize(gain[i] * r[o], fmt, stats), fmt, stats);
    }
    state.samples_seen += 1;

    if (!state.eta.all_finite())
        throw NumericError("fxp_obt_update: non-finite weights after sample " +
                           std::to_string(state.samples_seen));
}

Matrix fxp_infer(const ElmModel& model, const Matrix& x, const Matrix& eta,
                 const FxpFormat& fmt, FxpStats* stats) {
    if (x.cols() != model.topo.n_in) throw DimensionError("fxp_infer: x.cols != n_in");
    if (eta.rows() != model.topo.n_hidden) throw DimensionError("fxp_infer: eta rows != L");
    const std::size_t L = model.topo.n_hidden;

    Matrix eta_q = eta;
    quantize_in_place(eta_q, fmt, stats);

    Matrix out(x.rows(), eta.cols());
    std::vector<double> h(L);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto xi = x.row(i);
        for (std::size_t j = 0; j < L; ++j) {
            double z = quantize(model.bias[j], fmt, stats);
            for (std::size_t d = 0; d < xi.size(); ++d) {
                const double xd = quantize(xi[d], fmt, stats);
                const double wd = quantize(model.w(d, j), fmt, stats);
                z = quantize(z + xd * wd, fmt, stats);
            }
            h[j] = quantize(sigmoid(z), fmt, stats);
        }
        for (std::size_t o = 0; o < eta.cols(); ++o) {
            double acc = 0.0;
            for (std::size_t j = 0; j < L; ++j)
                acc = quantize(acc + h[j] * eta_q(j, o), fmt, stats);
            out(i, o) = acc;
        }
    }
    return out;
}

std::vector<FxpSweepRow> sweep_frac_bits(const LabeledDataset& ds, const FxpSweepConfig& cfg) {
    std::vector<FxpSweepRow> rows;
    if (cfg.frac_bits.empty()) return rows;

    const std::size_t n = ds.x.rows();
    const std::size_t n_test = cfg.n_test > 0 ? cfg.n_test : n / 5;
    if (cfg.n_init + n_test >= n)
        throw RangeError("sweep_frac_bits: n_init + n_test must leave training samples");
    const std::size_t n_train = n - n_test;

    const Topology topo{ds.x.cols(), cfg.n_hidden, ds.y.cols()};
    const ElmModel model = init_model(topo, cfg.model_seed);

    LabeledDataset train{take_rows(ds.x, 0, n_train), take_rows(ds.y, 0, n_train), ds.meta};
    const Matrix test_x = take_rows(ds.x, n_train, n_test);
    const Matrix test_y = take_rows(ds.y, n_train, n_test);
    const SplitDataset parts = split(train, cfg.n_init);

    const OnlineState init_state = initial_train(model, parts.init, cfg.pinv);

    // float64 reference
    OnlineState ref = init_state;
    for (std::size_t i = 0; i < parts.stream.x.rows(); ++i)
        obt_update(ref, model, parts.stream.x.row(i), parts.stream.y.row(i));
    const Matrix ref_pred = infer(model, test_x, ref.eta);
    const MetricsReport ref_metrics = compute_metrics(
        ref_pred, test_y, cfg.classification ? Task::Classification : Task::Regression);
    for (std::size_t o = 0; o < test_y.cols(); ++o) {
        rows.push_back({-1, static_cast<int>(o), "mae", ref_metrics.mae[o], 0});
        rows.push_back({-1, static_cast<int>(o), "mse", ref_metrics.mse[o], 0});
    }
    if (cfg.classification)
        rows.push_back({-1, 0, "accuracy", ref_metrics.accuracy, 0});

    for (int frac : cfg.frac_bits) {
        FxpFormat fmt = cfg.base;
        fmt.frac_bits = frac;
        FxpStats stats;

        OnlineState state = init_state;
        for (std::size_t i = 0; i < parts.stream.x.rows(); ++i)
            fxp_obt_update(state, model, parts.stream.x.row(i), parts.stream.y.row(i), fmt,
                           &stats);
        const Matrix pred = fxp_infer(model, test_x, state.eta, fmt, &stats);
        const MetricsReport m = compute_metrics(
            pred, test_y, cfg.classification ? Task::Classification : Task::Regression);

        for (std::size_t o = 0; o < test_y.cols(); ++o) {
            rows.push_back({frac, static_cast<int>(o), "mae", m.mae[o], stats.saturation_events});
            rows.push_back({frac, static_cast<int>(o), "mse", m.mse[o], stats.saturation_events});
        }
        if (cfg.classification) {
            rows.push_back({frac, 0, "accuracy", m.accuracy, stats.saturation_events});
            // fraction of predictions whose argmax agrees with float64
            std::size_t agree = 0;
            for (std::size_t i = 0; i < pred.rows(); ++i) {
                if (argmax_row(pred, i) == argmax_row(ref_pred, i)) ++agree;
            }
            rows.push_back({frac, 0, "flp_match",
                            static_cast<double>(agree) / static_cast<double>(pred.rows()),
                            stats.saturation_events});
        }
    }
    return rows;
}

void write_fxp_sweep_csv(const std::filesystem::path& path,
                         const std::vector<FxpSweepRow>& rows) {
    std::ofstream os(path);
    if (!os) throw IoError("write_fxp_sweep_csv: cannot open " + path.string());
    os << "frac_bits,output_index,metric_name,value,saturation_events\n";
    char buf[32];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", r.value);
        os << r.frac_bits << ',' << r.output_index << ',' << r.metric << ',' << buf << ','
           << r.saturation_events << '\n';
    }
    if (!os) throw IoError("write_fxp_sweep_csv: stream failure");
}

}  // namespace osos
