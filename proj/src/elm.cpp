#include "osos/elm.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>

#include "osos/matrix_io.hpp"
#include "osos/rng.hpp"

namespace osos {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

ElmModel init_model(const Topology& topo, std::uint64_t seed) {
    if (topo.n_in < 1 || topo.n_hidden < 1 || topo.n_out < 1)
        throw DimensionError("init_model: all topology dimensions must be >= 1");
    ElmModel m;
    m.topo = topo;
    m.w = Matrix(topo.n_in, topo.n_hidden);
    m.bias.resize(topo.n_hidden);
    m.eta = Matrix(topo.n_hidden, topo.n_out);
    Rng rng(seed);
    for (double& v : m.w.data()) v = rng.uniform(-1.0, 1.0);
    for (double& v : m.bias) v = rng.uniform(-1.0, 1.0);
    return m;
}

Matrix hidden_activations(const ElmModel& model, const Matrix& x) {
    if (x.cols() != model.topo.n_in)
        throw DimensionError("hidden_activations: x.cols != n_in");
    const std::size_t k = x.rows();
    const std::size_t L = model.topo.n_hidden;
    Matrix h(k, L);
    for (std::size_t i = 0; i < k; ++i) {
        auto xi = x.row(i);
        auto hi = h.row(i);
        for (std::size_t j = 0; j < L; ++j) hi[j] = model.bias[j];
        for (std::size_t d = 0; d < x.cols(); ++d) {
            const double xd = xi[d];
            if (xd == 0.0) continue;
            auto wrow = model.w.row(d);
            for (std::size_t j = 0; j < L; ++j) hi[j] += xd * wrow[j];
        }
        for (std::size_t j = 0; j < L; ++j) hi[j] = sigmoid(hi[j]);
    }
    return h;
}

static void check_batch(const ElmModel& model, const Batch& b, const char* op) {
    if (b.x.rows() != b.y.rows())
        throw DimensionError(std::string(op) + ": x/y row mismatch");
    if (b.x.cols() != model.topo.n_in || b.y.cols() != model.topo.n_out)
        throw DimensionError(std::string(op) + ": batch width mismatch");
}

// The recursion assumes P symmetric; establish it exactly at initial
// training and re-establish it after every update. Averaging equal
// entries is exact, so a zero update leaves P bit-identical.
void symmetrize(Matrix& p) {
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = i + 1; j < p.cols(); ++j) {
            const double avg = 0.5 * (p(i, j) + p(j, i));
            p(i, j) = avg;
            p(j, i) = avg;
        }
}

OnlineState initial_train(const ElmModel& model, const Batch& init_batch,
                          const PinvConfig& cfg) {
    check_batch(model, init_batch, "initial_train");
    const std::size_t n0 = init_batch.x.rows();
    const std::size_t L = model.topo.n_hidden;
    if (n0 < L)
        throw InsufficientInitBatch("initial_train: batch rows " + std::to_string(n0) +
                                    " < hidden nodes " + std::to_string(L));
    if (n0 == L)
        std::cerr << "warning: initial batch size equals hidden node count; "
                     "H0^T H0 may be near singular\n";

    const Matrix h0 = hidden_activations(model, init_batch.x);
    const PinvResult p = pinv(matmul(transpose(h0), h0), cfg);
    const PinvResult h0_pinv = pinv(h0, cfg);

    OnlineState state;
    state.p = p.value;
    symmetrize(state.p);
    state.eta = matmul(h0_pinv.value, init_batch.y);
    state.samples_seen = n0;
    state.rank_deficient = p.rank_deficient || h0_pinv.rank_deficient;
    return state;
}

OnlineState initial_train_normal_eq(const ElmModel& model, const Batch& init_batch,
                                    const PinvConfig& cfg) {
    check_batch(model, init_batch, "initial_train_normal_eq");
    const std::size_t n0 = init_batch.x.rows();
    const std::size_t L = model.topo.n_hidden;
    if (n0 < L)
        throw InsufficientInitBatch("initial_train_normal_eq: batch rows " +
                                    std::to_string(n0) + " < hidden nodes " + std::to_string(L));

    const Matrix h0 = hidden_activations(model, init_batch.x);
    const PinvResult p = pinv(matmul(transpose(h0), h0), cfg);

    OnlineState state;
    state.p = p.value;
    symmetrize(state.p);
    state.eta = matmul(state.p, matmul(transpose(h0), init_batch.y));
    state.samples_seen = n0;
    state.rank_deficient = p.rank_deficient;
    return state;
}

void rank_one_update(OnlineState& state, std::span<const double> h,
                     std::span<const double> y) {
    const std::size_t L = state.p.rows();
    const std::size_t n_out = state.eta.cols();
    if (h.size() != L) throw DimensionError("rank_one_update: h length != hidden nodes");
    if (y.size() != n_out) throw DimensionError("rank_one_update: y length != output nodes");

    // c = P h^T, d = h P; computed separately, matching the two
    // independent matrix-vector products of the update.
    std::vector<double> c(L, 0.0), d(L, 0.0);
    for (std::size_t i = 0; i < L; ++i) {
        auto prow = state.p.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < L; ++j) {
            acc += prow[j] * h[j];
            d[j] += h[i] * prow[j];
        }
        c[i] = acc;
    }

    double denom = 1.0;
    for (std::size_t j = 0; j < L; ++j) denom += h[j] * c[j];
    if (!std::isfinite(denom) || denom <= 0.0)
        throw NumericError("rank_one_update: non-positive or non-finite gain denominator at sample " +
                           std::to_string(state.samples_seen + 1));

    for (std::size_t i = 0; i < L; ++i) {
        auto prow = state.p.row(i);
        const double ci = c[i];
        for (std::size_t j = 0; j < L; ++j) prow[j] -= (ci * d[j]) / denom;
    }
    // Symmetrize to suppress round-off drift in the recursion.
    symmetrize(state.p);

    // residual r = y - h * eta, then eta += (P_new h^T) r
    std::vector<double> r(n_out);
    for (std::size_t o = 0; o < n_out; ++o) {
        double acc = 0.0;
        for (std::size_t j = 0; j < L; ++j) acc += h[j] * state.eta(j, o);
        r[o] = y[o] - acc;
    }
    std::vector<double> gain(L, 0.0);
    for (std::size_t i = 0; i < L; ++i) {
        auto prow = state.p.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < L; ++j) acc += prow[j] * h[j];
        gain[i] = acc;
    }
    for (std::size_t i = 0; i < L; ++i) {
        auto erow = state.eta.row(i);
        for (std::size_t o = 0; o < n_out; ++o) erow[o] += gain[i] * r[o];
    }
    state.samples_seen += 1;

    if (!state.eta.all_finite())
        throw NumericError("rank_one_update: non-finite weights after sample " +
                           std::to_string(state.samples_seen));
}

void obt_update(OnlineState& state, const ElmModel& model,
                std::span<const double> x, std::span<const double> y) {
    if (x.size() != model.topo.n_in) throw DimensionError("obt_update: x length != n_in");
    const std::size_t L = model.topo.n_hidden;
    std::vector<double> h(L);
    for (std::size_t j = 0; j < L; ++j) {
        double z = model.bias[j];
        for (std::size_t d = 0; d < x.size(); ++d) z += x[d] * model.w(d, j);
        h[j] = sigmoid(z);
    }
    rank_one_update(state, h, y);
}

void batch_update(OnlineState& state, const ElmModel& model, const Batch& batch,
                  const PinvConfig& cfg) {
    check_batch(model, batch, "batch_update");
    const std::size_t k = batch.x.rows();
    if (k < 1) throw DimensionError("batch_update: empty batch");

    const Matrix h = hidden_activations(model, batch.x);
    const Matrix ht = transpose(h);
    const Matrix ph = matmul(state.p, ht);               // L x k
    Matrix inner = matmul(h, ph);                        // k x k
    for (std::size_t i = 0; i < k; ++i) inner(i, i) += 1.0;
    const Matrix inner_inv = pinv(inner, cfg).value;

    state.p = sub(state.p, matmul(matmul(ph, inner_inv), matmul(h, state.p)));
    symmetrize(state.p);

    const Matrix residual = sub(batch.y, matmul(h, state.eta));
    state.eta = add(state.eta, matmul(matmul(state.p, ht), residual));
    state.samples_seen += k;

    if (!state.eta.all_finite() || !state.p.all_finite())
        throw NumericError("batch_update: non-finite state after sample " +
                           std::to_string(state.samples_seen));
}

Matrix infer(const ElmModel& model, const Matrix& x, const Matrix& eta) {
    if (eta.rows() != model.topo.n_hidden)
        throw DimensionError("infer: eta rows != hidden nodes");
    return matmul(hidden_activations(model, x), eta);
}

namespace {
constexpr char kModelMagic[8] = {'O', 'S', 'E', 'M', '-', 'M', 'D', 'L'};
constexpr std::uint8_t kModelVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
}  // namespace

void save_model(const std::filesystem::path& path, const ElmModel& model,
                const OnlineState& state) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("save_model: cannot open " + path.string());
    os.write(kModelMagic, sizeof kModelMagic);
    os.put(static_cast<char>(kModelVersion));
    put_u32(os, static_cast<std::uint32_t>(model.topo.n_in));
    put_u32(os, static_cast<std::uint32_t>(model.topo.n_hidden));
    put_u32(os, static_cast<std::uint32_t>(model.topo.n_out));
    os.put(static_cast<char>(model.activation));
    write_matrix(os, model.w);
    write_matrix(os, Matrix(1, model.bias.size(), model.bias));
    write_matrix(os, state.eta);
    write_matrix(os, state.p);
    if (!os) throw IoError("save_model: stream failure");
}

std::pair<ElmModel, OnlineState> load_model(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("load_model: cannot open " + path.string());
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kModelMagic, sizeof magic) != 0)
        throw IoError("load_model: bad magic");
    const int version = is.get();
    if (version != kModelVersion)
        throw IoError("load_model: unsupported version " + std::to_string(version));

    ElmModel model;
    model.topo.n_in = get_u32(is);
    model.topo.n_hidden = get_u32(is);
    model.topo.n_out = get_u32(is);
    model.activation = static_cast<Activation>(is.get());
    model.w = read_matrix(is);
    const Matrix bias = read_matrix(is);
    model.bias.assign(bias.data().begin(), bias.data().end());

    OnlineState state;
    state.eta = read_matrix(is);
    state.p = read_matrix(is);
    model.eta = state.eta;

    if (model.w.rows() != model.topo.n_in || model.w.cols() != model.topo.n_hidden ||
        model.bias.size() != model.topo.n_hidden)
        throw IoError("load_model: inconsistent shapes");
    return {std::move(model), std::move(state)};
}

}  // namespace osos
