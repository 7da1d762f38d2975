#ifndef OSOS_ELM_HPP
#define OSOS_ELM_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "osos/matrix.hpp"
#include "osos/svd.hpp"

namespace osos {

enum class Activation : std::uint8_t { Sigmoid = 0 };

struct Topology {
    std::size_t n_in = 1;      // input nodes
    std::size_t n_hidden = 1;  // hidden nodes (L)
    std::size_t n_out = 1;     // output nodes
};

// Single-hidden-layer network with frozen random input weights. Only the
// hidden-to-output weights are trained; w and bias never change after
// init_model, so a model can be shared across threads.
struct ElmModel {
    Topology topo;
    Matrix w;                  // n_in x n_hidden
    std::vector<double> bias;  // n_hidden
    Matrix eta;                // n_hidden x n_out, trained output weights
    Activation activation = Activation::Sigmoid;
};

// Running pair (P, eta) of the sequential least-squares recursion.
// Single-writer: exactly one thread may apply updates; readers may copy
// eta between updates for concurrent inference.
struct OnlineState {
    Matrix p;    // n_hidden x n_hidden, tracks (H^T H)^{-1}
    Matrix eta;  // n_hidden x n_out
    std::size_t samples_seen = 0;
    bool rank_deficient = false;  // propagated from the initial pseudo-inversion
};

struct Batch {
    Matrix x;  // k x n_in
    Matrix y;  // k x n_out
};

// Input weights and biases drawn i.i.d. uniform on [-1, 1] from the
// seeded counter generator (w first, row-major, then bias). eta starts
// at zero.
ElmModel init_model(const Topology& topo, std::uint64_t seed);

double sigmoid(double z);

// (p + p^T) / 2 in place; exact when p is already symmetric.
void symmetrize(Matrix& p);

// H[i][j] = sigmoid(sum_d x[i][d] * w[d][j] + bias[j])
Matrix hidden_activations(const ElmModel& model, const Matrix& x);

// One-shot initial training on the first batch: P = pinv(H0^T H0) and
// eta = pinv(H0) * y0, both through the Jacobi SVD path. Requires
// x.rows() >= n_hidden; emits a warning to stderr at equality.
OnlineState initial_train(const ElmModel& model, const Batch& init_batch,
                          const PinvConfig& cfg = {});

// Alternative eta route for cross-checking: eta = P * H0^T * y0.
OnlineState initial_train_normal_eq(const ElmModel& model, const Batch& init_batch,
                                    const PinvConfig& cfg = {});

// Rank-1 sequential update with a single sample (x, y):
//   h     = activations(x)                      (1 x L)
//   denom = 1 + h P h^T
//   P    <- P - (P h^T h P) / denom             (then symmetrized)
//   eta  <- eta + P h^T (y - h eta)             (uses the new P)
void obt_update(OnlineState& state, const ElmModel& model,
                std::span<const double> x, std::span<const double> y);

// Same update with the activations supplied directly; obt_update is this
// plus the forward pass.
void rank_one_update(OnlineState& state, std::span<const double> h,
                     std::span<const double> y);

// General k-row sequential update:
//   P   <- P - P H^T (I + H P H^T)^{-1} H P     (inner inverse via pinv)
//   eta <- eta + P H^T (y - H eta)
void batch_update(OnlineState& state, const ElmModel& model, const Batch& batch,
                  const PinvConfig& cfg = {});

// hidden_activations followed by multiplication with eta.
Matrix infer(const ElmModel& model, const Matrix& x, const Matrix& eta);

// Model file: magic "OSEM-MDL", version byte, topology triple (u32 LE x3),
// activation tag (u8), then w, bias (1 x L), eta, P as binary matrices.
void save_model(const std::filesystem::path& path, const ElmModel& model,
                const OnlineState& state);
std::pair<ElmModel, OnlineState> load_model(const std::filesystem::path& path);

}  // namespace osos

#endif
