#ifndef OSOS_PIPELINE_HPP
#define OSOS_PIPELINE_HPP

#include <functional>
#include <string>
#include <vector>

#include "osos/elm.hpp"
#include "osos/metrics.hpp"
#include "osos/signal.hpp"

namespace osos {

// Initial training can run as one task or split across two: the
// activations H0 are produced once, handed to a second worker that
// computes eta = pinv(H0) * y0 while the first computes P =
// pinv(H0^T H0). Both schedules produce bit-identical results.
enum class ItMode { Sequential, TwoTask };

struct ItSchedule {
    ItMode mode = ItMode::Sequential;
};

OnlineState run_it(const ElmModel& model, const Batch& init_batch,
                   const ItSchedule& schedule, const PinvConfig& cfg = {});

struct ProgressEvent {
    std::size_t samples_seen = 0;
    double probe_mae = 0.0;  // valid only when has_probe
    bool has_probe = false;
};
using ProgressSink = std::function<void(const ProgressEvent&)>;

struct StreamOptions {
    std::size_t progress_every = 500;   // cadence of progress events
    const Batch* probe = nullptr;       // held-out set for the running residual
};

// Applies the rank-1 update over the stream rows in order. The state is
// single-writer; snapshots of eta taken between calls may serve
// concurrent inference.
void run_stream(OnlineState& state, const ElmModel& model, const Batch& stream,
                const StreamOptions& opts = {}, const ProgressSink& sink = {});

enum class RunMode { Train, Infer, TrainThenInfer };

struct RunConfig {
    Topology topo;
    std::size_t n_init = 250;
    std::uint64_t model_seed = 1;
    RunMode mode = RunMode::TrainThenInfer;
    Task task = Task::Regression;
    std::vector<std::size_t> hidden_list;     // L sweep axis
    std::vector<std::size_t> n_init_list;     // N0 sweep axis
    std::vector<std::size_t> batch_size_list; // sequential batch size axis
    std::vector<int> max_sweeps_list;         // Jacobi sweep cap axis
};

struct SweepCell {
    std::size_t n_hidden = 0;
    std::size_t n_init = 0;
    std::size_t batch_size = 0;
    int max_sweeps = 0;
    bool failed = false;
    std::string error;
    double train_seconds = 0.0;
    double infer_seconds = 0.0;
    MetricsReport metrics;
};

// Cartesian sweep over the requested axes. Each cell trains from
// scratch (IT on the first n_init rows, then sequential updates in
// batches of batch_size) and evaluates on the test set. A failing cell
// is recorded and the sweep continues.
std::vector<SweepCell> run_sweep(const RunConfig& cfg, const LabeledDataset& train,
                                 const Matrix& test_x, const Matrix& test_y);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepCell>& cells,
                     Task task);

}  // namespace osos

#endif
