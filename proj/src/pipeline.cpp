#include "osos/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <future>
#include <thread>

namespace osos {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

OnlineState run_it(const ElmModel& model, const Batch& init_batch,
                   const ItSchedule& schedule, const PinvConfig& cfg) {
    if (schedule.mode == ItMode::Sequential) return initial_train(model, init_batch, cfg);

    const std::size_t n0 = init_batch.x.rows();
    const std::size_t L = model.topo.n_hidden;
    if (n0 < L)
        throw InsufficientInitBatch("run_it: batch rows " + std::to_string(n0) +
                                    " < hidden nodes " + std::to_string(L));

    // Task A produces H0 once, hands it to task B through the promise,
    // then continues with its own decomposition. Task B consumes H0 and
    // returns eta. Single handoff, join barrier at the futures.
    std::promise<const Matrix*> h0_ready;
    std::shared_future<const Matrix*> h0_future = h0_ready.get_future().share();

    struct PathResult {
        Matrix value;
        bool deficient = false;
    };

    Matrix h0;
    auto task_a = std::async(std::launch::async, [&]() -> PathResult {
        try {
            h0 = hidden_activations(model, init_batch.x);
            h0_ready.set_value(&h0);
        } catch (...) {
            h0_ready.set_exception(std::current_exception());
            throw;
        }
        PinvResult pr = pinv(matmul(transpose(h0), h0), cfg);
        symmetrize(pr.value);
        return {std::move(pr.value), pr.rank_deficient};
    });
    auto task_b = std::async(std::launch::async, [&]() -> PathResult {
        const Matrix* h = h0_future.get();
        PinvResult pr = pinv(*h, cfg);
        return {matmul(pr.value, init_batch.y), pr.rank_deficient};
    });

    OnlineState state;
    try {
        PathResult a = task_a.get();
        state.p = std::move(a.value);
        state.rank_deficient = a.deficient;
    } catch (const std::exception& e) {
        task_b.wait();
        throw NumericError(std::string("run_it: task-A (P path) failed: ") + e.what());
    }
    try {
        PathResult b = task_b.get();
        state.eta = std::move(b.value);
        state.rank_deficient = state.rank_deficient || b.deficient;
    } catch (const std::exception& e) {
        throw NumericError(std::string("run_it: task-B (eta path) failed: ") + e.what());
    }
    state.samples_seen = n0;
    return state;
}

void run_stream(OnlineState& state, const ElmModel& model, const Batch& stream,
                const StreamOptions& opts, const ProgressSink& sink) {
    if (stream.x.rows() != stream.y.rows())
        throw DimensionError("run_stream: x/y row mismatch");
    for (std::size_t i = 0; i < stream.x.rows(); ++i) {
        obt_update(state, model, stream.x.row(i), stream.y.row(i));
        if (sink && opts.progress_every > 0 && (i + 1) % opts.progress_every == 0) {
            ProgressEvent ev;
            ev.samples_seen = state.samples_seen;
            if (opts.probe && opts.probe->x.rows() > 0) {
                const Matrix pred = infer(model, opts.probe->x, state.eta);
                double mae = 0.0;
                for (std::size_t r = 0; r < pred.rows(); ++r)
                    for (std::size_t c = 0; c < pred.cols(); ++c)
                        mae += std::fabs(pred(r, c) - opts.probe->y(r, c));
                ev.probe_mae = mae / static_cast<double>(pred.size());
                ev.has_probe = true;
            }
            sink(ev);
        }
    }
}

std::vector<SweepCell> run_sweep(const RunConfig& cfg, const LabeledDataset& train,
                                 const Matrix& test_x, const Matrix& test_y) {
    auto hidden = cfg.hidden_list.empty() ? std::vector<std::size_t>{cfg.topo.n_hidden}
                                          : cfg.hidden_list;
    auto inits = cfg.n_init_list.empty() ? std::vector<std::size_t>{cfg.n_init}
                                         : cfg.n_init_list;
    auto batches = cfg.batch_size_list.empty() ? std::vector<std::size_t>{1}
                                               : cfg.batch_size_list;
    auto sweep_caps = cfg.max_sweeps_list.empty() ? std::vector<int>{PinvConfig{}.max_sweeps}
                                                  : cfg.max_sweeps_list;

    std::vector<SweepCell> cells;
    for (std::size_t L : hidden)
        for (std::size_t n0 : inits)
            for (std::size_t bs : batches)
                for (int cap : sweep_caps) {
                    SweepCell cell;
                    cell.n_hidden = L;
                    cell.n_init = n0;
                    cell.batch_size = bs;
                    cell.max_sweeps = cap;
                    try {
                        PinvConfig pcfg;
                        pcfg.max_sweeps = cap;
                        Topology topo = cfg.topo;
                        topo.n_hidden = L;
                        const ElmModel model = init_model(topo, cfg.model_seed);
                        const SplitDataset parts = split(train, n0);

                        const auto t0 = std::chrono::steady_clock::now();
                        OnlineState state = initial_train(model, parts.init, pcfg);
                        if (bs <= 1) {
                            for (std::size_t i = 0; i < parts.stream.x.rows(); ++i)
                                obt_update(state, model, parts.stream.x.row(i),
                                           parts.stream.y.row(i));
                        } else {
                            for (std::size_t i = 0; i < parts.stream.x.rows(); i += bs) {
                                const std::size_t k =
                                    std::min(bs, parts.stream.x.rows() - i);
                                Batch chunk{take_rows(parts.stream.x, i, k),
                                            take_rows(parts.stream.y, i, k)};
                                batch_update(state, model, chunk, pcfg);
                            }
                        }
                        cell.train_seconds = seconds_since(t0);

                        const auto t1 = std::chrono::steady_clock::now();
                        const Matrix pred = infer(model, test_x, state.eta);
                        cell.infer_seconds = seconds_since(t1);

                        cell.metrics = compute_metrics(pred, test_y, cfg.task);
                        cell.metrics.it_seconds = 0.0;
                        cell.metrics.obt_seconds = cell.train_seconds;
                        if (parts.stream.x.rows() > 0)
                            cell.metrics.obt_per_sample_seconds =
                                cell.train_seconds / static_cast<double>(parts.stream.x.rows());
                        if (test_x.rows() > 0)
                            cell.metrics.infer_per_sample_seconds =
                                cell.infer_seconds / static_cast<double>(test_x.rows());
                    } catch (const std::exception& e) {
                        cell.failed = true;
                        cell.error = e.what();
                    }
                    cells.push_back(std::move(cell));
                }
    return cells;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepCell>& cells,
                     Task task) {
    std::ofstream os(path);
    if (!os) throw IoError("write_sweep_csv: cannot open " + path.string());
    os << "n_hidden,n_init,batch_size,max_sweeps,status,train_seconds,infer_seconds";
    if (task == Task::Classification)
        os << ",accuracy,mean_auc";
    else
        os << ",mae_out0,mae_out1,mse_out0,mse_out1";
    os << '\n';
    char buf[32];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& c : cells) {
        os << c.n_hidden << ',' << c.n_init << ',' << c.batch_size << ',' << c.max_sweeps << ','
           << (c.failed ? "failed" : "ok") << ',' << num(c.train_seconds) << ','
           << num(c.infer_seconds);
        if (c.failed) {
            os << '\n';
            continue;
        }
        if (task == Task::Classification) {
            double mean_auc = 0.0;
            for (double a : c.metrics.auc) mean_auc += a;
            if (!c.metrics.auc.empty()) mean_auc /= static_cast<double>(c.metrics.auc.size());
            os << ',' << num(c.metrics.accuracy) << ',' << num(mean_auc);
        } else {
            const auto& mae = c.metrics.mae;
            const auto& mse = c.metrics.mse;
            os << ',' << num(mae.size() > 0 ? mae[0] : 0.0) << ','
               << num(mae.size() > 1 ? mae[1] : 0.0) << ',' << num(mse.size() > 0 ? mse[0] : 0.0)
               << ',' << num(mse.size() > 1 ? mse[1] : 0.0);
        }
        os << '\n';
    }
    if (!os) throw IoError("write_sweep_csv: stream failure");
}

}  // namespace osos
