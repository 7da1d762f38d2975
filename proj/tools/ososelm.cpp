// Command-line harness for the osos-elm library: dataset generation,
// online training, inference, hyper-parameter sweeps, the fixed-point
// precision study, and metrics evaluation.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "osos/elm.hpp"
#include "osos/fxp.hpp"
#include "osos/matrix_io.hpp"
#include "osos/metrics.hpp"
#include "osos/pipeline.hpp"
#include "osos/signal.hpp"

namespace {

using namespace osos;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("OSOS_SEED")) return std::strtoull(env, nullptr, 10);
    return 1;
}

void add_config_option(CLI::App* app) {
    app->set_config("--config", "", "flat key=value config file; flags override");
}

struct GenArgs {
    std::string out;
    std::size_t n = 8000;
    std::uint64_t seed = default_seed();
    bool csv = false;
};

void add_gen_common(CLI::App* cmd, GenArgs& args) {
    cmd->add_option("--out", args.out, "output path prefix")->required();
    cmd->add_option("--n", args.n, "number of samples");
    cmd->add_option("--seed", args.seed, "generator seed");
    cmd->add_flag("--csv", args.csv, "also write CSV copies of x and y");
    add_config_option(cmd);
}

void emit(const GenArgs& args, const LabeledDataset& ds) {
    write_dataset(args.out, ds);
    if (args.csv) write_dataset_csv(args.out, ds);
    std::cout << "wrote " << ds.x.rows() << " samples (" << ds.x.cols() << " inputs, "
              << ds.y.cols() << " outputs) to " << args.out << ".{x.mat,y.mat,meta}\n";
}

int run_train(const std::string& data, std::size_t n_init, std::size_t hidden,
              int max_sweeps, std::uint64_t seed, const std::string& schedule,
              const std::string& model_out, std::size_t progress_every,
              const std::string& probe_data) {
    const LabeledDataset ds = read_dataset(data);
    const SplitDataset parts = split(ds, n_init);
    const Topology topo{ds.x.cols(), hidden, ds.y.cols()};
    const ElmModel model = init_model(topo, seed);

    PinvConfig pcfg;
    pcfg.max_sweeps = max_sweeps;
    ItSchedule sched;
    sched.mode = schedule == "twotask" ? ItMode::TwoTask : ItMode::Sequential;

    Batch probe;
    if (!probe_data.empty()) {
        const LabeledDataset probe_ds = read_dataset(probe_data);
        probe = {probe_ds.x, probe_ds.y};
    }

    const auto t0 = std::chrono::steady_clock::now();
    OnlineState state = run_it(model, parts.init, sched, pcfg);
    const auto t1 = std::chrono::steady_clock::now();
    StreamOptions opts;
    opts.progress_every = progress_every;
    if (probe.x.rows() > 0) opts.probe = &probe;
    run_stream(state, model, parts.stream, opts, [](const ProgressEvent& ev) {
        std::cerr << "sample=" << ev.samples_seen;
        if (ev.has_probe) std::cerr << " probe_mae=" << ev.probe_mae;
        std::cerr << '\n';
    });
    const auto t2 = std::chrono::steady_clock::now();

    save_model(model_out, model, state);
    std::cout << "trained on " << state.samples_seen << " samples (IT "
              << std::chrono::duration<double>(t1 - t0).count() << " s, OBT "
              << std::chrono::duration<double>(t2 - t1).count() << " s); model written to "
              << model_out << '\n';
    if (state.rank_deficient)
        std::cerr << "warning: initial pseudo-inversion was rank deficient\n";
    return 0;
}

int run_infer(const std::string& model_path, const std::string& data,
              const std::string& pred_out, const std::string& report,
              const std::string& task_name) {
    const auto [model, state] = load_model(model_path);
    const LabeledDataset ds = read_dataset(data);
    const Matrix pred = infer(model, ds.x, state.eta);
    if (!pred_out.empty()) write_matrix(pred_out, pred);
    if (!report.empty()) {
        const Task task = task_name == "cls" ? Task::Classification : Task::Regression;
        write_metrics_csv(report, compute_metrics(pred, ds.y, task));
    }
    std::cout << "inferred " << pred.rows() << " samples\n";
    return 0;
}

std::vector<std::size_t> parse_size_list(const std::vector<std::string>& raw) {
    std::vector<std::size_t> out;
    for (const auto& s : raw) out.push_back(std::stoull(s));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online-sequential ELM with one-sided Jacobi SVD initial training"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a labeled synthetic dataset");
    gen->require_subcommand(1);

    GenArgs flim_args;
    FlimDecaySpec flim_spec;
    auto* gen_flim_cmd = gen->add_subcommand("flim", "fluorescence decay histograms");
    add_gen_common(gen_flim_cmd, flim_args);
    gen_flim_cmd->add_option("--bins", flim_spec.n_bins, "histogram bins");
    gen_flim_cmd->add_option("--bin-width", flim_spec.bin_width_ns, "bin width [ns]");
    gen_flim_cmd->add_option("--tau1-lo", flim_spec.tau1_range_ns.lo);
    gen_flim_cmd->add_option("--tau1-hi", flim_spec.tau1_range_ns.hi);
    gen_flim_cmd->add_option("--tau2-lo", flim_spec.tau2_range_ns.lo);
    gen_flim_cmd->add_option("--tau2-hi", flim_spec.tau2_range_ns.hi);
    gen_flim_cmd->add_option("--alpha1-lo", flim_spec.alpha1_range.lo);
    gen_flim_cmd->add_option("--alpha1-hi", flim_spec.alpha1_range.hi);
    gen_flim_cmd->add_option("--amplitude", flim_spec.amplitude, "peak photon count scale");
    gen_flim_cmd->add_option("--irf-fwhm", flim_spec.irf_fwhm_ns, "IRF FWHM [ns]; <=0 for delta");
    gen_flim_cmd->add_option("--irf-fwhm-spread", flim_spec.irf_fwhm_spread,
                             "per-sample FWHM multiplier bound; 1 disables");
    gen_flim_cmd->add_option("--irf-peak-bin", flim_spec.irf_peak_bin);
    gen_flim_cmd->add_option("--irf-peak-jitter", flim_spec.irf_peak_jitter_bins,
                             "per-sample IRF peak shift bound [bins]");
    gen_flim_cmd->add_option("--dark-rate", flim_spec.dark_count_rate, "dark counts per bin");
    bool flim_no_noise = false;
    gen_flim_cmd->add_flag("--no-noise", flim_no_noise, "disable Poisson noise");

    GenArgs dcs_args;
    DcsSpec dcs_spec;
    auto* gen_dcs_cmd = gen->add_subcommand("dcs", "intensity autocorrelation curves");
    add_gen_common(gen_dcs_cmd, dcs_args);
    gen_dcs_cmd->add_option("--lags", dcs_spec.n_lags, "number of log-spaced lags");
    gen_dcs_cmd->add_option("--lag-min", dcs_spec.lag_min_s, "shortest lag [s]");
    gen_dcs_cmd->add_option("--lag-max", dcs_spec.lag_max_s, "longest lag [s]");
    gen_dcs_cmd->add_option("--mu-s-prime", dcs_spec.mu_s_prime, "reduced scattering [mm^-1]");
    gen_dcs_cmd->add_option("--mu-a", dcs_spec.mu_a, "absorption [mm^-1]");
    gen_dcs_cmd->add_option("--wavelength", dcs_spec.wavelength_nm, "wavelength [nm]");
    gen_dcs_cmd->add_option("--sdd", dcs_spec.sdd_mm, "source-detector distance [mm]");
    gen_dcs_cmd->add_option("--bfi-lo", dcs_spec.bfi_range.lo, "BFi lower bound [mm^2/s]");
    gen_dcs_cmd->add_option("--bfi-hi", dcs_spec.bfi_range.hi, "BFi upper bound [mm^2/s]");
    gen_dcs_cmd->add_option("--beta-lo", dcs_spec.beta_range.lo);
    gen_dcs_cmd->add_option("--beta-hi", dcs_spec.beta_range.hi);
    gen_dcs_cmd->add_option("--bfi-label-scale", dcs_spec.bfi_label_scale);
    gen_dcs_cmd->add_flag("--g2-minus-one", dcs_spec.feed_g2_minus_one,
                          "feed g2-1 instead of g2");
    gen_dcs_cmd->add_option("--noise-floor", dcs_spec.noise_floor);
    gen_dcs_cmd->add_option("--noise-scale", dcs_spec.noise_scale);
    bool dcs_no_noise = false;
    gen_dcs_cmd->add_flag("--no-noise", dcs_no_noise, "disable Gaussian noise");

    GenArgs fog_args;
    FogHistSpec fog_spec;
    auto* gen_fog_cmd = gen->add_subcommand("fog", "LiDAR-like return histograms");
    add_gen_common(gen_fog_cmd, fog_args);
    gen_fog_cmd->add_option("--bins", fog_spec.n_bins);
    gen_fog_cmd->add_option("--classes", fog_spec.n_classes);
    gen_fog_cmd->add_option("--first-peak", fog_spec.first_peak_bin);
    gen_fog_cmd->add_option("--peak-step", fog_spec.peak_step_bins);
    gen_fog_cmd->add_option("--peak-jitter", fog_spec.peak_jitter_bins);
    gen_fog_cmd->add_option("--peak-width", fog_spec.peak_width_bins);
    gen_fog_cmd->add_option("--fog-tail-rate", fog_spec.fog_tail_rate);
    gen_fog_cmd->add_option("--signal-to-fog", fog_spec.signal_to_fog_ratio);
    gen_fog_cmd->add_option("--fog-amplitude", fog_spec.fog_amplitude);
    bool fog_no_noise = false;
    gen_fog_cmd->add_flag("--no-noise", fog_no_noise, "disable Poisson noise");

    // ---- train ----
    auto* train = app.add_subcommand("train", "initial + sequential training");
    std::string train_data, model_out = "model.mdl", schedule = "sequential", probe_data;
    std::size_t n_init = 250, hidden = 150, progress_every = 500;
    int max_sweeps = 15;
    std::uint64_t train_seed = default_seed();
    train->add_option("--data", train_data, "dataset path prefix")->required();
    train->add_option("--n-init", n_init, "initial training batch size");
    train->add_option("--hidden", hidden, "hidden nodes (L)");
    train->add_option("--sweeps", max_sweeps, "Jacobi sweep cap");
    train->add_option("--seed", train_seed, "model weight seed");
    train->add_option("--schedule", schedule, "sequential | twotask")
        ->check(CLI::IsMember({"sequential", "twotask"}));
    train->add_option("--model-out", model_out, "output model file");
    train->add_option("--progress-every", progress_every, "progress cadence in samples");
    train->add_option("--probe-data", probe_data,
                      "held-out dataset prefix for the running probe MAE");
    add_config_option(train);

    // ---- infer ----
    auto* infer_cmd = app.add_subcommand("infer", "run inference with a trained model");
    std::string infer_model, infer_data, pred_out, infer_report, infer_task = "reg";
    infer_cmd->add_option("--model", infer_model)->required();
    infer_cmd->add_option("--data", infer_data, "dataset path prefix")->required();
    infer_cmd->add_option("--pred-out", pred_out, "write predictions (binary matrix)");
    infer_cmd->add_option("--report", infer_report, "write metrics CSV against dataset labels");
    infer_cmd->add_option("--task", infer_task)->check(CLI::IsMember({"reg", "cls"}));
    add_config_option(infer_cmd);

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "hyper-parameter sweep");
    std::string sweep_data, sweep_test, sweep_out = "sweep.csv", sweep_task = "reg";
    std::vector<std::string> l_list, n0_list, bs_list, cap_list;
    std::uint64_t sweep_seed = default_seed();
    sweep->add_option("--data", sweep_data, "training dataset path prefix")->required();
    sweep->add_option("--test", sweep_test, "test dataset path prefix")->required();
    sweep->add_option("--hidden-list", l_list, "L values")->delimiter(',');
    sweep->add_option("--n-init-list", n0_list, "N0 values")->delimiter(',');
    sweep->add_option("--batch-list", bs_list, "sequential batch sizes")->delimiter(',');
    sweep->add_option("--sweeps-list", cap_list, "Jacobi sweep caps")->delimiter(',');
    sweep->add_option("--seed", sweep_seed, "model weight seed");
    sweep->add_option("--task", sweep_task)->check(CLI::IsMember({"reg", "cls"}));
    sweep->add_option("--out", sweep_out, "report CSV path");
    add_config_option(sweep);

    // ---- fxp-sweep ----
    auto* fxp = app.add_subcommand("fxp-sweep", "fixed-point fractional-bit study");
    std::string fxp_data, fxp_out = "fxp_sweep.csv", fxp_task = "reg";
    std::vector<int> frac_bits{8, 12, 16, 20, 24, 28};
    int fxp_int_bits = 16;
    std::size_t fxp_n_init = 250, fxp_hidden = 150, fxp_n_test = 0;
    std::uint64_t fxp_seed = default_seed();
    fxp->add_option("--data", fxp_data, "dataset path prefix")->required();
    fxp->add_option("--frac-bits", frac_bits, "fractional widths to test")->delimiter(',');
    fxp->add_option("--int-bits", fxp_int_bits, "integer bits (excluding sign)");
    fxp->add_option("--n-init", fxp_n_init);
    fxp->add_option("--hidden", fxp_hidden);
    fxp->add_option("--n-test", fxp_n_test, "held-out tail size (0: n/5)");
    fxp->add_option("--seed", fxp_seed);
    fxp->add_option("--task", fxp_task)->check(CLI::IsMember({"reg", "cls"}));
    fxp->add_option("--out", fxp_out, "report CSV path");
    add_config_option(fxp);

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "metrics from prediction and truth matrices");
    std::string eval_pred, eval_truth, eval_out, eval_task = "reg";
    eval->add_option("--pred", eval_pred)->required();
    eval->add_option("--truth", eval_truth)->required();
    eval->add_option("--task", eval_task)->check(CLI::IsMember({"reg", "cls"}));
    eval->add_option("--out", eval_out, "metrics CSV path (default: stdout summary only)");
    add_config_option(eval);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors exit 1, --help exits 0
    }

    try {
        if (gen_flim_cmd->parsed()) {
            if (flim_no_noise) flim_spec.noise = FlimNoise::None;
            emit(flim_args, gen_flim(flim_spec, flim_args.n, flim_args.seed));
        } else if (gen_dcs_cmd->parsed()) {
            if (dcs_no_noise) dcs_spec.noise = DcsNoise::None;
            emit(dcs_args, gen_dcs(dcs_spec, dcs_args.n, dcs_args.seed));
        } else if (gen_fog_cmd->parsed()) {
            if (fog_no_noise) fog_spec.poisson_noise = false;
            emit(fog_args, gen_fog_hist(fog_spec, fog_args.n, fog_args.seed));
        } else if (train->parsed()) {
            return run_train(train_data, n_init, hidden, max_sweeps, train_seed, schedule,
                             model_out, progress_every, probe_data);
        } else if (infer_cmd->parsed()) {
            return run_infer(infer_model, infer_data, pred_out, infer_report, infer_task);
        } else if (sweep->parsed()) {
            const LabeledDataset train_ds = read_dataset(sweep_data);
            const LabeledDataset test_ds = read_dataset(sweep_test);
            RunConfig cfg;
            cfg.topo = Topology{train_ds.x.cols(), 150, train_ds.y.cols()};
            cfg.model_seed = sweep_seed;
            cfg.task = sweep_task == "cls" ? Task::Classification : Task::Regression;
            cfg.hidden_list = parse_size_list(l_list);
            cfg.n_init_list = parse_size_list(n0_list);
            cfg.batch_size_list = parse_size_list(bs_list);
            for (const auto& s : cap_list) cfg.max_sweeps_list.push_back(std::stoi(s));
            const auto cells = run_sweep(cfg, train_ds, test_ds.x, test_ds.y);
            write_sweep_csv(sweep_out, cells, cfg.task);
            std::size_t failed = 0;
            for (const auto& c : cells)
                if (c.failed) ++failed;
            std::cout << "swept " << cells.size() << " cells (" << failed << " failed); report "
                      << sweep_out << '\n';
        } else if (fxp->parsed()) {
            const LabeledDataset ds = read_dataset(fxp_data);
            FxpSweepConfig cfg;
            cfg.n_init = fxp_n_init;
            cfg.n_hidden = fxp_hidden;
            cfg.model_seed = fxp_seed;
            cfg.n_test = fxp_n_test;
            cfg.base.int_bits = fxp_int_bits;
            cfg.frac_bits = frac_bits;
            cfg.classification = fxp_task == "cls";
            const auto rows = sweep_frac_bits(ds, cfg);
            write_fxp_sweep_csv(fxp_out, rows);
            std::cout << "fixed-point sweep over " << frac_bits.size() << " widths; report "
                      << fxp_out << '\n';
        } else if (eval->parsed()) {
            const Matrix pred = read_matrix(eval_pred);
            const Matrix truth = read_matrix(eval_truth);
            const Task task = eval_task == "cls" ? Task::Classification : Task::Regression;
            const MetricsReport rep = compute_metrics(pred, truth, task);
            if (!eval_out.empty()) write_metrics_csv(eval_out, rep);
            for (std::size_t o = 0; o < rep.mae.size(); ++o)
                std::cout << "output " << o << ": mae=" << rep.mae[o] << " mse=" << rep.mse[o]
                          << '\n';
            if (task == Task::Classification)
                std::cout << "accuracy=" << rep.accuracy << '\n';
        }
    } catch (const InsufficientInitBatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const RangeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numeric/runtime failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
