#ifndef OSOS_SIGNAL_HPP
#define OSOS_SIGNAL_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>

#include "osos/elm.hpp"
#include "osos/matrix.hpp"

namespace osos {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class FlimNoise : std::uint8_t { None = 0, Poisson = 1 };

// Time-binned fluorescence decay: Gaussian IRF convolved with a
// bi-exponential, optional Poisson counting noise and dark counts.
// Labels are the amplitude-weighted and intensity-weighted mean
// lifetimes of the drawn mixture.
struct FlimDecaySpec {
    int n_bins = 256;
    double bin_width_ns = 0.039;
    Interval tau1_range_ns{0.1, 5.0};
    Interval tau2_range_ns{1.0, 3.0};
    Interval alpha1_range{0.0, 1.0};  // alpha2 = 1 - alpha1
    double amplitude = 100.0;         // peak photon count scale of the clean decay
    double amplitude_spread = 3.0;    // per-sample amplitude drawn log-uniform in
                                      // amplitude * [1/spread, spread]; 1 disables
    double irf_fwhm_ns = 0.1673;
    double irf_fwhm_spread = 1.5;     // per-sample FWHM multiplier, log-uniform in
                                      // [1/spread, spread]; 1 disables
    int irf_peak_bin = 10;            // fwhm <= 0 collapses the IRF to a delta here
    double irf_peak_jitter_bins = 3.0;  // per-sample uniform shift of the IRF peak
    FlimNoise noise = FlimNoise::Poisson;
    double dark_count_rate = 2.0;     // counts per bin
};

enum class DcsNoise : std::uint8_t { None = 0, LagScaledGaussian = 1 };

// Intensity autocorrelation g2 over a log-spaced lag grid, from the
// semi-infinite CW correlation-diffusion Green's function with
// extrapolated boundary, mapped through the Siegert relation.
struct DcsSpec {
    int n_lags = 128;
    double lag_min_s = 1e-7;
    double lag_max_s = 0.1;
    double mu_s_prime = 2.0;       // mm^-1
    double mu_a = 0.1;             // mm^-1
    double wavelength_nm = 700.0;
    double sdd_mm = 10.0;          // source-detector distance
    double refractive_index = 1.37;
    double r_eff = 0.493;          // effective reflection coefficient
    Interval bfi_range{1e-6, 1e-5};  // alpha*D_B, mm^2/s
    Interval beta_range{0.3, 0.5};
    double bfi_label_scale = 1e6;  // labels carry bfi * scale for conditioning
    bool feed_g2_minus_one = true;
    DcsNoise noise = DcsNoise::LagScaledGaussian;
    double noise_floor = 2e-3;     // Gaussian sigma at the shortest lag
    double noise_scale = 1e-2;     // extra sigma ramped in with sqrt(lag/lag_max)
    double noise_level_spread = 2.0;  // per-sample log-uniform multiplier on both
                                      // sigmas, emulating varying averaging time
};

// Single-return LiDAR-like histogram: Gaussian return peak at a
// class-dependent position over an exponential backscatter tail, Poisson
// counting noise. Labels are one-hot class indicators.
struct FogHistSpec {
    int n_bins = 50;
    int n_classes = 8;
    double first_peak_bin = 6.0;
    double peak_step_bins = 5.0;   // class c peak center = first + c * step
    double peak_jitter_bins = 1.0; // peak position drawn center +- jitter
    double peak_width_bins = 1.5;  // Gaussian sigma of the return
    double fog_tail_rate = 0.08;   // per-bin exponential decay of backscatter
    double signal_to_fog_ratio = 3.0;  // 0 removes the return entirely
    double fog_amplitude = 40.0;   // backscatter counts at bin 0
    bool poisson_noise = true;
};

struct DatasetMeta {
    std::string kind;  // "flim" | "dcs" | "fog"
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::map<std::string, std::string> fields;  // full generating spec
};

// x: one sample per row (histograms max-normalized to 1, DCS rows raw
// g2); y: matching labels.
struct LabeledDataset {
    Matrix x;
    Matrix y;
    DatasetMeta meta;
};

LabeledDataset gen_flim(const FlimDecaySpec& spec, std::size_t n, std::uint64_t seed);
LabeledDataset gen_dcs(const DcsSpec& spec, std::size_t n, std::uint64_t seed);
LabeledDataset gen_fog_hist(const FogHistSpec& spec, std::size_t n, std::uint64_t seed);

// Noiseless g2 curve for one (bfi, beta); used by fitting oracles and
// the generator itself.
std::vector<double> dcs_lag_grid(const DcsSpec& spec);
std::vector<double> dcs_g1_curve(const DcsSpec& spec, double bfi);

// Labels for a mixture: amplitude-weighted then intensity-weighted mean
// lifetime.
std::pair<double, double> flim_mean_lifetimes(double tau1, double tau2, double alpha1);

// First n_init rows become the initial batch, the remainder streams in
// order.
struct SplitDataset {
    Batch init;
    Batch stream;
};
SplitDataset split(const LabeledDataset& ds, std::size_t n_init);

// <prefix>.x.mat / <prefix>.y.mat binary matrices plus <prefix>.meta
// key=value sidecar.
void write_dataset(const std::filesystem::path& prefix, const LabeledDataset& ds);
LabeledDataset read_dataset(const std::filesystem::path& prefix);
void write_dataset_csv(const std::filesystem::path& prefix, const LabeledDataset& ds);

}  // namespace osos

#endif
