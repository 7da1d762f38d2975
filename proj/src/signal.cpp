#include "osos/signal.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "osos/matrix_io.hpp"
#include "osos/rng.hpp"

namespace osos {

namespace {

constexpr double kFwhmToSigma = 2.354820045030949;  // 2*sqrt(2*ln 2)

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void max_normalize_row(std::span<double> row) {
    double peak = 0.0;
    for (double v : row) peak = std::max(peak, v);
    if (peak > 0.0)
        for (double& v : row) v /= peak;
}

}  // namespace

std::pair<double, double> flim_mean_lifetimes(double tau1, double tau2, double alpha1) {
    const double alpha2 = 1.0 - alpha1;
    const double tau_a = alpha1 * tau1 + alpha2 * tau2;
    const double wsum = alpha1 * tau1 + alpha2 * tau2;
    const double tau_i = wsum > 0.0
                             ? (alpha1 * tau1 * tau1 + alpha2 * tau2 * tau2) / wsum
                             : 0.0;
    return {tau_a, tau_i};
}

LabeledDataset gen_flim(const FlimDecaySpec& spec, std::size_t n, std::uint64_t seed) {
    require(spec.n_bins >= 1, "gen_flim: n_bins must be >= 1");
    require(spec.bin_width_ns > 0.0, "gen_flim: bin_width must be positive");
    require(spec.tau1_range_ns.lo <= spec.tau1_range_ns.hi && spec.tau1_range_ns.lo > 0.0,
            "gen_flim: bad tau1 range");
    require(spec.tau2_range_ns.lo <= spec.tau2_range_ns.hi && spec.tau2_range_ns.lo > 0.0,
            "gen_flim: bad tau2 range");
    require(spec.alpha1_range.lo >= 0.0 && spec.alpha1_range.hi <= 1.0 &&
                spec.alpha1_range.lo <= spec.alpha1_range.hi,
            "gen_flim: alpha1 range must lie in [0,1]");
    require(spec.irf_peak_bin >= 0 && spec.irf_peak_bin < spec.n_bins,
            "gen_flim: irf_peak_bin out of range");

    const std::size_t t_bins = static_cast<std::size_t>(spec.n_bins);

    // IRF kernel over the bin grid, normalized to unit area; a
    // non-positive FWHM degenerates to a delta at the peak bin. The
    // peak position and width can vary per sample (timing drift and
    // laser width variation).
    auto build_irf = [&](double center, double fwhm_ns, std::vector<double>& irf) {
        std::fill(irf.begin(), irf.end(), 0.0);
        if (fwhm_ns > 0.0) {
            const double sigma_bins = fwhm_ns / kFwhmToSigma / spec.bin_width_ns;
            double sum = 0.0;
            for (std::size_t t = 0; t < t_bins; ++t) {
                const double z = (static_cast<double>(t) - center) / sigma_bins;
                irf[t] = std::exp(-0.5 * z * z);
                sum += irf[t];
            }
            for (double& v : irf) v /= sum;
        } else {
            const double snapped = std::clamp(std::round(center), 0.0,
                                              static_cast<double>(t_bins - 1));
            irf[static_cast<std::size_t>(snapped)] = 1.0;
        }
    };

    LabeledDataset ds;
    ds.x = Matrix(n, t_bins);
    ds.y = Matrix(n, 2);
    const Rng base(seed);
    std::vector<double> irf(t_bins), decay(t_bins), clean(t_bins);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = base.split(i);
        const double tau1 = rng.uniform(spec.tau1_range_ns.lo, spec.tau1_range_ns.hi);
        const double tau2 = rng.uniform(spec.tau2_range_ns.lo, spec.tau2_range_ns.hi);
        const double alpha1 = rng.uniform(spec.alpha1_range.lo, spec.alpha1_range.hi);
        const double alpha2 = 1.0 - alpha1;
        double amplitude = spec.amplitude;
        if (spec.amplitude_spread > 1.0) {
            const double span = std::log(spec.amplitude_spread);
            amplitude *= std::exp(rng.uniform(-span, span));
        }
        double fwhm = spec.irf_fwhm_ns;
        if (fwhm > 0.0 && spec.irf_fwhm_spread > 1.0) {
            const double span = std::log(spec.irf_fwhm_spread);
            fwhm *= std::exp(rng.uniform(-span, span));
        }
        double center = static_cast<double>(spec.irf_peak_bin);
        if (spec.irf_peak_jitter_bins > 0.0)
            center += rng.uniform(-spec.irf_peak_jitter_bins, spec.irf_peak_jitter_bins);
        build_irf(center, fwhm, irf);

        for (std::size_t t = 0; t < t_bins; ++t) {
            const double t_ns = static_cast<double>(t) * spec.bin_width_ns;
            decay[t] = amplitude * (alpha1 * std::exp(-t_ns / tau1) +
                                    alpha2 * std::exp(-t_ns / tau2));
        }
        // causal discrete convolution truncated to the histogram window
        for (std::size_t t = 0; t < t_bins; ++t) {
            double acc = 0.0;
            for (std::size_t s = 0; s <= t; ++s) acc += irf[s] * decay[t - s];
            clean[t] = acc + spec.dark_count_rate;
        }

        auto row = ds.x.row(i);
        if (spec.noise == FlimNoise::Poisson) {
            for (std::size_t t = 0; t < t_bins; ++t)
                row[t] = static_cast<double>(rng.poisson(clean[t]));
        } else {
            for (std::size_t t = 0; t < t_bins; ++t) row[t] = clean[t];
        }
        max_normalize_row(row);

        const auto [tau_a, tau_i] = flim_mean_lifetimes(tau1, tau2, alpha1);
        ds.y(i, 0) = tau_a;
        ds.y(i, 1) = tau_i;
    }

    ds.meta.kind = "flim";
    ds.meta.seed = seed;
    ds.meta.n = n;
    auto& f = ds.meta.fields;
    f["n_bins"] = std::to_string(spec.n_bins);
    f["bin_width_ns"] = fmt(spec.bin_width_ns);
    f["tau1_lo"] = fmt(spec.tau1_range_ns.lo);
    f["tau1_hi"] = fmt(spec.tau1_range_ns.hi);
    f["tau2_lo"] = fmt(spec.tau2_range_ns.lo);
    f["tau2_hi"] = fmt(spec.tau2_range_ns.hi);
    f["alpha1_lo"] = fmt(spec.alpha1_range.lo);
    f["alpha1_hi"] = fmt(spec.alpha1_range.hi);
    f["amplitude"] = fmt(spec.amplitude);
    f["amplitude_spread"] = fmt(spec.amplitude_spread);
    f["irf_fwhm_ns"] = fmt(spec.irf_fwhm_ns);
    f["irf_fwhm_spread"] = fmt(spec.irf_fwhm_spread);
    f["irf_peak_bin"] = std::to_string(spec.irf_peak_bin);
    f["irf_peak_jitter_bins"] = fmt(spec.irf_peak_jitter_bins);
    f["noise"] = spec.noise == FlimNoise::Poisson ? "poisson" : "none";
    f["dark_count_rate"] = fmt(spec.dark_count_rate);
    return ds;
}

std::vector<double> dcs_lag_grid(const DcsSpec& spec) {
    require(spec.n_lags >= 2, "dcs: n_lags must be >= 2");
    require(spec.lag_min_s > 0.0 && spec.lag_min_s < spec.lag_max_s, "dcs: bad lag range");
    std::vector<double> lags(spec.n_lags);
    const double ratio = spec.lag_max_s / spec.lag_min_s;
    for (int j = 0; j < spec.n_lags; ++j)
        lags[j] = spec.lag_min_s * std::pow(ratio, static_cast<double>(j) / (spec.n_lags - 1));
    return lags;
}

std::vector<double> dcs_g1_curve(const DcsSpec& spec, double bfi) {
    require(bfi > 0.0, "dcs: bfi must be positive");
    const double mus = spec.mu_s_prime;
    const double mua = spec.mu_a;
    const double k0 = 2.0 * std::numbers::pi * spec.refractive_index /
                      (spec.wavelength_nm * 1e-6);  // mm^-1
    const double z0 = 1.0 / mus;
    const double zb = (2.0 / 3.0) * (1.0 + spec.r_eff) / (1.0 - spec.r_eff) / mus;
    const double r1 = std::hypot(spec.sdd_mm, z0);
    const double rb = std::hypot(spec.sdd_mm, z0 + 2.0 * zb);

    auto green = [&](double tau) {
        const double k = std::sqrt(3.0 * mua * mus + 6.0 * mus * mus * k0 * k0 * bfi * tau);
        return std::exp(-k * r1) / r1 - std::exp(-k * rb) / rb;
    };

    const double g0 = green(0.0);
    const std::vector<double> lags = dcs_lag_grid(spec);
    std::vector<double> g1(lags.size());
    for (std::size_t j = 0; j < lags.size(); ++j) g1[j] = green(lags[j]) / g0;
    return g1;
}

LabeledDataset gen_dcs(const DcsSpec& spec, std::size_t n, std::uint64_t seed) {
    require(spec.beta_range.lo > 0.0 && spec.beta_range.hi <= 1.0 &&
                spec.beta_range.lo <= spec.beta_range.hi,
            "gen_dcs: beta range must lie in (0,1]");
    require(spec.bfi_range.lo > 0.0 && spec.bfi_range.lo <= spec.bfi_range.hi,
            "gen_dcs: bfi range must be positive");

    const std::vector<double> lags = dcs_lag_grid(spec);
    LabeledDataset ds;
    ds.x = Matrix(n, lags.size());
    ds.y = Matrix(n, 2);
    const Rng base(seed);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = base.split(i);
        const double bfi = rng.uniform(spec.bfi_range.lo, spec.bfi_range.hi);
        const double beta = rng.uniform(spec.beta_range.lo, spec.beta_range.hi);
        double noise_level = 1.0;
        if (spec.noise == DcsNoise::LagScaledGaussian && spec.noise_level_spread > 1.0) {
            const double span = std::log(spec.noise_level_spread);
            noise_level = std::exp(rng.uniform(-span, span));
        }
        const std::vector<double> g1 = dcs_g1_curve(spec, bfi);

        auto row = ds.x.row(i);
        for (std::size_t j = 0; j < g1.size(); ++j) {
            double g2 = 1.0 + beta * g1[j] * g1[j];
            if (spec.noise == DcsNoise::LagScaledGaussian) {
                const double sigma =
                    spec.noise_floor + spec.noise_scale * std::sqrt(lags[j] / spec.lag_max_s);
                g2 += noise_level * sigma * rng.normal();
            }
            row[j] = spec.feed_g2_minus_one ? g2 - 1.0 : g2;
        }
        ds.y(i, 0) = bfi * spec.bfi_label_scale;
        ds.y(i, 1) = beta;
    }

    ds.meta.kind = "dcs";
    ds.meta.seed = seed;
    ds.meta.n = n;
    auto& f = ds.meta.fields;
    f["n_lags"] = std::to_string(spec.n_lags);
    f["lag_min_s"] = fmt(spec.lag_min_s);
    f["lag_max_s"] = fmt(spec.lag_max_s);
    f["mu_s_prime"] = fmt(spec.mu_s_prime);
    f["mu_a"] = fmt(spec.mu_a);
    f["wavelength_nm"] = fmt(spec.wavelength_nm);
    f["sdd_mm"] = fmt(spec.sdd_mm);
    f["refractive_index"] = fmt(spec.refractive_index);
    f["r_eff"] = fmt(spec.r_eff);
    f["bfi_lo"] = fmt(spec.bfi_range.lo);
    f["bfi_hi"] = fmt(spec.bfi_range.hi);
    f["beta_lo"] = fmt(spec.beta_range.lo);
    f["beta_hi"] = fmt(spec.beta_range.hi);
    f["bfi_label_scale"] = fmt(spec.bfi_label_scale);
    f["feed_g2_minus_one"] = spec.feed_g2_minus_one ? "1" : "0";
    f["noise"] = spec.noise == DcsNoise::LagScaledGaussian ? "lag_scaled_gaussian" : "none";
    f["noise_floor"] = fmt(spec.noise_floor);
    f["noise_scale"] = fmt(spec.noise_scale);
    f["noise_level_spread"] = fmt(spec.noise_level_spread);
    return ds;
}

LabeledDataset gen_fog_hist(const FogHistSpec& spec, std::size_t n, std::uint64_t seed) {
    require(spec.n_bins >= 1, "gen_fog_hist: n_bins must be >= 1");
    require(spec.n_classes >= 2, "gen_fog_hist: need at least two classes");
    require(spec.signal_to_fog_ratio >= 0.0, "gen_fog_hist: ratio must be >= 0");
    require(spec.peak_width_bins > 0.0, "gen_fog_hist: peak width must be positive");
    // class peak templates must stay inside the histogram
    const double last_center =
        spec.first_peak_bin + spec.peak_step_bins * (spec.n_classes - 1);
    require(last_center + spec.peak_jitter_bins < spec.n_bins,
            "gen_fog_hist: class peaks exceed histogram width");

    const std::size_t bins = static_cast<std::size_t>(spec.n_bins);
    const double signal_amplitude = spec.fog_amplitude * spec.signal_to_fog_ratio;

    LabeledDataset ds;
    ds.x = Matrix(n, bins);
    ds.y = Matrix(n, spec.n_classes);
    const Rng base(seed);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = base.split(i);
        const int cls = static_cast<int>(rng.next_unit() * spec.n_classes);
        const double center = spec.first_peak_bin + spec.peak_step_bins * cls;
        const double pos = rng.uniform(center - spec.peak_jitter_bins,
                                       center + spec.peak_jitter_bins);

        auto row = ds.x.row(i);
        for (std::size_t t = 0; t < bins; ++t) {
            const double z = (static_cast<double>(t) - pos) / spec.peak_width_bins;
            const double clean = signal_amplitude * std::exp(-0.5 * z * z) +
                                 spec.fog_amplitude * std::exp(-spec.fog_tail_rate * t);
            row[t] = spec.poisson_noise ? static_cast<double>(rng.poisson(clean)) : clean;
        }
        max_normalize_row(row);
        ds.y(i, cls) = 1.0;
    }

    ds.meta.kind = "fog";
    ds.meta.seed = seed;
    ds.meta.n = n;
    auto& f = ds.meta.fields;
    f["n_bins"] = std::to_string(spec.n_bins);
    f["n_classes"] = std::to_string(spec.n_classes);
    f["first_peak_bin"] = fmt(spec.first_peak_bin);
    f["peak_step_bins"] = fmt(spec.peak_step_bins);
    f["peak_jitter_bins"] = fmt(spec.peak_jitter_bins);
    f["peak_width_bins"] = fmt(spec.peak_width_bins);
    f["fog_tail_rate"] = fmt(spec.fog_tail_rate);
    f["signal_to_fog_ratio"] = fmt(spec.signal_to_fog_ratio);
    f["fog_amplitude"] = fmt(spec.fog_amplitude);
    f["poisson_noise"] = spec.poisson_noise ? "1" : "0";
    return ds;
}

SplitDataset split(const LabeledDataset& ds, std::size_t n_init) {
    if (n_init > ds.x.rows())
        throw RangeError("split: n_init " + std::to_string(n_init) + " exceeds dataset size " +
                         std::to_string(ds.x.rows()));
    SplitDataset out;
    out.init.x = take_rows(ds.x, 0, n_init);
    out.init.y = take_rows(ds.y, 0, n_init);
    out.stream.x = take_rows(ds.x, n_init, ds.x.rows() - n_init);
    out.stream.y = take_rows(ds.y, n_init, ds.y.rows() - n_init);
    return out;
}

void write_dataset(const std::filesystem::path& prefix, const LabeledDataset& ds) {
    write_matrix(prefix.string() + ".x.mat", ds.x);
    write_matrix(prefix.string() + ".y.mat", ds.y);
    std::ofstream os(prefix.string() + ".meta");
    if (!os) throw IoError("write_dataset: cannot open meta file");
    os << "kind=" << ds.meta.kind << '\n';
    os << "seed=" << ds.meta.seed << '\n';
    os << "n=" << ds.meta.n << '\n';
    for (const auto& [k, v] : ds.meta.fields) os << k << '=' << v << '\n';
    if (!os) throw IoError("write_dataset: stream failure");
}

LabeledDataset read_dataset(const std::filesystem::path& prefix) {
    LabeledDataset ds;
    ds.x = read_matrix(prefix.string() + ".x.mat");
    ds.y = read_matrix(prefix.string() + ".y.mat");
    std::ifstream is(prefix.string() + ".meta");
    if (!is) throw IoError("read_dataset: cannot open meta file");
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "kind")
            ds.meta.kind = val;
        else if (key == "seed")
            ds.meta.seed = std::stoull(val);
        else if (key == "n")
            ds.meta.n = std::stoull(val);
        else
            ds.meta.fields[key] = val;
    }
    return ds;
}

void write_dataset_csv(const std::filesystem::path& prefix, const LabeledDataset& ds) {
    write_matrix_csv(prefix.string() + ".x.csv", ds.x);
    write_matrix_csv(prefix.string() + ".y.csv", ds.y);
}

}  // namespace osos
