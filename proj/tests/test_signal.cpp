#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "oracles.hpp"
#include "osos/metrics.hpp"
#include "osos/signal.hpp"

using namespace osos;

TEST_CASE("flim mean lifetimes: closed-form weighted means") {
    const auto [tau_a, tau_i] = flim_mean_lifetimes(1.0, 3.0, 0.5);
    CHECK(tau_a == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(tau_i == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("flim: delta IRF mono-exponential is a geometric decay") {
    FlimDecaySpec spec;
    spec.tau1_range_ns = {1.0, 1.0};
    spec.alpha1_range = {1.0, 1.0};
    spec.irf_fwhm_ns = 0.0;  // delta
    spec.irf_peak_bin = 0;
    spec.irf_peak_jitter_bins = 0.0;
    spec.noise = FlimNoise::None;
    spec.dark_count_rate = 0.0;

    const LabeledDataset ds = gen_flim(spec, 1, 5);
    const auto row = ds.x.row(0);
    const double ratio = std::exp(-spec.bin_width_ns / 1.0);
    for (std::size_t t = 0; t + 1 < 40; ++t)
        CHECK(row[t + 1] / row[t] == doctest::Approx(ratio).epsilon(1e-12));
    // histogram rows are max-normalized
    CHECK(*std::max_element(row.begin(), row.end()) == 1.0);
}

TEST_CASE("flim labels: tau_a < tau_i for distinct components, total counts scale with amplitude") {
    FlimDecaySpec spec;
    spec.noise = FlimNoise::None;
    spec.dark_count_rate = 0.0;
    const LabeledDataset ds = gen_flim(spec, 200, 11);
    for (std::size_t i = 0; i < ds.y.rows(); ++i) CHECK(ds.y(i, 0) <= ds.y(i, 1) + 1e-12);

    // linearity in amplitude on the un-normalized decay: compare two
    // amplitudes through the noiseless generator's raw sums via labels
    // being identical and peak-normalized rows matching
    FlimDecaySpec doubled = spec;
    doubled.amplitude = 2.0 * spec.amplitude;
    const LabeledDataset ds2 = gen_flim(doubled, 50, 11);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(ds2.y(i, 0) == ds.y(i, 0));
        for (std::size_t t = 0; t < ds.x.cols(); ++t)
            CHECK(ds2.x(i, t) == doctest::Approx(ds.x(i, t)).epsilon(1e-12));
    }
}

TEST_CASE("flim: log-linear fit oracle recovers drawn lifetimes to 1% median error") {
    FlimDecaySpec spec;
    spec.alpha1_range = {1.0, 1.0};  // mono-exponential draws over tau1's range
    spec.noise = FlimNoise::None;
    spec.dark_count_rate = 0.0;

    const std::size_t n = 1000;
    const LabeledDataset ds = gen_flim(spec, n, 77);
    std::vector<double> rel_err;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = ds.x.row(i);
        const std::size_t peak =
            std::max_element(row.begin(), row.end()) - row.begin();
        const double tau_fit =
            oracles::loglin_lifetime(row, peak + 8, ds.x.cols(), spec.bin_width_ns);
        const double tau_true = ds.y(i, 0);  // mono: tau_a == tau1
        rel_err.push_back(std::fabs(tau_fit - tau_true) / tau_true);
    }
    std::nth_element(rel_err.begin(), rel_err.begin() + n / 2, rel_err.end());
    CHECK(rel_err[n / 2] < 0.01);
}

TEST_CASE("dcs: g1 is strictly decreasing and the limits behave") {
    DcsSpec spec;
    spec.noise = DcsNoise::None;

    for (double bfi : {1e-6, 5e-6, 1e-5}) {
        const auto g1 = dcs_g1_curve(spec, bfi);
        for (std::size_t j = 0; j + 1 < g1.size(); ++j) CHECK(g1[j + 1] < g1[j]);
        CHECK(g1.front() <= 1.0);
        CHECK(g1.back() < 1e-3);  // decorrelation at the longest lag
    }

    // tau -> 0 limit: with slow enough dynamics the first lag sits at
    // 1 + beta (the default BFi range decorrelates measurably by 1e-7 s,
    // so probe the limit where it holds)
    DcsSpec slow = spec;
    slow.bfi_range = {2e-7, 2e-7};
    slow.beta_range = {0.5, 0.5};
    slow.feed_g2_minus_one = false;
    const LabeledDataset ds = gen_dcs(slow, 1, 3);
    CHECK(ds.x(0, 0) == doctest::Approx(1.5).epsilon(1e-3));
    CHECK(ds.x(0, ds.x.cols() - 1) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("dcs: beta recoverable from noiseless curves") {
    DcsSpec spec;
    spec.noise = DcsNoise::None;
    spec.bfi_range = {2e-7, 2e-7};
    spec.feed_g2_minus_one = false;
    const LabeledDataset ds = gen_dcs(spec, 20, 9);
    for (std::size_t i = 0; i < ds.x.rows(); ++i) {
        const double beta = ds.y(i, 1);
        CHECK(std::fabs((ds.x(i, 0) - 1.0) - beta) < 1e-3);
    }
}

TEST_CASE("dcs: increasing BFi strictly speeds decay (half-decay lag)") {
    DcsSpec spec;
    auto half_idx = [&](double bfi) {
        const auto g1 = dcs_g1_curve(spec, bfi);
        for (std::size_t j = 0; j < g1.size(); ++j)
            if (g1[j] < 0.5) return j;
        return g1.size();
    };
    std::size_t prev = half_idx(1e-6);
    for (double bfi : {2e-6, 4e-6, 8e-6}) {
        const std::size_t idx = half_idx(bfi);
        CHECK(idx + 1 <= prev);  // strictly earlier up to one-lag grid resolution
        prev = idx;
    }
}

TEST_CASE("dcs labels carry the configured scale") {
    DcsSpec spec;
    spec.noise = DcsNoise::None;
    const LabeledDataset ds = gen_dcs(spec, 10, 4);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(ds.y(i, 0) >= spec.bfi_range.lo * spec.bfi_label_scale);
        CHECK(ds.y(i, 0) <= spec.bfi_range.hi * spec.bfi_label_scale);
        CHECK(ds.y(i, 1) >= spec.beta_range.lo);
        CHECK(ds.y(i, 1) <= spec.beta_range.hi);
    }
}

TEST_CASE("fog: noiseless peaks land inside their class window") {
    FogHistSpec spec;
    spec.signal_to_fog_ratio = 1e9;  // effectively zero fog
    spec.poisson_noise = false;
    const LabeledDataset ds = gen_fog_hist(spec, 200, 13);
    for (std::size_t i = 0; i < ds.x.rows(); ++i) {
        const std::size_t cls = argmax_row(ds.y, i);
        const std::size_t peak = argmax_row(ds.x, i);
        const double center = spec.first_peak_bin + spec.peak_step_bins * cls;
        CHECK(std::fabs(static_cast<double>(peak) - center) <=
              spec.peak_jitter_bins + 1.0);
    }
}

TEST_CASE("fog: zero signal makes classes statistically indistinguishable") {
    FogHistSpec spec;
    spec.signal_to_fog_ratio = 0.0;
    const LabeledDataset ds = gen_fog_hist(spec, 1200, 17);

    // peak-region mass for class 0's window, compared between class 0
    // and class 1 samples
    auto window_mass = [&](std::size_t i) {
        const double center = spec.first_peak_bin;
        double mass = 0.0;
        for (int t = static_cast<int>(center) - 2; t <= static_cast<int>(center) + 2; ++t)
            mass += ds.x(i, static_cast<std::size_t>(t));
        return mass;
    };
    std::vector<double> class0, class1;
    for (std::size_t i = 0; i < ds.x.rows(); ++i) {
        const std::size_t cls = argmax_row(ds.y, i);
        if (cls == 0) class0.push_back(window_mass(i));
        if (cls == 1) class1.push_back(window_mass(i));
    }
    CHECK(oracles::ks_two_sample_p(class0, class1) > 0.01);
}

TEST_CASE("fog: default set is learnable by a nearest-centroid oracle") {
    FogHistSpec spec;
    const LabeledDataset ds = gen_fog_hist(spec, 8000, 19);
    const std::size_t n_train = 6000;
    std::vector<std::size_t> train_cls, test_cls;
    for (std::size_t i = 0; i < n_train; ++i) train_cls.push_back(argmax_row(ds.y, i));
    for (std::size_t i = n_train; i < ds.x.rows(); ++i) test_cls.push_back(argmax_row(ds.y, i));
    const double acc = oracles::nearest_centroid_accuracy(
        take_rows(ds.x, 0, n_train), train_cls, take_rows(ds.x, n_train, ds.x.rows() - n_train),
        test_cls, spec.n_classes);
    CHECK(acc > 0.80);
}

TEST_CASE("generation is bit-reproducible from (spec, n, seed)") {
    FlimDecaySpec fspec;
    CHECK(gen_flim(fspec, 20, 123).x == gen_flim(fspec, 20, 123).x);
    DcsSpec dspec;
    CHECK(gen_dcs(dspec, 20, 123).x == gen_dcs(dspec, 20, 123).x);
    FogHistSpec gspec;
    CHECK(gen_fog_hist(gspec, 20, 123).x == gen_fog_hist(gspec, 20, 123).x);

    // different seeds differ
    CHECK(gen_flim(fspec, 20, 123).x != gen_flim(fspec, 20, 124).x);
}

TEST_CASE("split: sizes, empty stream, range error") {
    FogHistSpec spec;
    const LabeledDataset ds = gen_fog_hist(spec, 100, 7);

    const SplitDataset parts = split(ds, 30);
    CHECK(parts.init.x.rows() == 30);
    CHECK(parts.stream.x.rows() == 70);

    const SplitDataset all_init = split(ds, 100);
    CHECK(all_init.stream.x.rows() == 0);

    CHECK_THROWS_AS(split(ds, 101), RangeError);
}

TEST_CASE("dataset files round trip with metadata") {
    DcsSpec spec;
    const LabeledDataset ds = gen_dcs(spec, 15, 31);
    const auto prefix = std::filesystem::temp_directory_path() / "osos_test_ds";
    write_dataset(prefix, ds);
    const LabeledDataset back = read_dataset(prefix);
    CHECK(back.x == ds.x);
    CHECK(back.y == ds.y);
    CHECK(back.meta.kind == "dcs");
    CHECK(back.meta.seed == 31);
    CHECK(back.meta.fields.at("sdd_mm") == ds.meta.fields.at("sdd_mm"));
    for (const char* suffix : {".x.mat", ".y.mat", ".meta"})
        std::filesystem::remove(prefix.string() + suffix);
}
