#include <doctest.h>

#include <cmath>

#include "osos/metrics.hpp"
#include "osos/rng.hpp"

using namespace osos;

TEST_CASE("perfect predictions: zero error, identity confusion") {
    Matrix truth(4, 3);
    truth(0, 0) = 1;
    truth(1, 1) = 1;
    truth(2, 2) = 1;
    truth(3, 1) = 1;

    const MetricsReport reg = compute_metrics(truth, truth, Task::Regression);
    for (double v : reg.mae) CHECK(v == 0.0);
    for (double v : reg.mse) CHECK(v == 0.0);

    const MetricsReport cls = compute_metrics(truth, truth, Task::Classification);
    CHECK(cls.accuracy == 1.0);
    for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t p = 0; p < 3; ++p)
            if (t != p) CHECK(cls.confusion[t * 3 + p] == 0);
    for (double a : cls.auc) CHECK(a == 1.0);
}

TEST_CASE("hand-built 3-sample confusion matrix") {
    Matrix truth(3, 2);
    truth(0, 0) = 1;  // class 0
    truth(1, 1) = 1;  // class 1
    truth(2, 1) = 1;  // class 1
    Matrix pred(3, 2);
    pred(0, 1) = 1;   // predicted 1 (wrong)
    pred(1, 1) = 1;   // predicted 1 (right)
    pred(2, 0) = 1;   // predicted 0 (wrong)

    const MetricsReport m = compute_metrics(pred, truth, Task::Classification);
    CHECK(m.confusion[0 * 2 + 1] == 1);
    CHECK(m.confusion[1 * 2 + 1] == 1);
    CHECK(m.confusion[1 * 2 + 0] == 1);
    CHECK(m.confusion[0 * 2 + 0] == 0);
    CHECK(m.accuracy == doctest::Approx(1.0 / 3.0));

    // row sums equal per-class truth counts
    CHECK(m.confusion[0] + m.confusion[1] == 1);
    CHECK(m.confusion[2] + m.confusion[3] == 2);
}

TEST_CASE("random scores give AUC near 0.5") {
    Rng rng(2025);
    const std::size_t n = 10000;
    Matrix pred(n, 2), truth(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        pred(i, 0) = rng.next_unit();
        pred(i, 1) = rng.next_unit();
        truth(i, rng.next_unit() < 0.5 ? 0 : 1) = 1.0;
    }
    const MetricsReport m = compute_metrics(pred, truth, Task::Classification);
    CHECK(std::fabs(m.auc[0] - 0.5) < 0.05);
    CHECK(std::fabs(m.auc[1] - 0.5) < 0.05);
    CHECK(m.auc[0] >= 0.0);
    CHECK(m.auc[0] <= 1.0);
}

TEST_CASE("separable scores give AUC 1") {
    Matrix pred(4, 2), truth(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        const bool pos = i < 2;
        truth(i, pos ? 0 : 1) = 1.0;
        pred(i, 0) = pos ? 0.9 + 0.01 * i : 0.1 + 0.01 * i;
        pred(i, 1) = 1.0 - pred(i, 0);
    }
    const MetricsReport m = compute_metrics(pred, truth, Task::Classification);
    CHECK(m.auc[0] == 1.0);
    CHECK(m.auc[1] == 1.0);
}

TEST_CASE("shape mismatch throws") {
    CHECK_THROWS_AS(compute_metrics(Matrix(2, 2), Matrix(3, 2), Task::Regression),
                    DimensionError);
}

TEST_CASE("regression MAE/MSE per output") {
    Matrix truth(2, 2, {1.0, 10.0, 3.0, 20.0});
    Matrix pred(2, 2, {2.0, 10.0, 1.0, 24.0});
    const MetricsReport m = compute_metrics(pred, truth, Task::Regression);
    CHECK(m.mae[0] == doctest::Approx(1.5));
    CHECK(m.mae[1] == doctest::Approx(2.0));
    CHECK(m.mse[0] == doctest::Approx(2.5));
    CHECK(m.mse[1] == doctest::Approx(8.0));
}
