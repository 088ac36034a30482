#include <catch2/catch_amalgamated.hpp>

#include "ncs/estimator.hpp"

using namespace ncs;

namespace {

PlantModel scalar_model(double a, double b) {
    PlantModel m;
    m.A = Matrix::Constant(1, 1, a);
    m.B = Matrix::Constant(1, 1, b);
    m.W = Matrix::Constant(1, 1, 0.001);
    m.R0 = m.W;
    return m;
}

}  // namespace

TEST_CASE("propagate: scalar hand arithmetic") {
    auto m = scalar_model(1.15, 0.1);
    ControllerEstimator est(m, Vector::Constant(1, 1.0));
    est.propagate(Vector::Constant(1, -1.0));
    CHECK(est.estimate()[0] == Catch::Approx(1.05));
}

TEST_CASE("two propagations equal the Delta = 2 closed form") {
    auto m = scalar_model(1.15, 0.1);
    Vector x0 = Vector::Constant(1, 0.7);
    ControllerEstimator est(m, x0);
    Vector u0 = Vector::Constant(1, 0.3), u1 = Vector::Constant(1, -0.2);
    est.propagate(u0);
    est.propagate(u1);
    Vector closed = m.A * m.A * x0 + m.A * m.B * u0 + m.B * u1;
    CHECK((est.estimate() - closed).norm() < 1e-12);
}

TEST_CASE("rebase") {
    auto m = scalar_model(1.15, 0.1);

    SECTION("tau = 0 adopts the payload exactly") {
        ControllerEstimator est(m, Vector::Constant(1, 5.0));
        est.rebase(Packet{0, Vector::Constant(1, 2.0)}, 0);
        CHECK(est.estimate()[0] == 2.0);
    }

    SECTION("tau = 2 with zero controls: A^2 x_s") {
        ControllerEstimator est(m, Vector::Constant(1, 0.0));
        est.propagate(Vector::Zero(1));
        est.propagate(Vector::Zero(1));
        est.rebase(Packet{0, Vector::Constant(1, 1.0)}, 2);
        CHECK(est.estimate()[0] == Catch::Approx(1.3225));
    }

    SECTION("tau = 1 with one control") {
        ControllerEstimator est(m, Vector::Constant(1, 2.0));
        est.propagate(Vector::Constant(1, 1.0));
        est.rebase(Packet{0, Vector::Constant(1, 2.0)}, 1);
        CHECK(est.estimate()[0] == Catch::Approx(2.4));  // 1.15*2 + 0.1*1
    }

    SECTION("stale packet rejected") {
        ControllerEstimator est(m, Vector::Constant(1, 0.0));
        est.propagate(Vector::Zero(1));
        est.propagate(Vector::Zero(1));
        est.rebase(Packet{2, Vector::Constant(1, 1.0)}, 2);
        CHECK_THROWS_AS(est.rebase(Packet{1, Vector::Constant(1, 1.0)}, 2), std::logic_error);
    }

    SECTION("control log must cover the packet age") {
        ControllerEstimator est(m, Vector::Constant(1, 0.0));
        CHECK_THROWS_AS(est.rebase(Packet{0, Vector::Constant(1, 1.0)}, 3), std::logic_error);
    }
}

TEST_CASE("estimation error and noise reconstruction on a simulated trace") {
    auto m = scalar_model(1.15, 0.1);
    std::mt19937_64 rng(5);
    GaussianSampler noise(m.W);

    StateVector x{Vector::Constant(1, 0.4), 0};
    ControllerEstimator est(m, x.x);
    TriggerInfo info(m);
    info.record_state(x.x);

    std::vector<Vector> injected;
    for (int k = 0; k < 40; ++k) {
        Vector u = Vector::Constant(1, -0.1 * est.estimate()[0]);
        Vector w = noise.sample(rng);
        injected.push_back(w);
        x = step_plant(m, x, u, w);
        info.record_control(u);
        info.record_state(x.x);
        est.propagate(u);
    }

    SECTION("reconstructed noise equals injected noise elementwise") {
        for (int t = 0; t < 40; ++t)
            CHECK((info.noise_at(t) - injected[static_cast<std::size_t>(t)]).norm() < 1e-12);
    }

    SECTION("error equals the noise accumulation sum") {
        // never rebased, so Delta_k = k
        Vector e = est.error(x.x);
        Vector acc = Vector::Zero(1);
        Matrix Ar = Matrix::Identity(1, 1);
        for (int r = 1; r <= 40; ++r) {
            acc += Ar * injected[static_cast<std::size_t>(40 - r)];
            Ar = m.A * Ar;
        }
        CHECK((e - acc).norm() < 1e-9 * std::max(1.0, acc.norm()));
    }

    SECTION("noiseless runs reconstruct zero") {
        TriggerInfo clean(m);
        StateVector y{Vector::Constant(1, 1.0), 0};
        clean.record_state(y.x);
        for (int k = 0; k < 5; ++k) {
            Vector u = Vector::Constant(1, 0.2);
            y = step_plant(m, y, u, Vector::Zero(1));
            clean.record_control(u);
            clean.record_state(y.x);
        }
        for (int t = 0; t < 5; ++t) CHECK(clean.noise_at(t).norm() < 1e-15);
    }

    SECTION("out-of-range reconstruction throws") {
        CHECK_THROWS_AS(info.noise_at(40), std::out_of_range);
        CHECK_THROWS_AS(info.noise_at(-1), std::out_of_range);
    }
}

TEST_CASE("decision-parameterized error recursion") {
    // skip: e_{k+1} = A e_k + w_k ; delivery after tau steps: e = sum_{r<=tau} A^{r-1} w
    auto m = scalar_model(1.15, 0.1);
    std::mt19937_64 rng(9);
    GaussianSampler noise(m.W);
    const int tau = 2;

    StateVector x{Vector::Constant(1, 0.0), 0};
    ControllerEstimator est(m, x.x);
    std::vector<Vector> w_log, x_log{x.x};
    Vector e_prev = Vector::Zero(1);
    for (int k = 0; k < 10; ++k) {
        Vector u = Vector::Zero(1);
        Vector w = noise.sample(rng);
        w_log.push_back(w);
        x = step_plant(m, x, u, w);
        x_log.push_back(x.x);
        est.propagate(u);
        Vector e = est.error(x.x);
        CHECK((e - (m.A * e_prev + w)).norm() < 1e-12);
        e_prev = e;
    }
    // a delivery of the true x_{10-tau} leaves exactly tau noise terms
    est.rebase(Packet{10 - tau, x_log[10 - tau]}, 10);
    Vector expected = Vector::Zero(1);
    Matrix Ar = Matrix::Identity(1, 1);
    for (int r = 1; r <= tau; ++r) {
        expected += Ar * w_log[static_cast<std::size_t>(10 - r)];
        Ar = m.A * Ar;
    }
    CHECK((est.error(x.x) - expected).norm() < 1e-12);
}
