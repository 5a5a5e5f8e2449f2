#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ringres/capacity.hpp"
#include "ringres/rng.hpp"

using namespace ringres;

namespace {

Eigen::VectorXd uniform_drive(Eigen::Index n, std::uint64_t seed, double lo = 0.0,
                              double hi = 0.5) {
    Rng rng(seed);
    Eigen::VectorXd u(n);
    for (auto& x : u) x = rng.uniform(lo, hi);
    return u;
}

// states(n, j) = u(n - 1 - j): a perfect N-tap delay line plus bias column
Eigen::MatrixXd delay_line_states(const Eigen::VectorXd& u, Eigen::Index offset,
                                  Eigen::Index rows, int taps) {
    Eigen::MatrixXd s(rows, taps + 1);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (int j = 0; j < taps; ++j) s(r, j) = u[offset + r - 1 - j];
    s.col(taps).setOnes();
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("capacity");

TEST_CASE("degree-1 target at zero lag is the rescaled drive") {
    const Eigen::VectorXd u = uniform_drive(100, 5);
    const Eigen::VectorXd y = legendre_target(1, 0, u, 10, 50);
    for (int r = 0; r < 50; ++r)
        CHECK(y[r] == doctest::Approx(4.0 * u[10 + r] - 1.0).epsilon(1e-12));
}

TEST_CASE("printed second-degree form evaluates to 2 at the upper edge") {
    Eigen::VectorXd u = Eigen::VectorXd::Constant(20, 0.5);  // rescales to +1
    const Eigen::VectorXd y = legendre_target(2, 3, u, 5, 4);
    for (const double v : y) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("third-degree target vanishes at the midpoint") {
    Eigen::VectorXd u = Eigen::VectorXd::Constant(20, 0.25);  // rescales to 0
    const Eigen::VectorXd y = legendre_target(3, 1, u, 5, 4);
    for (const double v : y) CHECK(v == 0.0);
}

TEST_CASE("raw-input mode skips the rescaling") {
    CapacityOptions opts;
    opts.rescale_input = false;
    Eigen::VectorXd u = Eigen::VectorXd::Constant(10, 0.5);
    const Eigen::VectorXd y = legendre_target(2, 0, u, 2, 3, opts);
    for (const double v : y) CHECK(v == doctest::Approx(3.0 * 0.25 - 1.0).epsilon(1e-12));
}

TEST_CASE("invalid orders and offsets are rejected") {
    const Eigen::VectorXd u = uniform_drive(50, 1);
    CHECK_THROWS_AS(legendre_target(4, 0, u, 10, 5), std::invalid_argument);
    CHECK_THROWS_AS(legendre_target(1, 11, u, 10, 5), std::invalid_argument);
    CHECK_THROWS_AS(legendre_target(1, 0, u, 10, 60), std::invalid_argument);
}

TEST_CASE("legendre family is empirically orthogonal on the rescaled drive") {
    const Eigen::Index n = 100000;
    const Eigen::VectorXd u = uniform_drive(n, 13);
    Eigen::MatrixXd p(n, 3);
    for (int order = 1; order <= 3; ++order)
        p.col(order - 1) = legendre_target(order, 0, u, 0, n);
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            const auto xa = p.col(a).array() - p.col(a).mean();
            const auto xb = p.col(b).array() - p.col(b).mean();
            const double rho = (xa * xb).sum() / std::sqrt(xa.square().sum() * xb.square().sum());
            CHECK(std::abs(rho) < 0.02);
        }
    }
}

TEST_CASE("a memoryless identity reservoir only reconstructs lag zero") {
    const Eigen::VectorXd u = uniform_drive(2400, 21);
    auto states = [&u](Eigen::Index offset, Eigen::Index rows) {
        Eigen::MatrixXd s(rows, 2);
        for (Eigen::Index r = 0; r < rows; ++r) s(r, 0) = u[offset + r];
        s.col(1).setOnes();
        return s;
    };
    const Eigen::MatrixXd st = states(100, 1000);
    const Eigen::MatrixXd se = states(1200, 1000);
    CHECK(capacity(st, se, u, 100, 1200, 1, 0) > 0.999);
    CHECK(capacity(st, se, u, 100, 1200, 1, 1) == 0.0);
    CHECK(capacity(st, se, u, 100, 1200, 1, 7) == 0.0);
}

TEST_CASE("shuffled targets carry no capacity") {
    Eigen::VectorXd u = uniform_drive(2400, 23);
    auto orig = u;
    const Eigen::MatrixXd st = delay_line_states(u, 100, 1000, 10);
    const Eigen::MatrixXd se = delay_line_states(u, 1200, 1000, 10);
    // destroy the temporal relation seen by the targets only
    std::mt19937_64 gen(99);
    for (Eigen::Index i = u.size() - 1; i > 0; --i) {
        const Eigen::Index j = static_cast<Eigen::Index>(gen() % (i + 1));
        std::swap(u[i], u[j]);
    }
    CHECK(capacity(st, se, u, 100, 1200, 1, 3) == 0.0);
    u = orig;
    CHECK(capacity(st, se, u, 100, 1200, 1, 3) > 0.999);
}

TEST_CASE("a perfect delay line saturates the linear capacity and nothing else") {
    const int n = 50;
    const Eigen::VectorXd u = uniform_drive(5400, 29);
    const Eigen::MatrixXd st = delay_line_states(u, 200, 3000, n);
    const Eigen::MatrixXd se = delay_line_states(u, 3400, 2000, n);
    const CapacityReport report = capacity_report(st, se, u, 200, 3400);

    CHECK(report.order_sums[0] == doctest::Approx(50.0).epsilon(0.01));
    CHECK(report.order_sums[1] + report.order_sums[2] < 1.0);
    CHECK(report.total <= 50.5);
    CHECK(report.total == report.order_sums.sum());  // bookkeeping identity
    CHECK(report.curves.minCoeff() >= 0.0);
    CHECK(report.curves.maxCoeff() <= 1.0);
}

TEST_CASE("in-sample capacities dominate held-out capacities on average") {
    Rng rng(43);
    Eigen::VectorXd u = uniform_drive(2400, 41);
    // a leaky delay line with feature noise so nothing is exactly representable
    auto states = [&u, &rng](Eigen::Index off, Eigen::Index rows) {
        Eigen::MatrixXd s(rows, 13);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (int j = 0; j < 12; ++j)
                s(r, j) = 0.8 * u[off + r - 1 - j] + 0.05 * rng.uniform(-1.0, 1.0);
            s(r, 12) = 1.0;
        }
        return s;
    };
    const Eigen::MatrixXd st = states(100, 1000);
    const Eigen::MatrixXd se = states(1200, 1000);
    CapacityOptions opts;
    opts.k_max = 20;
    opts.noise_threshold = 0.0;  // compare raw estimates
    const CapacityReport held_out = capacity_report(st, se, u, 100, 1200, opts);
    const CapacityReport in_sample = capacity_report(st, st, u, 100, 100, opts);
    CHECK(in_sample.total >= held_out.total);
}

TEST_CASE("constant states have zero capacity at every order") {
    const Eigen::VectorXd u = uniform_drive(2400, 31);
    Eigen::MatrixXd st = Eigen::MatrixXd::Ones(1000, 6);
    Eigen::MatrixXd se = Eigen::MatrixXd::Ones(1000, 6);
    st.leftCols(5).setConstant(0.7);
    se.leftCols(5).setConstant(0.7);
    const CapacityReport report = capacity_report(st, se, u, 100, 1200);
    CHECK(report.total == 0.0);
}

TEST_CASE("report curves agree with the single-target entry point") {
    const Eigen::VectorXd u = uniform_drive(2400, 37);
    const Eigen::MatrixXd st = delay_line_states(u, 100, 1000, 8);
    const Eigen::MatrixXd se = delay_line_states(u, 1200, 1000, 8);
    CapacityOptions opts;
    opts.k_max = 6;
    const CapacityReport report = capacity_report(st, se, u, 100, 1200, opts);
    for (const auto& [order, lag] : {std::pair{1, 2}, {2, 1}, {3, 4}}) {
        const double single = capacity(st, se, u, 100, 1200, order, lag, opts);
        CHECK(report.curves(order - 1, lag - 1) == doctest::Approx(single).epsilon(1e-9));
    }
}

TEST_CASE("capacity csv lists curves and per-order summaries") {
    CapacityReport r;
    r.curves.setZero(2, 2);
    r.curves << 1.0, 0.5, 0.25, 0.0;
    r.order_sums.resize(2);
    r.order_sums << 1.5, 0.25;
    r.total = 1.75;
    const std::string csv = r.to_csv();
    CHECK(csv.find("order,k,C\n") == 0);
    CHECK(csv.find("1,1,1\n") != std::string::npos);
    CHECK(csv.find("1,sum,1.5\n") != std::string::npos);
    CHECK(csv.find("total,sum,1.75\n") != std::string::npos);
}

TEST_SUITE_END();
