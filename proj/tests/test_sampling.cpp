#include "doctest.h"

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "sstp/sampling.hpp"

using namespace sstp;

namespace {

SpinBoson single_mode(double freq, double coupling, double beta = 1.0) {
    ModelParams p;
    p.beta = beta;
    p.n_modes = 1;
    return SpinBoson(p, {BathMode{freq, coupling, 1.0}});
}

struct Moments {
    double mean_r = 0, var_r = 0, mean_p = 0, var_p = 0;
};

Moments bath_moments(const SpinBoson& m, double beta, int n, std::uint64_t seed) {
    Rng rng = trajectory_rng(seed, 0);
    double sr = 0, srr = 0, sp = 0, spp = 0;
    for (int i = 0; i < n; ++i) {
        const BathPoint b = sample_bath(rng, beta, m);
        sr += b.r[0];
        srr += b.r[0] * b.r[0];
        sp += b.p[0];
        spp += b.p[0] * b.p[0];
    }
    Moments out;
    out.mean_r = sr / n;
    out.mean_p = sp / n;
    out.var_r = srr / n - out.mean_r * out.mean_r;
    out.var_p = spp / n - out.mean_p * out.mean_p;
    return out;
}

}  // namespace

TEST_CASE("thermal Wigner variances") {
    const SpinBoson m = single_mode(1.0, 0.0);
    const int n = 1000000;
    const Moments mo = bath_moments(m, 1.0, n, 42);
    const double var = 1.0 / (2.0 * std::tanh(0.5));
    CHECK(var == doctest::Approx(1.0820).epsilon(1e-4));
    CHECK(std::abs(mo.var_r - var) < 0.01 * var);
    CHECK(std::abs(mo.var_p - var) < 0.01 * var);
    CHECK(std::abs(mo.mean_r) < 4.0 * std::sqrt(var / n));
    CHECK(std::abs(mo.mean_p) < 4.0 * std::sqrt(var / n));
}

TEST_CASE("low-temperature widths approach the ground state") {
    const SpinBoson m = single_mode(2.0, 0.0);
    const int n = 200000;
    const Moments mo = bath_moments(m, 50.0, n, 9);
    // var R = 1/(2 M w), var P = M w / 2; 4 sigma of a Gaussian variance estimate
    const double tol = 4.0 * std::sqrt(2.0 / n);
    CHECK(std::abs(mo.var_r / 0.25 - 1.0) < tol);
    CHECK(std::abs(mo.var_p / 1.0 - 1.0) < tol);
}

TEST_CASE("every mode gets its own width") {
    ModelParams p;
    p.n_modes = 3;
    const SpinBoson m(p, {BathMode{0.5, 0.1, 1.0}, BathMode{1.5, 0.1, 1.0}, BathMode{3.0, 0.1, 1.0}});
    Rng rng = trajectory_rng(1, 0);
    const int n = 100000;
    Eigen::Array3d srr = Eigen::Array3d::Zero(), spp = Eigen::Array3d::Zero();
    for (int i = 0; i < n; ++i) {
        const BathPoint b = sample_bath(rng, 2.0, m);
        srr += b.r.array().square();
        spp += b.p.array().square();
    }
    const double tol = 4.0 * std::sqrt(2.0 / n);
    for (int j = 0; j < 3; ++j) {
        const double w = m.frequencies()[j];
        const double t = std::tanh(w);
        CHECK(std::abs(srr[j] / n * 2.0 * w * t - 1.0) < tol);
        CHECK(std::abs(spp[j] / n * 2.0 * t / w - 1.0) < tol);
    }
}

TEST_CASE("trajectory streams are deterministic and distinct") {
    Rng a = trajectory_rng(7, 3), b = trajectory_rng(7, 3), c = trajectory_rng(7, 4),
        d = trajectory_rng(8, 3);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
    Rng u = trajectory_rng(0, 0);
    for (int i = 0; i < 1000; ++i) {
        const double v = uniform01(u);
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("initial subsystem matrix") {
    const SpinBoson m = single_mode(1.0, 0.4);
    const Eigen::Matrix2cd at0 = initial_subsystem_matrix(Eigen::VectorXd::Zero(1), m);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) CHECK(std::abs(at0(i, j)) == doctest::Approx(0.5));
    }

    // large positive gamma: |up> becomes the lower adiabatic state
    const Eigen::Matrix2cd far = initial_subsystem_matrix(Eigen::VectorXd::Constant(1, 1e8), m);
    CHECK(far(0, 0).real() == doctest::Approx(1.0));
    CHECK(std::abs(far(1, 1)) < 1e-12);

    Rng rng = trajectory_rng(3, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd r = Eigen::VectorXd::Constant(1, 4.0 * (uniform01(rng) - 0.5));
        const Eigen::Matrix2cd rho = initial_subsystem_matrix(r, m);
        CHECK((rho - rho.adjoint()).norm() < 1e-14);
        CHECK(std::abs(rho.trace() - 1.0) < 1e-14);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho);
        CHECK(es.eigenvalues()[0] > -1e-14);
        CHECK(std::abs(es.eigenvalues()[0]) < 1e-14);  // rank 1
        const Eigen::Vector2d up = test::eig2(r, m).u.row(0).transpose();
        CHECK((rho.real() - up * up.transpose()).norm() < 1e-12);
    }
}

TEST_CASE("pair sum reproduces the initial population exactly") {
    const SpinBoson m = single_mode(0.8, 0.6);
    Rng rng = trajectory_rng(5, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const BathPoint b = sample_bath(rng, 1.0, m);
        const Eigen::Matrix2cd rho = initial_subsystem_matrix(b.r, m);
        const double g = coupling_gamma(b.r, m);
        std::complex<double> sum = 0.0;
        for (Level a : {Level::lower, Level::upper}) {
            for (Level ap : {Level::lower, Level::upper}) {
                const std::complex<double> w0 = 4.0 * rho(level_index(ap), level_index(a));
                sum += 0.25 * w0 * sigma_z_element({a, ap}, g, m);
            }
        }
        CHECK(std::abs(sum - 1.0) < 1e-14);
    }
}

TEST_CASE("draw_initial: uniform pairs and unbiased initial estimate") {
    const SpinBoson m = single_mode(1.0, 0.3, 3.0);
    Rng rng = trajectory_rng(11, 0);
    const int n = 100000;
    std::array<int, 4> counts{};
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
        const InitialDraw d = draw_initial(rng, m);
        ++counts[2 * level_index(d.pair0.alpha) + level_index(d.pair0.alpha_prime)];
        const Eigen::Matrix2cd rho = initial_subsystem_matrix(d.r0, m);
        CHECK(d.w0 == 4.0 * rho(level_index(d.pair0.alpha_prime), level_index(d.pair0.alpha)));
        CHECK(std::abs(d.w0) <= 4.0);
        const double x = (d.w0 * sigma_z_element(d.pair0, coupling_gamma(d.r0, m), m)).real();
        s += x;
        ss += x * x;
    }
    for (int c : counts) CHECK(std::abs(c - n / 4.0) < 4.0 * std::sqrt(n * 0.25 * 0.75));
    const double mean = s / n;
    const double se = std::sqrt((ss / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) < 4.0 * se);
}
