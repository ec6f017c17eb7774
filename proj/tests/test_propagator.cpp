#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "sstp/propagator.hpp"

using namespace sstp;
using test::Probe;
using test::branch_average;
using test::reference_action;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

SpinBoson three_modes() {
    ModelParams p;
    p.omega = 0.4;
    p.n_modes = 3;
    return SpinBoson(p, {BathMode{0.6, 0.5, 1.0}, BathMode{1.1, -0.3, 1.0}, BathMode{2.0, 0.8, 1.0}});
}

SpinBoson weak_ohmic(double beta = 1.0) {
    ModelParams p;
    p.xi = 0.007;
    p.beta = beta;
    return SpinBoson::ohmic(p);
}

}  // namespace

TEST_CASE("momentum jump examples") {
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    CHECK((*momentum_jump(Eigen::VectorXd::Constant(1, 2.0), one, 5.0, 1.0))[0] == 3.0);
    CHECK((*momentum_jump(Eigen::VectorXd::Constant(1, -2.0), one, 5.0, 1.0))[0] == -3.0);
    CHECK((*momentum_jump(Eigen::VectorXd::Constant(1, 1.3), one, 0.0, 1.0))[0] == 1.3);
    CHECK_FALSE(momentum_jump(Eigen::VectorXd::Constant(1, 1.0), one, -2.0, 1.0));
    CHECK_THROWS_AS(momentum_jump(one, Eigen::VectorXd::Constant(1, 0.9), 1.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("momentum jump identity") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g(0.0, 1.0);
    int jumps = 0, frustrated = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        Eigen::VectorXd p(4), d(4);
        for (int j = 0; j < 4; ++j) {
            p[j] = 2.0 * g(rng);
            d[j] = g(rng);
        }
        d.normalize();
        const double mass = 0.5 + std::abs(g(rng));
        const double de = 3.0 * g(rng);
        const double along = p.dot(d);
        const auto out = momentum_jump(p, d, de, mass);
        if (along * along + mass * de < 0.0) {
            CHECK_FALSE(out);
            ++frustrated;
            continue;
        }
        REQUIRE(out);
        ++jumps;
        const double along_new = out->dot(d);
        CHECK(std::abs((along_new * along_new - along * along) / (2 * mass) - de / 2) <
              1e-12 * (1.0 + along * along / mass + std::abs(de)));
        const Eigen::VectorXd perp = p - along * d, perp_new = *out - along_new * d;
        CHECK((perp - perp_new).norm() < 1e-12 * (1.0 + p.norm()));
    }
    CHECK(jumps > 1000);
    CHECK(frustrated > 1000);
}

TEST_CASE("single-step expectation equals the first-order transition operator") {
    const SpinBoson m = three_modes();
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::vector<FilterScheme> schemes{FilterScheme::none(), FilterScheme::observable_cut(2.0),
                                            FilterScheme::transition_filter(1e300),
                                            FilterScheme::combined(2.0, 1e300)};
    int frustrated = 0;
    for (const FilterScheme& scheme : schemes) {
        const Propagator prop(m, 0.1, scheme, 4);
        for (int trial = 0; trial < 100; ++trial) {
            TrajectoryState s;
            s.r = Eigen::VectorXd(3);
            s.p = Eigen::VectorXd(3);
            for (int j = 0; j < 3; ++j) {
                s.r[j] = g(rng);
                s.p[j] = g(rng);
            }
            s.gamma = coupling_gamma(s.r, m);
            s.pair = IndexPair{static_cast<Level>(trial % 2), static_cast<Level>((trial / 2) % 2)};
            s.n_hops = trial % 4;
            Probe probe{{{g(rng), g(rng)}, {g(rng), g(rng)}}, Eigen::VectorXd(3)};
            for (int j = 0; j < 3; ++j) probe.u[j] = g(rng);

            const TransitionBranches b = prop.transition_branches(s);
            frustrated += b.n_frustrated;
            CHECK(b.n_gated == 0);
            CHECK_FALSE(b.clamped);
            double total = 0.0;
            for (const TransitionBranch& br : b.view()) total += br.probability;
            CHECK(std::abs(total - 1.0) < 1e-14);

            const double expect = branch_average(prop, s, probe);
            const double ref = reference_action(s, m, 0.1, kInf, probe);
            CHECK(std::abs(expect - ref) < 1e-12 * (1.0 + std::abs(ref)));
        }
    }
    CHECK(frustrated > 0);
}

TEST_CASE("closed gates drop channels without bias") {
    const SpinBoson m = three_modes();
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    int gated = 0;
    for (double ce : {0.01, 0.1, 1.0}) {
        const Propagator prop(m, 0.05, FilterScheme::transition_filter(ce), 8);
        for (int trial = 0; trial < 100; ++trial) {
            TrajectoryState s;
            s.r = Eigen::VectorXd(3);
            s.p = Eigen::VectorXd(3);
            for (int j = 0; j < 3; ++j) {
                s.r[j] = g(rng);
                s.p[j] = 2.0 * g(rng);
            }
            s.gamma = coupling_gamma(s.r, m);
            s.pair = IndexPair{static_cast<Level>(trial % 2), static_cast<Level>((trial / 2) % 2)};
            Probe probe{{{1.0, -0.5}, {0.25, 2.0}}, Eigen::VectorXd::Constant(3, 0.3)};
            gated += prop.transition_branches(s).n_gated;
            const double ref = reference_action(s, m, 0.05, ce, probe);
            CHECK(std::abs(branch_average(prop, s, probe) - ref) < 1e-12 * (1.0 + std::abs(ref)));
        }
    }
    CHECK(gated > 0);
}

TEST_CASE("transition step edge cases") {
    ModelParams p;
    p.n_modes = 1;
    const SpinBoson m(p, {BathMode{1.0, 0.4, 1.0}});
    const Propagator prop(m, 0.1, FilterScheme::none(), 2);
    TrajectoryState s;
    s.r = Eigen::VectorXd::Constant(1, 0.3);
    s.p = Eigen::VectorXd::Zero(1);
    s.gamma = coupling_gamma(s.r, m);

    // zero rate: never hops, weight untouched
    Rng rng = trajectory_rng(0, 0);
    for (int i = 0; i < 100; ++i) {
        const StepOutcome o = prop.transition_step(s, rng);
        CHECK_FALSE(o.hopped);
    }
    CHECK(s.weight == std::complex<double>(1.0, 0.0));

    // max_hops reached: single stay branch, no random draw
    s.p[0] = 3.0;
    s.n_hops = 2;
    const TransitionBranches b = prop.transition_branches(s);
    REQUIRE(b.count == 1);
    CHECK(b.items[0].factor == 1.0);
    CHECK(b.items[0].probability == 1.0);
    Rng a = trajectory_rng(1, 0), c = trajectory_rng(1, 0);
    prop.transition_step(s, a);
    CHECK(a() == c());

    // tau |b| = 1 for a single open channel: P = 1/2, Q = 1/2
    s.n_hops = 0;
    s.pair = {Level::upper, Level::upper};  // downward hops are never frustrated
    s.r[0] = 0.0;
    s.gamma = 0.0;
    const double kappa = std::abs(m.nac_scale(0.0)) * 0.4;  // |d12| at gamma = 0
    s.p[0] = 1.0 / (0.1 * kappa);
    const TransitionBranches two = prop.transition_branches(s);
    CHECK(two.count == 3);
    CHECK(two.items[0].probability == doctest::Approx(0.5));
    CHECK(two.items[1].probability == doctest::Approx(0.25));
}

TEST_CASE("adiabatic phase at a fixed symmetric point") {
    ModelParams p;
    p.omega = 1.0 / 3.0;
    p.n_modes = 1;
    const SpinBoson m(p, {BathMode{1.0, 0.0, 1.0}});
    const Propagator prop(m, 0.01, FilterScheme::none(), 0);
    TrajectoryState s;
    s.r = Eigen::VectorXd::Constant(1, 0.5);
    s.p = Eigen::VectorXd::Constant(1, -0.2);
    s.pair = {Level::upper, Level::lower};
    for (int k = 0; k < 300; ++k) REQUIRE(prop.adiabatic_segment(s));
    const std::complex<double> expect = std::polar(1.0, 2.0 / 3.0 * 3.0);
    CHECK(std::abs(s.weight - expect) < 1e-12);
    CHECK(std::abs(std::abs(s.weight) - 1.0) < 1e-13);

    // tiny step is close to the identity
    const Propagator fine(m, 1e-9, FilterScheme::none(), 0);
    TrajectoryState t;
    t.r = Eigen::VectorXd::Constant(1, 0.5);
    t.p = Eigen::VectorXd::Constant(1, -0.2);
    t.pair = {Level::lower, Level::upper};
    fine.adiabatic_segment(t);
    CHECK(std::abs(t.r[0] - 0.5) < 1e-8);
    CHECK(std::abs(t.p[0] + 0.2) < 1e-8);
    CHECK(std::abs(t.weight - 1.0) < 1e-8);
}

namespace {

struct EnergyTrace {
    double max_dev{0.0};
    double drift{0.0};  // least-squares slope times the run length
};

EnergyTrace energy_trace(const SpinBoson& m, double tau, double t_end, Level l, std::uint64_t seed) {
    const Propagator prop(m, tau, FilterScheme::none(), 0);
    Rng rng = trajectory_rng(seed, 0);
    const BathPoint b = sample_bath(rng, m.params().beta, m);
    TrajectoryState s;
    s.r = b.r;
    s.p = b.p;
    s.pair = {l, l};
    s.gamma = coupling_gamma(s.r, m);
    auto energy = [&] { return surface_eval(s.r, m).energy(l) + s.p.squaredNorm() / (2 * m.mass()); };
    const double e0 = energy();
    const auto n = static_cast<int>(std::lround(t_end / tau));
    EnergyTrace out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 1; k <= n; ++k) {
        REQUIRE(prop.adiabatic_segment(s));
        const double d = energy() - e0, x = k * tau;
        out.max_dev = std::max(out.max_dev, std::abs(d));
        sx += x;
        sy += d;
        sxx += x * x;
        sxy += x * d;
    }
    CHECK(s.weight == std::complex<double>(1.0, 0.0));
    out.drift = (n * sxy - sx * sy) / (n * sxx - sx * sx) * t_end;
    return out;
}

}  // namespace

TEST_CASE("diagonal segments conserve the surface energy") {
    for (double beta : {0.3, 1.0}) {
        const SpinBoson m = weak_ohmic(beta);
        for (Level l : {Level::lower, Level::upper}) {
            const EnergyTrace coarse = energy_trace(m, 0.1, 50.0, l, 3);
            const EnergyTrace fine = energy_trace(m, 0.05, 50.0, l, 3);
            CHECK(std::abs(coarse.drift) < 1e-5);
            // bounded second-order fluctuation
            CHECK(coarse.max_dev < 1e-5 * m.bath_potential(Eigen::VectorXd::Zero(200)) + 2e-3);
            CHECK(coarse.max_dev / fine.max_dev == doctest::Approx(4.0).epsilon(0.25));
        }
    }
}

TEST_CASE("uncoupled trajectories precess at the bare gap") {
    ModelParams p;
    p.omega = 1.0 / 3.0;
    p.n_modes = 10;
    const SpinBoson m = SpinBoson::ohmic(p);
    const Propagator prop(m, 0.1, FilterScheme::none(), 2);
    Rng rng = trajectory_rng(4, 0);
    const BathPoint b = sample_bath(rng, 1.0, m);
    const Eigen::Matrix2cd rho = initial_subsystem_matrix(b.r, m);
    std::vector<std::complex<double>> sum(301);
    for (Level a : {Level::lower, Level::upper}) {
        for (Level ap : {Level::lower, Level::upper}) {
            const InitialDraw d{b.r, b.p, {a, ap}, rho(level_index(ap), level_index(a))};
            const TrajectoryResult r = prop.run_trajectory(d, 300, 1, rng);
            CHECK(r.n_hops == 0);
            CHECK(r.contributions[0] == d.w0 * sigma_z_element(d.pair0, 0.0, m));
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += r.contributions[k];
        }
    }
    for (std::size_t k = 0; k < sum.size(); ++k) {
        CHECK(std::abs(sum[k].real() - std::cos(2.0 * k * 0.1 / 3.0)) < 1e-12);
    }
}

TEST_CASE("trajectory invariants") {
    const SpinBoson m = weak_ohmic(0.3);
    SUBCASE("no hops keeps the weight magnitude") {
        const Propagator prop(m, 0.1, FilterScheme::none(), 0);
        for (std::uint64_t i = 0; i < 20; ++i) {
            Rng rng = trajectory_rng(9, i);
            const InitialDraw d = draw_initial(rng, m);
            const TrajectoryResult r = prop.run_trajectory(d, 100, 1, rng);
            CHECK(r.max_weight == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(r.n_hops == 0);
        }
    }
    SUBCASE("hop budget, weight cap and replay") {
        const double ct = 1.5;
        const Propagator prop(m, 0.1, FilterScheme::combined(ct, 0.005), 2);
        const Propagator open(m, 0.1, FilterScheme::none(), 3);
        for (std::uint64_t i = 0; i < 50; ++i) {
            Rng rng = trajectory_rng(10, i);
            const InitialDraw d = draw_initial(rng, m);
            Rng a = rng, b = rng;
            const TrajectoryResult r = prop.run_trajectory(d, 200, 5, a);
            CHECK(r.n_hops <= 2);
            CHECK(r.max_weight <= ct);
            for (const auto& c : r.contributions) CHECK(std::abs(c) <= std::abs(d.w0) * ct + 1e-12);
            const TrajectoryResult again = prop.run_trajectory(d, 200, 5, b);
            CHECK(again.contributions == r.contributions);
            Rng o = rng;
            CHECK(open.run_trajectory(d, 200, 5, o).n_hops <= 3);
        }
    }
}

TEST_CASE("propagator argument checks") {
    const SpinBoson m = three_modes();
    CHECK_THROWS_AS(Propagator(m, 0.0, FilterScheme::none(), 1), std::invalid_argument);
    CHECK_THROWS_AS(Propagator(m, 0.1, FilterScheme::none(), -1), std::invalid_argument);
    const Propagator prop(m, 0.1, FilterScheme::none(), 1);
    Rng rng = trajectory_rng(0, 0);
    const InitialDraw d = draw_initial(rng, m);
    CHECK_THROWS_AS(prop.run_trajectory(d, 10, 0, rng), std::invalid_argument);
    CHECK(prop.coupling_direction().norm() == doctest::Approx(1.0));
}
