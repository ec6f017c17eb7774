// propagator.cpp

#include "sstp/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sstp {

namespace {

constexpr double kMaxHopProbability = 1.0 - 1e-12;

// Sign of the spin part of the force on surface l: F_l = -M w^2 R + s_l c gamma/lambda.
constexpr double force_sign(Level l) noexcept { return l == Level::lower ? 1.0 : -1.0; }

}  // namespace

bool apply_momentum_jump(Eigen::VectorXd& p, const Eigen::VectorXd& d_hat, double delta_e,
                         double mass) {
    if (p.size() != d_hat.size()) throw std::invalid_argument("p and d_hat differ in length");
    const double along = p.dot(d_hat);
    const double radicand = along * along + mass * delta_e;
    if (radicand < 0.0) return false;
    const double along_new = std::copysign(std::sqrt(radicand), along);
    p += (along_new - along) * d_hat;
    return true;
}

std::optional<Eigen::VectorXd> momentum_jump(const Eigen::VectorXd& p, const Eigen::VectorXd& d_hat,
                                             double delta_e, double mass) {
    if (std::abs(d_hat.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("momentum_jump: d_hat must be a unit vector");
    }
    Eigen::VectorXd out = p;
    if (!apply_momentum_jump(out, d_hat, delta_e, mass)) return std::nullopt;
    return out;
}

Propagator::Propagator(SpinBoson model, double tau, FilterScheme scheme, int max_hops)
    : model_(std::move(model)), tau_(tau), scheme_(scheme), max_hops_(max_hops) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be > 0");
    if (max_hops < 0) throw std::invalid_argument("max_hops must be >= 0");
    const auto n = static_cast<Eigen::Index>(model_.size());
    d_hat_ = Eigen::VectorXd::Zero(n);
    if (model_.coupling_norm() > 0.0) d_hat_ = model_.couplings() / model_.coupling_norm();
    rot_cos_.resize(n);
    rot_sin_over_mw_.resize(n);
    rot_mw_sin_.resize(n);
    const double m = model_.mass();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double w = model_.frequencies()[j];
        rot_cos_[j] = std::cos(w * tau_);
        rot_sin_over_mw_[j] = std::sin(w * tau_) / (m * w);
        rot_mw_sin_[j] = m * w * std::sin(w * tau_);
    }
}

TrajectoryState Propagator::start(const InitialDraw& draw) const {
    TrajectoryState s;
    s.r = draw.r0;
    s.p = draw.p0;
    s.pair = draw.pair0;
    s.gamma = coupling_gamma(s.r, model_);
    return s;
}

bool Propagator::adiabatic_segment(TrajectoryState& s) const {
    const double mean_sign = 0.5 * (force_sign(s.pair.alpha) + force_sign(s.pair.alpha_prime));
    const double bohr_sign = -(force_sign(s.pair.alpha) - force_sign(s.pair.alpha_prime));
    const double half = 0.5 * tau_;
    const auto& c = model_.couplings();

    const double lambda_old = model_.half_gap(s.gamma);
    if (mean_sign != 0.0) s.p += (half * mean_sign * s.gamma / lambda_old) * c;

    // exact free-oscillator flow
    const Eigen::ArrayXd r0 = s.r.array();
    s.r = (r0 * rot_cos_.array() + s.p.array() * rot_sin_over_mw_.array()).matrix();
    s.p = (s.p.array() * rot_cos_.array() - r0 * rot_mw_sin_.array()).matrix();

    s.gamma = c.dot(s.r);
    const double lambda_new = model_.half_gap(s.gamma);
    if (mean_sign != 0.0) s.p += (half * mean_sign * s.gamma / lambda_new) * c;

    if (bohr_sign != 0.0) {
        const double phase = half * bohr_sign * (lambda_old + lambda_new);
        s.weight *= std::polar(1.0, phase);
    }
    s.time += tau_;
    return std::isfinite(s.gamma) && std::isfinite(s.weight.real()) &&
           std::isfinite(s.weight.imag());
}

TransitionBranches Propagator::transition_branches(const TrajectoryState& s) const {
    TransitionBranches out;
    const TransitionBranch stay_unchanged{1.0, 1.0, s.pair, false, 0.0};
    if (s.n_hops >= max_hops_ || model_.coupling_norm() == 0.0) {
        out.items[0] = stay_unchanged;
        out.count = 1;
        return out;
    }
    const double m = model_.mass();
    const double lambda = model_.half_gap(s.gamma);
    const double p_along = s.p.dot(d_hat_);
    // (P/M).d_12
    const double rate12 = model_.nac_scale(s.gamma) * model_.coupling_norm() * p_along / m;

    struct Channel { IndexPair target; double rate; double delta_e; };
    auto channel_for = [&](Level from, IndexPair target) {
        const bool up = from == Level::lower;
        return Channel{target, up ? rate12 : -rate12, up ? -2.0 * lambda : 2.0 * lambda};
    };
    const std::array<Channel, 2> channels{
        channel_for(s.pair.alpha, IndexPair{other(s.pair.alpha), s.pair.alpha_prime}),
        channel_for(s.pair.alpha_prime, IndexPair{s.pair.alpha, other(s.pair.alpha_prime)}),
    };

    const auto energy_cap = scheme_.energy_cap();
    std::array<const Channel*, 2> open{};
    std::size_t n_open = 0;
    for (const Channel& ch : channels) {
        if (p_along * p_along + m * ch.delta_e < 0.0) {
            ++out.n_frustrated;
            continue;
        }
        if (energy_cap &&
            energy_gate(*energy_cap, virtual_energy_fluctuation(p_along, ch.delta_e, m)) == 0) {
            ++out.n_gated;
            continue;
        }
        open[n_open++] = &ch;
    }

    HopProbabilities prob = basic_probabilities(tau_, n_open > 0 ? rate12 : 0.0);
    if (prob.hop > kMaxHopProbability) {
        prob = {kMaxHopProbability, 1.0 - kMaxHopProbability};
        out.clamped = true;
    }
    out.items[0] = TransitionBranch{prob.stay, 1.0 / prob.stay, s.pair, false, 0.0};
    out.count = 1;
    if (prob.hop > 0.0) {
        const double n = static_cast<double>(n_open);
        for (std::size_t k = 0; k < n_open; ++k) {
            const Channel& ch = *open[k];
            out.items[out.count++] = TransitionBranch{prob.hop / n, tau_ * ch.rate * n / prob.hop,
                                                      ch.target, true, ch.delta_e};
        }
    }
    return out;
}

StepOutcome Propagator::apply_branch(TrajectoryState& s, const TransitionBranch& branch) const {
    StepOutcome outcome;
    outcome.new_pair = s.pair;
    s.weight *= branch.factor;
    if (!branch.hop) return outcome;
    if (!apply_momentum_jump(s.p, d_hat_, branch.delta_e, model_.mass())) {
        throw std::logic_error("apply_branch: frustrated channel offered as a hop branch");
    }
    s.pair = branch.target;
    ++s.n_hops;
    outcome.hopped = true;
    outcome.jump_applied = true;
    outcome.new_pair = s.pair;
    return outcome;
}

StepOutcome Propagator::transition_step(TrajectoryState& s, Rng& rng) const {
    if (s.n_hops >= max_hops_) return StepOutcome{false, s.pair, false, false, false};
    const double u = uniform01(rng);
    const TransitionBranches b = transition_branches(s);
    const std::size_t n_hop = b.count - 1;
    const double p_hop = 1.0 - b.items[0].probability;
    std::size_t pick = 0;
    if (n_hop > 0 && u < p_hop) {
        const auto k = static_cast<std::size_t>(u / p_hop * static_cast<double>(n_hop));
        pick = 1 + std::min(k, n_hop - 1);
    }
    StepOutcome outcome = apply_branch(s, b.items[pick]);
    outcome.frustrated = !outcome.hopped && b.n_frustrated > 0;
    outcome.clamped = b.clamped;
    return outcome;
}

std::complex<double> Propagator::contribution(const TrajectoryState& s,
                                              std::complex<double> w0) const noexcept {
    return w0 * s.weight * sigma_z_element(s.pair, s.gamma, model_);
}

void Propagator::run_trajectory(const InitialDraw& draw, std::size_t n_steps, std::size_t stride,
                                Rng& rng, TrajectoryResult& out) const {
    if (stride == 0) throw std::invalid_argument("stride must be >= 1");
    const std::size_t n_records = n_steps / stride + 1;
    out.contributions.assign(n_records, std::complex<double>{});
    out.aborted = false;
    out.max_weight = 1.0;
    out.n_hops = 0;
    out.n_clamped = 0;
    out.n_frustrated = 0;

    const auto cap = scheme_.weight_cap();
    TrajectoryState s = start(draw);
    out.contributions[0] = contribution(s, draw.w0);
    for (std::size_t step = 1; step <= n_steps; ++step) {
        bool ok = adiabatic_segment(s);
        if (ok) {
            const StepOutcome o = transition_step(s, rng);
            out.n_clamped += o.clamped ? 1 : 0;
            out.n_frustrated += o.frustrated ? 1 : 0;
            if (cap) s.weight = cut_weight(s.weight, *cap);
            const double mag = std::abs(s.weight);
            ok = std::isfinite(mag);
            out.max_weight = std::max(out.max_weight, mag);
        }
        if (!ok) {
            out.aborted = true;
            std::fill(out.contributions.begin(), out.contributions.end(), std::complex<double>{});
            return;
        }
        if (step % stride == 0) out.contributions[step / stride] = contribution(s, draw.w0);
    }
    out.n_hops = s.n_hops;
}

TrajectoryResult Propagator::run_trajectory(const InitialDraw& draw, std::size_t n_steps,
                                            std::size_t stride, Rng& rng) const {
    TrajectoryResult out;
    run_trajectory(draw, n_steps, stride, rng, out);
    return out;
}

}  // namespace sstp
