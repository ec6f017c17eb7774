// propagator.hpp: sequential short-time propagation of one weighted trajectory
//
// Each step of length tau applies the adiabatic propagator of the current
// index pair (Bohr phase plus classical motion on the mean surface) and then
// the first-order transition operator (1 + tau J) sampled stochastically:
//
//   stay      with probability Q,         weight *= 1/Q
//   hop k     with probability P/n_open,  weight *= tau b_k n_open / P
//
// where b_k = (P/M).d for the hopping index and n_open counts the channels
// that survive frustration and the energy gate. The expectation over the
// draw equals the deterministic action of (1 + tau J) restricted to open
// channels. Momenta of a hop follow the exact (energy conserving) jump.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sstp/filters.hpp"
#include "sstp/model.hpp"
#include "sstp/sampling.hpp"

namespace sstp {

struct TrajectoryState {
    Eigen::VectorXd r;
    Eigen::VectorXd p;
    IndexPair pair;
    std::complex<double> weight{1.0, 0.0};
    int n_hops{0};
    double time{0.0};
    double gamma{0.0};  // coupling_gamma(r), kept in sync with r
};

struct StepOutcome {
    bool hopped{false};
    IndexPair new_pair;
    bool jump_applied{false};
    bool frustrated{false};  // a channel was closed by a negative radicand and no hop happened
    bool clamped{false};     // hop probability hit 1 - 1e-12
};

// P' = P - (P.d)d + d sign(P.d) sqrt((P.d)^2 + M dE) for unit d.
// std::nullopt when the radicand is negative (frustrated hop).
std::optional<Eigen::VectorXd> momentum_jump(const Eigen::VectorXd& p, const Eigen::VectorXd& d_hat,
                                             double delta_e, double mass);
// In-place form; leaves p untouched and returns false when frustrated.
bool apply_momentum_jump(Eigen::VectorXd& p, const Eigen::VectorXd& d_hat, double delta_e,
                         double mass);

struct TransitionBranch {
    double probability{1.0};
    double factor{1.0};   // weight multiplier
    IndexPair target;
    bool hop{false};
    double delta_e{0.0};  // E_from - E_to of the hopping index
};

struct TransitionBranches {
    std::array<TransitionBranch, 3> items{};
    std::size_t count{0};
    int n_frustrated{0};
    int n_gated{0};
    bool clamped{false};

    std::span<const TransitionBranch> view() const { return {items.data(), count}; }
};

struct TrajectoryResult {
    // w0 W(t_k) sigma_z^{alpha alpha'}(R(t_k)) at every recorded time
    std::vector<std::complex<double>> contributions;
    bool aborted{false};
    double max_weight{0.0};  // max |W| over all steps, after cutting
    int n_hops{0};
    std::size_t n_clamped{0};
    std::size_t n_frustrated{0};
};

class Propagator {
public:
    Propagator(SpinBoson model, double tau, FilterScheme scheme, int max_hops);

    const SpinBoson& model() const noexcept { return model_; }
    double tau() const noexcept { return tau_; }
    const FilterScheme& scheme() const noexcept { return scheme_; }
    int max_hops() const noexcept { return max_hops_; }
    // Unit vector along d_12; fixed for the spin-boson model.
    const Eigen::VectorXd& coupling_direction() const noexcept { return d_hat_; }

    TrajectoryState start(const InitialDraw& draw) const;

    // Velocity Verlet in the interaction picture of the free oscillators:
    // half kick with the spin part of the mean force, exact harmonic rotation,
    // half kick. Multiplies the weight by the trapezoidal Bohr phase
    // exp(i tau (w(R_old) + w(R_new)) / 2). Returns false on a non-finite state.
    bool adiabatic_segment(TrajectoryState& state) const;

    // All outcomes of one transition draw with their probabilities and weight
    // factors. A single stay branch with factor 1 once max_hops is reached.
    TransitionBranches transition_branches(const TrajectoryState& state) const;
    StepOutcome apply_branch(TrajectoryState& state, const TransitionBranch& branch) const;
    // Draws one uniform unless max_hops is reached.
    StepOutcome transition_step(TrajectoryState& state, Rng& rng) const;

    // Observable contribution of the current state.
    std::complex<double> contribution(const TrajectoryState& state,
                                      std::complex<double> w0) const noexcept;

    // n_steps steps; records every `stride` steps starting at t = 0.
    // Aborted trajectories report all-zero contributions.
    TrajectoryResult run_trajectory(const InitialDraw& draw, std::size_t n_steps,
                                    std::size_t stride, Rng& rng) const;
    void run_trajectory(const InitialDraw& draw, std::size_t n_steps, std::size_t stride,
                        Rng& rng, TrajectoryResult& out) const;

private:
    SpinBoson model_;
    double tau_;
    FilterScheme scheme_;
    int max_hops_;
    Eigen::VectorXd d_hat_;
    Eigen::VectorXd rot_cos_;
    Eigen::VectorXd rot_sin_over_mw_;
    Eigen::VectorXd rot_mw_sin_;
};

}  // namespace sstp
