// filters.hpp: statistical-error filters for the stochastic transition sampling
//
// Observable cutting clamps the magnitude of the trajectory weight at c_t.
// Transition filtering closes a hop channel when the virtual energy
// fluctuation of the approximate momentum shift exceeds c_E in magnitude.
// The combined scheme applies both.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <variant>

namespace sstp {

class FilterScheme {
public:
    struct None {};
    struct ObservableCut { double c_t; };
    struct TransitionFilter { double c_E; };
    struct Combined { double c_t; double c_E; };
    using Variant = std::variant<None, ObservableCut, TransitionFilter, Combined>;

    FilterScheme() = default;

    static FilterScheme none() { return FilterScheme(None{}); }
    static FilterScheme observable_cut(double c_t);
    static FilterScheme transition_filter(double c_E);
    static FilterScheme combined(double c_t, double c_E);

    // Weight threshold c_t when cutting is active.
    std::optional<double> weight_cap() const noexcept;
    // Energy threshold c_E when transition filtering is active.
    std::optional<double> energy_cap() const noexcept;

    // One of none, observable_cut, transition_filter, combined.
    std::string name() const;
    const Variant& value() const noexcept { return v_; }

private:
    explicit FilterScheme(Variant v) : v_(v) {}
    Variant v_{None{}};
};

// E = P'^2/2M - P^2/2M - dE/2 with the approximate shift
// P' = P + (dE / (2 (P/M).d_hat)) d_hat. The -dE/2 term is the change of the
// mean-surface energy when one index of the pair hops from alpha to beta,
// dE = E_alpha - E_beta. Returns +inf when P.d_hat vanishes.
double virtual_energy_fluctuation(const Eigen::VectorXd& p, const Eigen::VectorXd& d_hat,
                                  double delta_e, double mass);
// Same quantity from the momentum component along d_hat.
double virtual_energy_fluctuation(double p_along, double delta_e, double mass) noexcept;

// 1 iff |epsilon| <= c_E.
int energy_gate(double c_E, double epsilon);

struct HopProbabilities {
    double hop;
    double stay;
};

// Q = 1/(1+x), P = 1 - Q with x = tau |rate|, so P + Q == 1 in floating point.
HopProbabilities basic_probabilities(double tau, double rate) noexcept;
// Generalised probabilities with x = tau |(P/M).d| gate.
HopProbabilities filtered_probabilities(const Eigen::VectorXd& p, const Eigen::VectorXd& d_vec,
                                        double tau, double mass, int gate_value);

// Clamps |w| to c_t keeping arg(w). The result never exceeds c_t in magnitude.
std::complex<double> cut_weight(std::complex<double> w, double c_t);

}  // namespace sstp
