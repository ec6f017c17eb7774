// filters.cpp

#include "sstp/filters.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sstp {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
}

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

FilterScheme FilterScheme::observable_cut(double c_t) {
    require_positive(c_t, "c_t");
    return FilterScheme(ObservableCut{c_t});
}

FilterScheme FilterScheme::transition_filter(double c_E) {
    require_positive(c_E, "c_E");
    return FilterScheme(TransitionFilter{c_E});
}

FilterScheme FilterScheme::combined(double c_t, double c_E) {
    require_positive(c_t, "c_t");
    require_positive(c_E, "c_E");
    return FilterScheme(Combined{c_t, c_E});
}

std::optional<double> FilterScheme::weight_cap() const noexcept {
    return std::visit(overloaded{
        [](const ObservableCut& s) -> std::optional<double> { return s.c_t; },
        [](const Combined& s) -> std::optional<double> { return s.c_t; },
        [](const auto&) -> std::optional<double> { return std::nullopt; },
    }, v_);
}

std::optional<double> FilterScheme::energy_cap() const noexcept {
    return std::visit(overloaded{
        [](const TransitionFilter& s) -> std::optional<double> { return s.c_E; },
        [](const Combined& s) -> std::optional<double> { return s.c_E; },
        [](const auto&) -> std::optional<double> { return std::nullopt; },
    }, v_);
}

std::string FilterScheme::name() const {
    return std::visit(overloaded{
        [](const None&) { return std::string("none"); },
        [](const ObservableCut&) { return std::string("observable_cut"); },
        [](const TransitionFilter&) { return std::string("transition_filter"); },
        [](const Combined&) { return std::string("combined"); },
    }, v_);
}

double virtual_energy_fluctuation(double p_along, double delta_e, double mass) noexcept {
    if (delta_e == 0.0) return 0.0;
    if (p_along == 0.0) return std::numeric_limits<double>::infinity();
    const double shift = 0.5 * delta_e * mass / p_along;
    const double p_new = p_along + shift;
    return (p_new * p_new - p_along * p_along) / (2.0 * mass) - 0.5 * delta_e;
}

double virtual_energy_fluctuation(const Eigen::VectorXd& p, const Eigen::VectorXd& d_hat,
                                  double delta_e, double mass) {
    if (p.size() != d_hat.size()) throw std::invalid_argument("p and d_hat differ in length");
    if (delta_e == 0.0) return 0.0;
    const double velocity_along = p.dot(d_hat) / mass;
    if (velocity_along == 0.0) return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd p_new = p + (0.5 * delta_e / velocity_along) * d_hat;
    return p_new.squaredNorm() / (2.0 * mass) - p.squaredNorm() / (2.0 * mass) - 0.5 * delta_e;
}

int energy_gate(double c_E, double epsilon) {
    require_positive(c_E, "c_E");
    return std::abs(epsilon) <= c_E ? 1 : 0;
}

HopProbabilities basic_probabilities(double tau, double rate) noexcept {
    const double stay = 1.0 / (1.0 + tau * std::abs(rate));
    return {1.0 - stay, stay};
}

HopProbabilities filtered_probabilities(const Eigen::VectorXd& p, const Eigen::VectorXd& d_vec,
                                        double tau, double mass, int gate_value) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
    if (gate_value != 0 && gate_value != 1) throw std::invalid_argument("gate must be 0 or 1");
    if (p.size() != d_vec.size()) throw std::invalid_argument("p and d differ in length");
    return basic_probabilities(tau, gate_value * p.dot(d_vec) / mass);
}

std::complex<double> cut_weight(std::complex<double> w, double c_t) {
    require_positive(c_t, "c_t");
    const double mag = std::abs(w);
    if (mag <= c_t) return w;
    std::complex<double> out = w * (c_t / mag);
    while (std::abs(out) > c_t) out *= 1.0 - std::numeric_limits<double>::epsilon();
    return out;
}

}  // namespace sstp
