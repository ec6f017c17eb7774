// model.hpp: spin-boson Hamiltonian in dimensionless units (hbar = omega_c = 1)
//
//   h(R) = -Omega sigma_x - gamma(R) sigma_z + V_b(R),   gamma(R) = sum_j c_j R_j
//
// Adiabatic states use real eigenvectors with a positive first (spin-up)
// component. With theta = atan2(Omega, gamma):
//
//   |1;R> = ( cos(theta/2),  sin(theta/2) )     E_1 = V_b - lambda
//   |2;R> = ( sin(theta/2), -cos(theta/2) )     E_2 = V_b + lambda
//
// where lambda = sqrt(Omega^2 + gamma^2). Under this convention
// d_12 = <1|grad 2> = -Omega c / (2 lambda^2) and sigma_z has diagonal
// (gamma/lambda, -gamma/lambda) and off-diagonal Omega/lambda.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sstp {

struct ModelParams {
    double omega{1.0 / 3.0};  // tunneling frequency Omega
    double xi{0.0};           // Kondo parameter
    double beta{1.0};         // inverse temperature
    std::size_t n_modes{200};
    double omega_max{3.0};    // discretization cutoff
    double mass{1.0};

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct BathMode {
    double freq{1.0};
    double coupling{0.0};
    double mass{1.0};
};

// Ohmic bath J(w) = (pi/2) xi w exp(-w) on a logarithmic frequency grid:
//   w_j = -ln(1 - j w0),  c_j = w_j sqrt(xi w0 M),  w0 = (1 - exp(-w_max)) / N.
std::vector<BathMode> discretize_bath(const ModelParams& params);

enum class Level : std::uint8_t { lower = 0, upper = 1 };

inline constexpr Level other(Level l) noexcept {
    return l == Level::lower ? Level::upper : Level::lower;
}

// Throws std::out_of_range for values outside {lower, upper}.
int level_index(Level l);

struct IndexPair {
    Level alpha{Level::lower};
    Level alpha_prime{Level::lower};

    bool diagonal() const noexcept { return alpha == alpha_prime; }
    friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

// Sign attached to |2;R>. Physical results do not depend on it.
enum class PhaseConvention : std::uint8_t { positive_first, flipped_second };

class SpinBoson {
public:
    SpinBoson(const ModelParams& params, std::vector<BathMode> modes,
              PhaseConvention convention = PhaseConvention::positive_first);

    // Model with the Ohmic discretization of discretize_bath.
    static SpinBoson ohmic(const ModelParams& params,
                           PhaseConvention convention = PhaseConvention::positive_first);

    const ModelParams& params() const noexcept { return params_; }
    std::span<const BathMode> modes() const noexcept { return modes_; }
    std::size_t size() const noexcept { return modes_.size(); }
    double tunneling() const noexcept { return params_.omega; }
    double mass() const noexcept { return params_.mass; }
    PhaseConvention convention() const noexcept { return convention_; }
    double convention_sign() const noexcept {
        return convention_ == PhaseConvention::positive_first ? 1.0 : -1.0;
    }

    const Eigen::VectorXd& frequencies() const noexcept { return freq_; }
    const Eigen::VectorXd& couplings() const noexcept { return coupling_; }
    // M_j w_j^2
    const Eigen::VectorXd& stiffness() const noexcept { return stiffness_; }
    double coupling_norm() const noexcept { return coupling_norm_; }

    // sqrt(Omega^2 + gamma^2)
    double half_gap(double gamma) const noexcept;
    // kappa such that d_12 = kappa * c
    double nac_scale(double gamma) const noexcept;
    double bath_potential(const Eigen::VectorXd& r) const;

private:
    ModelParams params_;
    std::vector<BathMode> modes_;
    PhaseConvention convention_;
    Eigen::VectorXd freq_;
    Eigen::VectorXd coupling_;
    Eigen::VectorXd stiffness_;
    double coupling_norm_{0.0};
};

double coupling_gamma(const Eigen::VectorXd& r, const SpinBoson& model);

struct SurfaceData {
    double gamma{0.0};
    double e1{0.0};
    double e2{0.0};
    double gap{0.0};
    Eigen::VectorXd d12;  // d_21 = -d_12
    Eigen::VectorXd f1;
    Eigen::VectorXd f2;

    double energy(Level l) const noexcept { return l == Level::lower ? e1 : e2; }
    const Eigen::VectorXd& force(Level l) const noexcept {
        return l == Level::lower ? f1 : f2;
    }
};

SurfaceData surface_eval(const Eigen::VectorXd& r, const SpinBoson& model);
// Reuses the storage in `out`.
void surface_eval(const Eigen::VectorXd& r, const SpinBoson& model, SurfaceData& out);

// omega_{alpha alpha'} = E_alpha - E_alpha'
double bohr_frequency(Level alpha, Level alpha_prime, const SurfaceData& surface);

Eigen::Matrix2cd sigma_z_adiabatic(const Eigen::VectorXd& r, const SpinBoson& model);
// Same matrix from a precomputed gamma.
Eigen::Matrix2cd sigma_z_adiabatic(double gamma, const SpinBoson& model);
// Single element <alpha|sigma_z|alpha'>; real under the chosen convention.
double sigma_z_element(IndexPair pair, double gamma, const SpinBoson& model) noexcept;

}  // namespace sstp
