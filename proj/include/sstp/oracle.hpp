// oracle.hpp: numerically exact spin-boson dynamics for one or two bath modes
//
// H = -Omega sigma_x + sum_j w_j (n_j + 1/2) - sigma_z sum_j c_j R_j,
// R_j = (a_j + a_j^dag) / sqrt(2 M_j w_j), in a number basis truncated at
// n_max quanta per mode. The initial state is |up><up| times the truncated,
// renormalized thermal state of the uncoupled oscillators.

#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

#include "sstp/estimator.hpp"
#include "sstp/model.hpp"

namespace sstp {

inline constexpr std::size_t kOracleMaxDimension = 5000;

struct OracleConfig {
    std::vector<BathMode> modes;  // one or two
    int n_max{30};
    double beta{1.0};
    double omega{1.0 / 3.0};
    std::vector<double> t_grid;
    // Repeat at 2 n_max and require max |difference| < truncation_tol.
    bool check_truncation{true};
    double truncation_tol{1e-4};

    void validate() const;
};

class TruncationError : public std::runtime_error {
public:
    TruncationError(double deviation, int suggested_n_max);
    double deviation;
    int suggested_n_max;
};

class ExactSpinBoson {
public:
    ExactSpinBoson(std::span<const BathMode> modes, double omega, double beta, int n_max);

    Eigen::Index dimension() const noexcept { return hamiltonian_.rows(); }
    const Eigen::MatrixXd& hamiltonian() const noexcept { return hamiltonian_; }
    const Eigen::MatrixXd& initial_density() const noexcept { return rho0_; }
    const Eigen::MatrixXd& sigma_z() const noexcept { return sigma_z_; }

    // Tr[sigma_z rho(t)]
    double sigma_z_expectation(double t) const;
    Eigen::MatrixXcd density(double t) const;

private:
    Eigen::MatrixXd hamiltonian_;
    Eigen::MatrixXd rho0_;
    Eigen::MatrixXd sigma_z_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd vectors_;
    Eigen::MatrixXd rho_eig_;  // V^T rho0 V
    Eigen::MatrixXd weights_;  // (V^T rho0 V) .* (V^T sigma_z V)
};

// Throws TruncationError when the doubling check fails.
PopulationSeries exact_population(const OracleConfig& config);

}  // namespace sstp
