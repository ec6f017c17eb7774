// oracle.cpp

#include "sstp/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <string>

namespace sstp {

namespace {

std::size_t dimension_for(std::size_t n_modes, int n_max) {
    std::size_t d = 2;
    for (std::size_t j = 0; j < n_modes; ++j) d *= static_cast<std::size_t>(n_max + 1);
    return d;
}

}  // namespace

void OracleConfig::validate() const {
    if (modes.empty() || modes.size() > 2) {
        throw std::invalid_argument("n_modes: oracle supports 1 or 2 bath modes");
    }
    for (const BathMode& m : modes) {
        if (!(m.freq > 0.0) || !(m.mass > 0.0)) {
            throw std::invalid_argument("mode_freqs: oracle bath modes need positive frequency and mass");
        }
    }
    if (n_max < 10) throw std::invalid_argument("n_max: must be >= 10");
    if (dimension_for(modes.size(), n_max) > kOracleMaxDimension) {
        throw std::invalid_argument("n_max: Hilbert space dimension exceeds 5000");
    }
    if (check_truncation && dimension_for(modes.size(), 2 * n_max) > kOracleMaxDimension) {
        throw std::invalid_argument("n_max: truncation check at 2*n_max exceeds dimension 5000");
    }
    if (!(beta > 0.0)) throw std::invalid_argument("beta: must be > 0");
    if (!(omega >= 0.0)) throw std::invalid_argument("omega: must be >= 0");
    if (t_grid.empty()) throw std::invalid_argument("t_max: oracle time grid is empty");
}

TruncationError::TruncationError(double deviation_, int suggested)
    : std::runtime_error("oracle truncation not converged (max deviation " +
                         std::to_string(deviation_) + "); try n_max = " +
                         std::to_string(suggested)),
      deviation(deviation_), suggested_n_max(suggested) {}

ExactSpinBoson::ExactSpinBoson(std::span<const BathMode> modes, double omega, double beta,
                               int n_max) {
    const std::size_t levels = static_cast<std::size_t>(n_max) + 1;
    const std::size_t bath_dim = dimension_for(modes.size(), n_max) / 2;
    const auto nb = static_cast<Eigen::Index>(bath_dim);
    const Eigen::Index dim = 2 * nb;

    // Mode-wise operators embedded in the bath space.
    Eigen::MatrixXd h_bath = Eigen::MatrixXd::Zero(nb, nb);
    Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(nb, nb);
    Eigen::VectorXd thermal = Eigen::VectorXd::Ones(nb);
    std::size_t radix = 1;
    for (const BathMode& mode : modes) {
        const double x0 = 1.0 / std::sqrt(2.0 * mode.mass * mode.freq);
        for (std::size_t idx = 0; idx < bath_dim; ++idx) {
            const std::size_t n = (idx / radix) % levels;
            const auto i = static_cast<Eigen::Index>(idx);
            h_bath(i, i) += mode.freq * (static_cast<double>(n) + 0.5);
            thermal[i] *= std::exp(-beta * mode.freq * static_cast<double>(n));
            if (n + 1 < levels) {
                const auto j = static_cast<Eigen::Index>(idx + radix);
                const double amp = mode.coupling * x0 * std::sqrt(static_cast<double>(n + 1));
                coupling(i, j) += amp;
                coupling(j, i) += amp;
            }
        }
        radix *= levels;
    }
    thermal /= thermal.sum();

    // Spin index is the slow one: |s, bath>, s = 0 is spin up.
    hamiltonian_ = Eigen::MatrixXd::Zero(dim, dim);
    hamiltonian_.topLeftCorner(nb, nb) = h_bath - coupling;
    hamiltonian_.bottomRightCorner(nb, nb) = h_bath + coupling;
    hamiltonian_.topRightCorner(nb, nb) = -omega * Eigen::MatrixXd::Identity(nb, nb);
    hamiltonian_.bottomLeftCorner(nb, nb) = -omega * Eigen::MatrixXd::Identity(nb, nb);

    rho0_ = Eigen::MatrixXd::Zero(dim, dim);
    rho0_.topLeftCorner(nb, nb) = thermal.asDiagonal();

    sigma_z_ = Eigen::MatrixXd::Zero(dim, dim);
    sigma_z_.diagonal().head(nb).setOnes();
    sigma_z_.diagonal().tail(nb).setConstant(-1.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hamiltonian_);
    if (eig.info() != Eigen::Success) throw std::runtime_error("oracle diagonalization failed");
    energies_ = eig.eigenvalues();
    vectors_ = eig.eigenvectors();
    rho_eig_ = vectors_.transpose() * rho0_ * vectors_;
    const Eigen::MatrixXd sz_eig = vectors_.transpose() * sigma_z_ * vectors_;
    weights_ = rho_eig_.cwiseProduct(sz_eig);
}

double ExactSpinBoson::sigma_z_expectation(double t) const {
    // sum_kl W_kl cos((E_k - E_l) t) = Re[u^T W conj(u)], u_k = exp(-i E_k t)
    const Eigen::VectorXd c = (energies_ * t).array().cos().matrix();
    const Eigen::VectorXd s = (energies_ * t).array().sin().matrix();
    return c.dot(weights_ * c) + s.dot(weights_ * s);
}

Eigen::MatrixXcd ExactSpinBoson::density(double t) const {
    const Eigen::Index n = dimension();
    Eigen::VectorXcd u(n);
    for (Eigen::Index k = 0; k < n; ++k) u[k] = std::polar(1.0, -energies_[k] * t);
    const Eigen::MatrixXcd rt = u.asDiagonal() * rho_eig_.cast<std::complex<double>>() *
                                u.conjugate().asDiagonal();
    const Eigen::MatrixXcd v = vectors_.cast<std::complex<double>>();
    return v * rt * v.adjoint();
}

PopulationSeries exact_population(const OracleConfig& config) {
    config.validate();
    PopulationSeries out;
    out.times = config.t_grid;
    out.mean.resize(config.t_grid.size());
    out.std_error.assign(config.t_grid.size(), 0.0);
    const ExactSpinBoson exact(config.modes, config.omega, config.beta, config.n_max);
    for (std::size_t k = 0; k < config.t_grid.size(); ++k) {
        out.mean[k] = exact.sigma_z_expectation(config.t_grid[k]);
    }
    if (config.check_truncation) {
        const ExactSpinBoson finer(config.modes, config.omega, config.beta, 2 * config.n_max);
        double worst = 0.0;
        for (std::size_t k = 0; k < config.t_grid.size(); ++k) {
            worst = std::max(worst,
                             std::abs(finer.sigma_z_expectation(config.t_grid[k]) - out.mean[k]));
        }
        if (!(worst < config.truncation_tol)) throw TruncationError(worst, 2 * config.n_max);
    }
    return out;
}

}  // namespace sstp
