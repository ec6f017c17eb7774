// sampling.hpp: thermal Wigner bath draws and the initial adiabatic index pair

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

#include "sstp/model.hpp"

namespace sstp {

using Rng = std::mt19937_64;

// Independent stream for trajectory `index`; depends only on (master_seed, index).
Rng trajectory_rng(std::uint64_t master_seed, std::uint64_t index);

// Uniform double in [0, 1).
double uniform01(Rng& rng);

struct BathPoint {
    Eigen::VectorXd r;
    Eigen::VectorXd p;
};

// Wigner function of uncoupled thermal oscillators: independent Gaussians with
//   var R_j = 1 / (2 M w tanh(beta w / 2)),  var P_j = M w / (2 tanh(beta w / 2)).
BathPoint sample_bath(Rng& rng, double beta, const SpinBoson& model);

// |up><up| expressed in the adiabatic basis at r0: rho(a, a') = <a|up><up|a'>.
Eigen::Matrix2cd initial_subsystem_matrix(const Eigen::VectorXd& r0, const SpinBoson& model);

struct InitialDraw {
    Eigen::VectorXd r0;
    Eigen::VectorXd p0;
    IndexPair pair0;
    std::complex<double> w0;
};

// Bath point from sample_bath, pair uniform over the four index pairs,
// w0 = 4 rho_S(alpha0', alpha0)(r0).
InitialDraw draw_initial(Rng& rng, const SpinBoson& model);

}  // namespace sstp
