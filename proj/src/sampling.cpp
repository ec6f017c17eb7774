// sampling.cpp

#include "sstp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sstp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

Rng trajectory_rng(std::uint64_t master_seed, std::uint64_t index) {
    const std::uint64_t a = splitmix64(master_seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

double uniform01(Rng& rng) {
    return std::generate_canonical<double, 53>(rng);
}

BathPoint sample_bath(Rng& rng, double beta, const SpinBoson& model) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    const auto n = static_cast<Eigen::Index>(model.size());
    BathPoint out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double m = model.mass();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double w = model.frequencies()[j];
        const double th = std::tanh(0.5 * beta * w);
        const double sr = std::sqrt(1.0 / (2.0 * m * w * th));
        const double sp = std::sqrt(m * w / (2.0 * th));
        out.r[j] = sr * gauss(rng);
        out.p[j] = sp * gauss(rng);
    }
    return out;
}

Eigen::Matrix2cd initial_subsystem_matrix(const Eigen::VectorXd& r0, const SpinBoson& model) {
    const double gamma = coupling_gamma(r0, model);
    const double theta = std::atan2(model.tunneling(), gamma);
    const double up1 = std::cos(0.5 * theta);
    const double up2 = model.convention_sign() * std::sin(0.5 * theta);
    Eigen::Matrix2cd rho;
    rho << up1 * up1, up1 * up2,
           up2 * up1, up2 * up2;
    return rho;
}

InitialDraw draw_initial(Rng& rng, const SpinBoson& model) {
    BathPoint bath = sample_bath(rng, model.params().beta, model);
    const double u = uniform01(rng);
    const int k = std::min(3, static_cast<int>(4.0 * u));
    const IndexPair pair{static_cast<Level>(k / 2), static_cast<Level>(k % 2)};
    const Eigen::Matrix2cd rho = initial_subsystem_matrix(bath.r, model);
    const std::complex<double> w0 =
        4.0 * rho(level_index(pair.alpha_prime), level_index(pair.alpha));
    return InitialDraw{std::move(bath.r), std::move(bath.p), pair, w0};
}

}  // namespace sstp
