// model.cpp: spin-boson surfaces, couplings and observable matrix

#include "sstp/model.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sstp {

void ModelParams::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw std::invalid_argument(std::string(field) + " " + what);
    };
    require(std::isfinite(omega) && omega > 0.0, "omega", "must be > 0");
    require(std::isfinite(xi) && xi >= 0.0, "xi", "must be >= 0");
    require(std::isfinite(beta) && beta > 0.0, "beta", "must be > 0");
    require(n_modes >= 1, "n_modes", "must be >= 1");
    require(omega_max > 0.0, "omega_max", "must be > 0");
    require(std::isfinite(mass) && mass > 0.0, "mass", "must be > 0");
}

std::vector<BathMode> discretize_bath(const ModelParams& params) {
    params.validate();
    const auto n = static_cast<double>(params.n_modes);
    const double w0 = -std::expm1(-params.omega_max) / n;
    // The log argument 1 - j*w0 must stay positive for j = N.
    if (!(w0 * n < 1.0 - 1e-15)) {
        throw std::invalid_argument("omega_max: logarithmic grid degenerates (n*w0 >= 1)");
    }
    std::vector<BathMode> modes;
    modes.reserve(params.n_modes);
    const double amp = std::sqrt(params.xi * w0 * params.mass);
    for (std::size_t j = 1; j <= params.n_modes; ++j) {
        const double w = -std::log1p(-static_cast<double>(j) * w0);
        modes.push_back(BathMode{w, w * amp, params.mass});
    }
    return modes;
}

int level_index(Level l) {
    switch (l) {
        case Level::lower: return 0;
        case Level::upper: return 1;
    }
    throw std::out_of_range("adiabatic level index must be lower or upper");
}

SpinBoson::SpinBoson(const ModelParams& params, std::vector<BathMode> modes,
                     PhaseConvention convention)
    : params_(params), modes_(std::move(modes)), convention_(convention) {
    params_.validate();
    if (modes_.empty()) throw std::invalid_argument("n_modes must be >= 1");
    params_.n_modes = modes_.size();
    const auto n = static_cast<Eigen::Index>(modes_.size());
    freq_.resize(n);
    coupling_.resize(n);
    stiffness_.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const BathMode& m = modes_[static_cast<std::size_t>(j)];
        if (!(m.freq > 0.0) || !std::isfinite(m.freq)) {
            throw std::invalid_argument("bath mode frequency must be > 0");
        }
        if (!std::isfinite(m.coupling)) throw std::invalid_argument("bath coupling must be finite");
        // The exact momentum jump assumes a common mass.
        if (m.mass != params_.mass) {
            throw std::invalid_argument("bath mode mass must equal the model mass");
        }
        freq_[j] = m.freq;
        coupling_[j] = m.coupling;
        stiffness_[j] = m.mass * m.freq * m.freq;
    }
    coupling_norm_ = coupling_.norm();
}

SpinBoson SpinBoson::ohmic(const ModelParams& params, PhaseConvention convention) {
    return SpinBoson(params, discretize_bath(params), convention);
}

double SpinBoson::half_gap(double gamma) const noexcept {
    return std::hypot(params_.omega, gamma);
}

double SpinBoson::nac_scale(double gamma) const noexcept {
    const double l2 = params_.omega * params_.omega + gamma * gamma;
    return -convention_sign() * params_.omega / (2.0 * l2);
}

double SpinBoson::bath_potential(const Eigen::VectorXd& r) const {
    return 0.5 * stiffness_.dot(r.cwiseProduct(r));
}

double coupling_gamma(const Eigen::VectorXd& r, const SpinBoson& model) {
    if (static_cast<std::size_t>(r.size()) != model.size()) {
        throw std::invalid_argument("bath position vector length does not match n_modes");
    }
    return model.couplings().dot(r);
}

void surface_eval(const Eigen::VectorXd& r, const SpinBoson& model, SurfaceData& out) {
    const double gamma = coupling_gamma(r, model);
    const double lambda = model.half_gap(gamma);
    const double vb = model.bath_potential(r);
    out.gamma = gamma;
    out.e1 = vb - lambda;
    out.e2 = vb + lambda;
    out.gap = 2.0 * lambda;
    assert(out.gap >= 2.0 * model.tunneling() * (1.0 - 1e-14));
    out.d12 = model.nac_scale(gamma) * model.couplings();
    const double slope = gamma / lambda;
    out.f1 = -model.stiffness().cwiseProduct(r) + slope * model.couplings();
    out.f2 = -model.stiffness().cwiseProduct(r) - slope * model.couplings();
}

SurfaceData surface_eval(const Eigen::VectorXd& r, const SpinBoson& model) {
    SurfaceData out;
    surface_eval(r, model, out);
    return out;
}

double bohr_frequency(Level alpha, Level alpha_prime, const SurfaceData& surface) {
    const int a = level_index(alpha);
    const int b = level_index(alpha_prime);
    const double e[2] = {surface.e1, surface.e2};
    return e[a] - e[b];
}

double sigma_z_element(IndexPair pair, double gamma, const SpinBoson& model) noexcept {
    const double lambda = model.half_gap(gamma);
    if (pair.diagonal()) {
        return pair.alpha == Level::lower ? gamma / lambda : -gamma / lambda;
    }
    return model.convention_sign() * model.tunneling() / lambda;
}

Eigen::Matrix2cd sigma_z_adiabatic(double gamma, const SpinBoson& model) {
    Eigen::Matrix2cd m;
    for (Level a : {Level::lower, Level::upper}) {
        for (Level b : {Level::lower, Level::upper}) {
            m(level_index(a), level_index(b)) = sigma_z_element({a, b}, gamma, model);
        }
    }
    return m;
}

Eigen::Matrix2cd sigma_z_adiabatic(const Eigen::VectorXd& r, const SpinBoson& model) {
    return sigma_z_adiabatic(coupling_gamma(r, model), model);
}

}  // namespace sstp
