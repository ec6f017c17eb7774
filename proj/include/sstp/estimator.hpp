// estimator.hpp: Monte Carlo driver for <sigma_z(t)>
//
// Trajectory i draws everything from trajectory_rng(master_seed, i).
// Trajectories are grouped into fixed-size blocks whose partial statistics
// are merged in block order, so the result does not depend on n_workers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sstp/filters.hpp"
#include "sstp/model.hpp"

namespace sstp {

enum class PairSampling : std::uint8_t {
    uniform,    // one pair per trajectory, weight 4 rho
    enumerate,  // all four pairs from the same bath point, weight rho each
};

struct RunConfig {
    ModelParams model;
    // Explicit bath; the Ohmic discretization of `model` is used when empty.
    std::optional<std::vector<BathMode>> modes;
    FilterScheme scheme;
    std::size_t n_traj{1000};
    double tau{0.1};
    double t_max{10.0};
    int max_hops{2};
    std::uint64_t master_seed{0};
    unsigned n_workers{1};
    std::size_t stride{1};  // record every stride steps
    PairSampling pairs{PairSampling::uniform};
    double max_abort_fraction{0.01};

    void validate() const;
    std::size_t n_steps() const;
    SpinBoson build_model(PhaseConvention convention = PhaseConvention::positive_first) const;
};

struct PopulationSeries {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> std_error;
    std::size_t n_used{0};
    std::size_t n_aborted{0};
    double max_weight{0.0};
    std::size_t n_hops{0};
    std::size_t n_clamped{0};
    std::size_t n_frustrated{0};
};

class AbortFractionExceeded : public std::runtime_error {
public:
    AbortFractionExceeded(std::size_t aborted, std::size_t total);
    std::size_t aborted;
    std::size_t total;
};

PopulationSeries estimate(const RunConfig& config);
PopulationSeries estimate(const RunConfig& config, const SpinBoson& model);

struct SchemeComparison {
    std::vector<FilterScheme> schemes;
    std::vector<PopulationSeries> series;
    // variance_ratio[k][t] = stderr_k^2 / stderr_0^2 (1 when both vanish)
    std::vector<std::vector<double>> variance_ratio;
};

SchemeComparison compare_schemes(const RunConfig& config, std::span<const FilterScheme> schemes);

}  // namespace sstp
