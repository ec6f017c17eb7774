// estimator.cpp

#include "sstp/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "sstp/propagator.hpp"
#include "sstp/sampling.hpp"

namespace sstp {

namespace {

constexpr std::size_t kBlockSize = 256;

// Welford accumulators for one block of trajectories.
struct BlockStats {
    std::size_t n{0};
    std::vector<double> mean;
    std::vector<double> m2;
    std::size_t n_aborted{0};
    double max_weight{0.0};
    std::size_t n_hops{0};
    std::size_t n_clamped{0};
    std::size_t n_frustrated{0};

    void add(const std::vector<std::complex<double>>& c) {
        ++n;
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double x = c[k].real();
            const double delta = x - mean[k];
            mean[k] += delta * inv;
            m2[k] += delta * (x - mean[k]);
        }
    }

    // Chan et al. pairwise update; call order fixes the rounding.
    void merge(const BlockStats& o) {
        n_aborted += o.n_aborted;
        max_weight = std::max(max_weight, o.max_weight);
        n_hops += o.n_hops;
        n_clamped += o.n_clamped;
        n_frustrated += o.n_frustrated;
        if (o.n == 0) return;
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double nt = na + nb;
        for (std::size_t k = 0; k < mean.size(); ++k) {
            const double delta = o.mean[k] - mean[k];
            mean[k] += delta * (nb / nt);
            m2[k] += o.m2[k] + delta * delta * (na * nb / nt);
        }
        n += o.n;
    }
};

class BlockRunner {
public:
    BlockRunner(const RunConfig& cfg, const Propagator& prop, std::size_t n_records)
        : cfg_(cfg), prop_(prop), n_records_(n_records) {
        sum_.resize(n_records);
    }

    BlockStats run(std::size_t block) {
        BlockStats st;
        st.mean.assign(n_records_, 0.0);
        st.m2.assign(n_records_, 0.0);
        const std::size_t first = block * kBlockSize;
        const std::size_t last = std::min(cfg_.n_traj, first + kBlockSize);
        for (std::size_t i = first; i < last; ++i) {
            Rng rng = trajectory_rng(cfg_.master_seed, i);
            if (one_trajectory(rng, st)) {
                st.add(sum_);
            } else {
                ++st.n_aborted;
            }
        }
        return st;
    }

private:
    // Fills sum_ with the trajectory's contributions; false if aborted.
    bool one_trajectory(Rng& rng, BlockStats& st) {
        const std::size_t n_steps = cfg_.n_steps();
        if (cfg_.pairs == PairSampling::uniform) {
            const InitialDraw draw = draw_initial(rng, prop_.model());
            prop_.run_trajectory(draw, n_steps, cfg_.stride, rng, traj_);
            record(st);
            if (traj_.aborted) return false;
            std::copy(traj_.contributions.begin(), traj_.contributions.end(), sum_.begin());
            return true;
        }
        BathPoint bath = sample_bath(rng, prop_.model().params().beta, prop_.model());
        const Eigen::Matrix2cd rho = initial_subsystem_matrix(bath.r, prop_.model());
        std::fill(sum_.begin(), sum_.end(), std::complex<double>{});
        bool ok = true;
        for (int k = 0; k < 4; ++k) {
            const IndexPair pair{static_cast<Level>(k / 2), static_cast<Level>(k % 2)};
            const InitialDraw draw{bath.r, bath.p, pair,
                                   rho(level_index(pair.alpha_prime), level_index(pair.alpha))};
            prop_.run_trajectory(draw, n_steps, cfg_.stride, rng, traj_);
            record(st);
            ok = ok && !traj_.aborted;
            for (std::size_t t = 0; t < n_records_; ++t) sum_[t] += traj_.contributions[t];
        }
        return ok;
    }

    void record(BlockStats& st) const {
        st.max_weight = std::max(st.max_weight, traj_.max_weight);
        st.n_hops += static_cast<std::size_t>(traj_.n_hops);
        st.n_clamped += traj_.n_clamped;
        st.n_frustrated += traj_.n_frustrated;
    }

    const RunConfig& cfg_;
    const Propagator& prop_;
    std::size_t n_records_;
    TrajectoryResult traj_;
    std::vector<std::complex<double>> sum_;
};

}  // namespace

AbortFractionExceeded::AbortFractionExceeded(std::size_t aborted_, std::size_t total_)
    : std::runtime_error(std::to_string(aborted_) + " of " + std::to_string(total_) +
                         " trajectories aborted on non-finite state"),
      aborted(aborted_), total(total_) {}

void RunConfig::validate() const {
    model.validate();
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be > 0");
    if (!(t_max >= tau) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be >= tau");
    if (n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
    if (max_hops < 0) throw std::invalid_argument("max_hops must be >= 0");
    if (n_workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (!(max_abort_fraction >= 0.0)) throw std::invalid_argument("max_abort_fraction must be >= 0");
    if (modes && modes->empty()) throw std::invalid_argument("explicit bath must have >= 1 mode");
}

std::size_t RunConfig::n_steps() const {
    return static_cast<std::size_t>(std::llround(t_max / tau));
}

SpinBoson RunConfig::build_model(PhaseConvention convention) const {
    if (modes) return SpinBoson(model, *modes, convention);
    return SpinBoson::ohmic(model, convention);
}

PopulationSeries estimate(const RunConfig& config) {
    config.validate();
    return estimate(config, config.build_model());
}

PopulationSeries estimate(const RunConfig& config, const SpinBoson& model) {
    config.validate();
    const Propagator prop(model, config.tau, config.scheme, config.max_hops);
    const std::size_t n_steps = config.n_steps();
    const std::size_t n_records = n_steps / config.stride + 1;
    const std::size_t n_blocks = (config.n_traj + kBlockSize - 1) / kBlockSize;

    std::vector<BlockStats> blocks(n_blocks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            BlockRunner runner(config, prop, n_records);
            for (std::size_t b = next++; b < n_blocks; b = next++) blocks[b] = runner.run(b);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n_blocks;
        }
    };
    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(config.n_workers, n_blocks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    BlockStats total;
    total.mean.assign(n_records, 0.0);
    total.m2.assign(n_records, 0.0);
    for (const BlockStats& b : blocks) total.merge(b);

    PopulationSeries out;
    out.times.resize(n_records);
    out.std_error.assign(n_records, 0.0);
    for (std::size_t k = 0; k < n_records; ++k) {
        out.times[k] = static_cast<double>(k * config.stride) * config.tau;
    }
    out.mean = total.mean;
    if (total.n > 1) {
        const double n = static_cast<double>(total.n);
        for (std::size_t k = 0; k < n_records; ++k) {
            out.std_error[k] = std::sqrt(std::max(0.0, total.m2[k]) / (n - 1.0) / n);
        }
    }
    out.n_used = total.n;
    out.n_aborted = total.n_aborted;
    out.max_weight = total.max_weight;
    out.n_hops = total.n_hops;
    out.n_clamped = total.n_clamped;
    out.n_frustrated = total.n_frustrated;
    if (static_cast<double>(out.n_aborted) >
        config.max_abort_fraction * static_cast<double>(config.n_traj)) {
        throw AbortFractionExceeded(out.n_aborted, config.n_traj);
    }
    return out;
}

SchemeComparison compare_schemes(const RunConfig& config, std::span<const FilterScheme> schemes) {
    if (schemes.size() < 2) throw std::invalid_argument("compare needs at least two schemes");
    config.validate();
    const SpinBoson model = config.build_model();
    SchemeComparison out;
    for (const FilterScheme& s : schemes) {
        RunConfig c = config;
        c.scheme = s;
        out.schemes.push_back(s);
        out.series.push_back(estimate(c, model));
    }
    const auto& base = out.series.front().std_error;
    for (const PopulationSeries& s : out.series) {
        std::vector<double> ratio(base.size());
        for (std::size_t k = 0; k < base.size(); ++k) {
            const double v0 = base[k] * base[k];
            const double v = s.std_error[k] * s.std_error[k];
            ratio[k] = (v0 == 0.0 && v == 0.0) ? 1.0 : v / v0;
        }
        out.variance_ratio.push_back(std::move(ratio));
    }
    return out;
}

}  // namespace sstp
