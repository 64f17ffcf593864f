#pragma once

#include "rotlab/convergents.hpp"
#include "rotlab/measure.hpp"
#include "rotlab/phi.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace rotlab {

/// SplitMix64 (Steele, Lea, Flood 2014). at(seed, i) is the i-th output of the
/// stream started at `seed`, so any index can be generated independently.
class SplitMix64 {
public:
    static constexpr const char* kName = "splitmix64";

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() noexcept {
        state_ += kGamma;
        return mix(state_);
    }
    static std::uint64_t at(std::uint64_t seed, std::uint64_t index) noexcept {
        return mix(seed + (index + 1) * kGamma);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
};

struct SimulationOptions {
    unsigned threads = 0;  // 0: hardware concurrency
    double max_relative_width = 1e-9;
    std::size_t cap_k = kDefaultCapK;
};

/// Running minimum R_N(s) = min_{n <= N} n phi(n) ||n theta - s|| enclosed in [lo, hi].
struct SampleTrajectory {
    std::uint64_t s_bits = 0;  // s = s_bits / 2^64
    std::vector<double> r_lo;
    std::vector<double> r_hi;
    std::vector<std::uint64_t> hits;  // #{n <= N : ||n theta - s|| < 1/(n phi(n))}

    double r(std::size_t j) const { return 0.5 * (r_lo[j] + r_hi[j]); }
};

struct Quantiles {
    double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
};

/// Type-7 (linear interpolation) quantiles of a nonempty sample.
Quantiles quantiles(std::vector<double> values);
double median(std::vector<double> values);

struct SimulationResult {
    std::uint64_t seed = 0;
    std::string prng = SplitMix64::kName;
    std::string theta;
    std::string phi;
    std::size_t samples = 0;
    std::vector<std::uint64_t> checkpoints;
    std::vector<SampleTrajectory> trajectories;
    std::vector<Quantiles> r_quantiles;  // per checkpoint, of R_N

    std::vector<double> medians() const;
};

/// Targets s = SplitMix64::at(seed, j) / 2^64, j = 0..M-1.
SimulationResult run_liminf_experiment(const IrrationalSpec& theta, const PhiSpec& phi, std::size_t samples,
                                       const std::vector<std::uint64_t>& checkpoints, std::uint64_t seed,
                                       const SimulationOptions& opt = {});
/// Same for explicit targets s_bits / 2^64 (seed recorded as given).
SimulationResult run_liminf_targets(const IrrationalSpec& theta, const PhiSpec& phi,
                                    const std::vector<std::uint64_t>& targets,
                                    const std::vector<std::uint64_t>& checkpoints, std::uint64_t seed,
                                    const SimulationOptions& opt = {});

/// Counts of n <= N with ||n theta - s|| < 1/(4n) at N = 1, 2, 4, ..., and N_max.
SimulationResult minkowski_check(const IrrationalSpec& theta, std::size_t samples, std::uint64_t n_max,
                                 std::uint64_t seed, const SimulationOptions& opt = {});

struct ThetaBuildOptions {
    unsigned precision_bits = 128;
    std::size_t cap_bits = 1 << 16;  // largest partial quotient, in bits
};

struct ThetaBuild {
    IrrationalSpec spec = IrrationalSpec::golden();
    std::vector<BigInt> quotients;  // a_1..a_K
    std::vector<BigInt> q;          // q_0..q_K
};

/// a_{k+1} = smallest a >= 1 with phi(q_{k+1}) > (k+1)^2; partial quotients 1 after K.
ThetaBuild theta_builder_squares(const PhiSpec& phi, std::size_t k_max, const ThetaBuildOptions& opt = {});

struct BorelCantelliRow {
    std::size_t k = 0;
    CertifiedReal mu;
    std::uint64_t hits = 0;
    double frequency = 0;
    double wilson_lo = 0;
    double wilson_hi = 0;
    bool within = false;
    double cumulative_median = 0;  // median over samples of #{j <= k : s in G_j}
};

struct BorelCantelliResult {
    std::uint64_t seed = 0;
    std::string prng = SplitMix64::kName;
    std::string theta;
    std::string phi;
    std::size_t samples = 0;
    std::vector<BorelCantelliRow> rows;
    std::size_t cross_checked = 0;   // (sample, k) memberships decided on both paths
    std::size_t disagreements = 0;
    double fraction_within() const;
};

struct BorelCantelliOptions {
    std::size_t cross_check_samples = 200;
    MeasureOptions measure{};
};

/// Wilson score interval at z = 1.96.
std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n);

BorelCantelliResult borel_cantelli_statistic(const IrrationalSpec& theta, const PhiSpec& phi, std::size_t k_from,
                                             std::size_t k_to, std::size_t samples, std::uint64_t seed,
                                             const BorelCantelliOptions& opt = {});

nlohmann::ordered_json to_json(const SimulationResult& r);
/// Columns: N, min, q25, median, q75, max (of R_N), plus the median hit count.
std::string quantiles_csv(const SimulationResult& r);
nlohmann::ordered_json to_json(const BorelCantelliResult& r);
std::string to_csv(const BorelCantelliResult& r);
nlohmann::ordered_json to_json(const ThetaBuild& b);

}  // namespace rotlab
