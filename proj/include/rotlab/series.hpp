#pragma once

#include "rotlab/certified.hpp"
#include "rotlab/phi.hpp"

#include <json.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rotlab {

enum class Trend { Diverging, Converging, Inconclusive };

const char* to_string(Trend t) noexcept;

/// Thresholds of the dyadic-block trend heuristic. Divergence of an infinite
/// series is not decidable from finitely many terms; the label is a trend.
struct TrendThresholds {
    /// diverging-trend if the last block is at least this fraction of the previous one
    double diverging_ratio = 0.8;
    /// converging-trend if every block is at most this fraction of the one before it ...
    double converging_ratio = 0.75;
    /// ... over this many consecutive trailing blocks (fewer if that is all there is, min 3)
    std::size_t converging_blocks = 5;
};

/// blocks[0] is the most recent dyadic block, blocks[1] the one before, ...
Trend classify_blocks(const std::vector<double>& blocks, const TrendThresholds& th = {});

/// Dyadic checkpoints K, K/2, K/4, ... down to (and including) floor_index.
std::vector<long long> dyadic_checkpoints(long long last, long long floor_index);

struct SeriesRow {
    std::size_t k = 0;
    std::optional<BigInt> q_k;
    std::optional<CertifiedReal> ratio;
    std::optional<CertifiedReal> phi_qk;
    CertifiedReal term;
    CertifiedReal partial_sum;
};

struct SeriesBlock {
    long long from = 0;  // exclusive
    long long to = 0;    // inclusive
    CertifiedReal contribution;
};

struct SeriesReport {
    std::string series;
    std::vector<SeriesRow> rows;
    /// (K, S_K) at the dyadic checkpoints, largest K first
    std::vector<std::pair<long long, CertifiedReal>> partial_sums;
    /// latest block first
    std::vector<SeriesBlock> blocks;
    Trend classification = Trend::Inconclusive;
    std::map<std::string, std::string> metadata;

    /// S over the last dyadic block (K/2, K].
    CertifiedReal last_block() const;
};

/// Fills partial_sums, blocks and classification from rows (S_K read from rows).
void summarize(SeriesReport& report, long long first_index, const TrendThresholds& th = {});

/// Partial sums of sum_{n <= N} 1/(n phi(n)) at N = N_max, N_max/2, N_max/4, ... and the
/// dyadic-block trend. Rows hold the block contributions in increasing n.
SeriesReport khinchin_divergence_report(const PhiSpec& phi, std::uint64_t n_max,
                                        const TrendThresholds& th = {});

nlohmann::ordered_json to_json(const SeriesReport& report);
/// Columns: k, q_k, ratio, phi_qk, term, partial_sum.
std::string to_csv(const SeriesReport& report);

/// JSON field for a certified value: "value ± bound", plus "<name>_exact": "p/q" when exact.
void put_certified(nlohmann::ordered_json& j, const std::string& name, const CertifiedReal& v);

}  // namespace rotlab
