#include "rotlab/series.hpp"

#include "rotlab/errors.hpp"

#include <cmath>
#include <sstream>

namespace rotlab {

const char* to_string(Trend t) noexcept {
    switch (t) {
    case Trend::Diverging: return "diverging-trend";
    case Trend::Converging: return "converging-trend";
    case Trend::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Trend classify_blocks(const std::vector<double>& blocks, const TrendThresholds& th) {
    if (blocks.size() >= 2 && blocks[1] > 0 && blocks[0] >= th.diverging_ratio * blocks[1]) {
        return Trend::Diverging;
    }
    const std::size_t n = std::min(th.converging_blocks, blocks.size());
    if (n >= 3) {
        bool decaying = true;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            if (!(blocks[j] <= th.converging_ratio * blocks[j + 1])) decaying = false;
        }
        if (decaying) return Trend::Converging;
    }
    return Trend::Inconclusive;
}

std::vector<long long> dyadic_checkpoints(long long last, long long floor_index) {
    std::vector<long long> out;
    long long c = last;
    while (c >= floor_index) {
        out.push_back(c);
        if (c == 0) break;
        c /= 2;
        if (c < floor_index && out.back() > floor_index) c = floor_index;
    }
    return out;
}

CertifiedReal SeriesReport::last_block() const {
    if (blocks.empty()) return CertifiedReal();
    return blocks.front().contribution;
}

void summarize(SeriesReport& report, long long first_index, const TrendThresholds& th) {
    report.partial_sums.clear();
    report.blocks.clear();
    if (report.rows.empty()) {
        report.classification = Trend::Inconclusive;
        return;
    }
    const long long last = static_cast<long long>(report.rows.back().k);
    auto sum_at = [&](long long K) -> CertifiedReal {
        if (K < first_index) return CertifiedReal();
        for (const auto& r : report.rows) {
            if (static_cast<long long>(r.k) == K) return r.partial_sum;
        }
        throw ConsistencyError("partial sum missing at K=" + std::to_string(K));
    };
    // Blocks (c_{j+1}, c_j]; the lowest checkpoint is first_index - 1 (an empty sum).
    std::vector<long long> cps = dyadic_checkpoints(last, first_index - 1 < 0 ? 0 : first_index - 1);
    for (long long c : cps) {
        if (c >= first_index) report.partial_sums.emplace_back(c, sum_at(c));
    }
    std::vector<double> contributions;
    for (std::size_t j = 0; j + 1 < cps.size(); ++j) {
        CertifiedReal b = sum_at(cps[j]) - sum_at(cps[j + 1]);
        report.blocks.push_back(SeriesBlock{cps[j + 1], cps[j], b});
        contributions.push_back(b.approx());
    }
    report.classification = classify_blocks(contributions, th);
}

SeriesReport khinchin_divergence_report(const PhiSpec& phi, std::uint64_t n_max,
                                        const TrendThresholds& th) {
    if (n_max < 2) throw ValidationError("khinchin report requires N_max >= 2");
    if (n_max > (std::uint64_t{1} << 40)) throw ResourceError("N_max too large");
    SeriesReport report;
    report.series = "khinchin";
    report.metadata["phi"] = phi.describe();
    report.metadata["N_max"] = std::to_string(n_max);
    report.metadata["summation"] = "double enclosures, relative widening 2^-50 per term";

    std::vector<long long> cps = dyadic_checkpoints(static_cast<long long>(n_max), 0);
    // ascending, skipping 0
    std::vector<std::uint64_t> marks;
    for (auto it = cps.rbegin(); it != cps.rend(); ++it) {
        if (*it > 0) marks.push_back(static_cast<std::uint64_t>(*it));
    }

    constexpr double widen = 0x1p-50;
    double sum_lo = 0.0;
    double sum_hi = 0.0;
    std::size_t next_mark = 0;
    CertifiedReal prev_sum;
    std::size_t block_index = 0;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        const auto [plo, phi_hi] = phi.double_bounds(n);
        const double nd = static_cast<double>(n);
        sum_lo += (1.0 / (nd * phi_hi)) * (1.0 - widen);
        sum_hi += (1.0 / (nd * plo)) * (1.0 + widen);
        if (next_mark < marks.size() && n == marks[next_mark]) {
            // Recursive summation of n nonnegative terms: relative error below n 2^-52.
            const double slack = static_cast<double>(n) * 0x1p-52;
            CertifiedReal s = CertifiedReal::from_bounds(from_double(sum_lo * (1.0 - slack) * (1.0 - widen)),
                                                         from_double(sum_hi * (1.0 + slack) * (1.0 + widen)));
            SeriesRow row;
            row.k = block_index++;
            row.term = s - prev_sum;
            row.partial_sum = s;
            report.rows.push_back(row);
            report.partial_sums.insert(report.partial_sums.begin(),
                                       {static_cast<long long>(n), s});
            prev_sum = s;
            ++next_mark;
        }
    }
    // Blocks are the rows, most recent first.
    std::vector<double> contributions;
    for (std::size_t i = report.rows.size(); i-- > 1;) {
        const auto& r = report.rows[i];
        report.blocks.push_back(SeriesBlock{static_cast<long long>(marks[i - 1]),
                                            static_cast<long long>(marks[i]), r.term});
        contributions.push_back(r.term.approx());
    }
    report.classification = classify_blocks(contributions, th);
    return report;
}

void put_certified(nlohmann::ordered_json& j, const std::string& name, const CertifiedReal& v) {
    j[name] = v.to_string();
    if (v.is_exact()) j[name + "_exact"] = rational_str(v.value());
}

nlohmann::ordered_json to_json(const SeriesReport& report) {
    nlohmann::ordered_json j;
    j["series"] = report.series;
    j["classification"] = to_string(report.classification);
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.metadata) meta[k] = v;
    j["metadata"] = meta;
    nlohmann::ordered_json sums = nlohmann::ordered_json::array();
    for (const auto& [K, s] : report.partial_sums) {
        nlohmann::ordered_json e;
        e["K"] = K;
        put_certified(e, "S", s);
        sums.push_back(e);
    }
    j["partial_sums"] = sums;
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const auto& b : report.blocks) {
        nlohmann::ordered_json e;
        e["from_exclusive"] = b.from;
        e["to_inclusive"] = b.to;
        put_certified(e, "contribution", b.contribution);
        blocks.push_back(e);
    }
    j["blocks"] = blocks;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json e;
        e["k"] = r.k;
        if (r.q_k) e["q_k"] = r.q_k->get_str();
        if (r.ratio) put_certified(e, "ratio", *r.ratio);
        if (r.phi_qk) put_certified(e, "phi_qk", *r.phi_qk);
        put_certified(e, "term", r.term);
        put_certified(e, "partial_sum", r.partial_sum);
        rows.push_back(e);
    }
    j["terms"] = rows;
    return j;
}

std::string to_csv(const SeriesReport& report) {
    std::ostringstream out;
    out << "k,q_k,ratio,phi_qk,term,partial_sum\n";
    for (const auto& r : report.rows) {
        out << r.k << ',' << (r.q_k ? r.q_k->get_str() : "") << ','
            << (r.ratio ? r.ratio->to_string() : "") << ','
            << (r.phi_qk ? r.phi_qk->to_string() : "") << ',' << r.term.to_string() << ','
            << r.partial_sum.to_string() << '\n';
    }
    return out.str();
}

}  // namespace rotlab
