#include "rotlab/criterion.hpp"

#include "rotlab/errors.hpp"

namespace rotlab {

namespace {

SeriesReport condition_series(const IrrationalSpec& theta, const PhiSpec& phi, std::size_t k_max,
                              bool shifted, const CriterionOptions& opt) {
    if (k_max < 1) throw ValidationError("K_max must be >= 1");
    const unsigned prec = opt.precision_bits;
    ConvergentTable table(theta);
    table.extend_to(k_max + 1, opt.cap_k);

    SeriesReport report;
    report.series = shifted ? "shifted" : "main";
    report.metadata["theta"] = theta.describe();
    report.metadata["phi"] = phi.describe();
    report.metadata["K_max"] = std::to_string(k_max);
    report.metadata["precision_bits"] = std::to_string(prec);
    report.metadata["denominator"] = shifted ? "phi(q_{k+1})" : "phi(q_k)";

    CertifiedReal sum;
    CertifiedReal phi_k = eval_phi_prec(phi, table.q(0), prec);
    for (std::size_t k = 0; k <= k_max; ++k) {
        CertifiedReal phi_next = eval_phi_prec(phi, table.q(k + 1), prec);
        Rational ratio_q(table.q(k + 1), table.q(k));
        ratio_q.canonicalize();
        CertifiedReal ratio(ratio_q);
        // interval min; sound even when the arguments overlap
        CertifiedReal numerator = log(min(phi_k, ratio), prec);
        const CertifiedReal& denom = shifted ? phi_next : phi_k;
        CertifiedReal term = (numerator / denom).rounded(prec);
        sum = (sum + term).rounded(prec + 32);

        SeriesRow row;
        row.k = k;
        row.q_k = table.q(k);
        row.ratio = ratio;
        row.phi_qk = phi_k;
        row.term = term;
        row.partial_sum = sum;
        report.rows.push_back(std::move(row));
        phi_k = std::move(phi_next);
    }
    summarize(report, 0, opt.thresholds);
    return report;
}

}  // namespace

SeriesReport main_series(const IrrationalSpec& theta, const PhiSpec& phi, std::size_t k_max,
                         const CriterionOptions& opt) {
    return condition_series(theta, phi, k_max, false, opt);
}

SeriesReport shifted_series(const IrrationalSpec& theta, const PhiSpec& phi, std::size_t k_max,
                            const CriterionOptions& opt) {
    return condition_series(theta, phi, k_max, true, opt);
}

SeriesReport inverse_log_series(const IrrationalSpec& theta, std::size_t k_max,
                          const CriterionOptions& opt) {
    if (k_max < 2) throw ValidationError("K_max must be >= 2");
    const unsigned prec = opt.precision_bits;
    ConvergentTable table(theta);
    table.extend_to(k_max, opt.cap_k);

    SeriesReport report;
    report.series = "inverse_log";
    report.metadata["theta"] = theta.describe();
    report.metadata["K_max"] = std::to_string(k_max);
    report.metadata["precision_bits"] = std::to_string(prec);
    report.metadata["first_index"] = "2";

    CertifiedReal sum;
    for (std::size_t k = 2; k <= k_max; ++k) {
        CertifiedReal lq = log(CertifiedReal(Rational(table.q(k))), prec);
        CertifiedReal term = (CertifiedReal(Rational(1)) / lq).rounded(prec);
        sum = (sum + term).rounded(prec + 32);
        SeriesRow row;
        row.k = k;
        row.q_k = table.q(k);
        row.term = term;
        row.partial_sum = sum;
        report.rows.push_back(std::move(row));
    }
    summarize(report, 2, opt.thresholds);
    return report;
}

const char* to_string(Growth g) noexcept {
    switch (g) {
    case Growth::Bounded: return "bounded";
    case Growth::Growing: return "growing";
    case Growth::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

ConditionIReport condition_i_check(const IrrationalSpec& theta, std::size_t k_max,
                                   const CriterionOptions& opt) {
    if (k_max < 2) throw ValidationError("K_max must be >= 2");
    const unsigned prec = opt.precision_bits;
    ConvergentTable table(theta);
    table.extend_to(k_max, opt.cap_k);

    std::vector<CertifiedReal> root(k_max + 1);
    ConditionIReport out;
    for (std::size_t k = 1; k <= k_max; ++k) {
        CertifiedReal lq = log(CertifiedReal(Rational(table.q(k))), prec);
        root[k] = exp(lq / CertifiedReal(static_cast<long>(k)), prec).rounded(prec);
        out.fitted_c = k == 1 ? root[k] : max(out.fitted_c, root[k]);
    }
    for (long long c : dyadic_checkpoints(static_cast<long long>(k_max), 1)) {
        out.checkpoints.emplace_back(static_cast<std::size_t>(c), root[static_cast<std::size_t>(c)]);
    }
    if (out.checkpoints.size() >= 2) {
        const double last = out.checkpoints[0].second.approx();
        const double prev = out.checkpoints[1].second.approx();
        const double growth = last / prev;
        if (growth <= 1.05) {
            out.trend = Growth::Bounded;
        } else if (growth >= 1.2) {
            out.trend = Growth::Growing;
        }
    }
    return out;
}

ConditionIIReport condition_ii_check(const IrrationalSpec& theta, std::size_t k_max,
                                     const Rational& d, const CriterionOptions& opt) {
    if (k_max < 3) throw ValidationError("K_max must be >= 3");
    const unsigned prec = opt.precision_bits;
    ConvergentTable table(theta);
    table.extend_to(k_max + 1, opt.cap_k);

    ConditionIIReport out;
    bool have_fit = false;
    const CertifiedReal bound(d);
    for (std::size_t k = 1; k <= k_max; ++k) {
        if (table.q(k) == 1) {
            out.skipped.push_back(k);
            continue;
        }
        Rational ratio_q(table.q(k + 1), table.q(k));
        ratio_q.canonicalize();
        CertifiedReal lq = log(CertifiedReal(Rational(table.q(k))), prec);
        CertifiedReal r = (CertifiedReal(ratio_q) / lq).rounded(prec);
        out.ratios.emplace_back(k, r);
        switch (less(bound, r)) {
        case Certainty::True: out.violations.push_back(k); break;
        case Certainty::Undecided: out.undecided.push_back(k); break;
        case Certainty::False: break;
        }
        if (2 * k >= k_max) {
            out.fitted_d = have_fit ? max(out.fitted_d, r) : r;
            have_fit = true;
        }
    }
    return out;
}

nlohmann::ordered_json to_json(const ConditionIReport& r) {
    nlohmann::ordered_json j;
    put_certified(j, "fitted_C", r.fitted_c);
    j["holds_up_to_K"] = r.holds_up_to_k;
    j["trend"] = to_string(r.trend);
    nlohmann::ordered_json cps = nlohmann::ordered_json::array();
    for (const auto& [k, v] : r.checkpoints) {
        nlohmann::ordered_json e;
        e["k"] = k;
        put_certified(e, "q_k_root_k", v);
        cps.push_back(e);
    }
    j["checkpoints"] = cps;
    return j;
}

nlohmann::ordered_json to_json(const ConditionIIReport& r) {
    nlohmann::ordered_json j;
    put_certified(j, "fitted_D", r.fitted_d);
    j["violations"] = r.violations;
    j["undecided"] = r.undecided;
    j["skipped"] = r.skipped;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& [k, v] : r.ratios) {
        nlohmann::ordered_json e;
        e["k"] = k;
        put_certified(e, "ratio_over_log_q", v);
        rows.push_back(e);
    }
    j["ratios"] = rows;
    return j;
}

}  // namespace rotlab
