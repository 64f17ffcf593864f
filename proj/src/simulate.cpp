#include "rotlab/simulate.hpp"

#include "rotlab/errors.hpp"
#include "rotlab/series.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace rotlab {

namespace {

using u128 = FixedPointOrbit::u128;

constexpr double kWiden = 0x1p-50;
constexpr double kUnit = 0x1p-128;

/// Runs f(i) for i in [0, n) on a few threads. Each i writes only its own slot,
/// so results do not depend on scheduling; the lowest failing index is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    unsigned t = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    if (t > n) t = static_cast<unsigned>(n);
    std::vector<std::exception_ptr> errors(n);
    auto run = [&](std::size_t i) {
        try {
            f(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) run(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < t; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) run(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

FixedPointOrbit make_orbit(const IrrationalSpec& theta, std::uint64_t n_max, std::size_t cap_k) {
    ConvergentTable table(theta);
    approx_within(table, Rational(1) / Rational(BigInt(1) << 128), cap_k);
    return FixedPointOrbit(table, n_max);
}

void check_checkpoints(const std::vector<std::uint64_t>& checkpoints) {
    if (checkpoints.empty()) throw ValidationError("at least one checkpoint is required");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 1) throw ValidationError("checkpoints must be >= 1");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
            throw ValidationError("checkpoints must be strictly increasing");
        }
    }
    if (checkpoints.back() > (std::uint64_t{1} << 40)) throw ResourceError("checkpoint too large");
}

SampleTrajectory trajectory(u128 step, std::uint64_t s_bits, const PhiBoundsTable& phi,
                            const std::vector<std::uint64_t>& checkpoints, double max_width) {
    SampleTrajectory out;
    out.s_bits = s_bits;
    const u128 target = FixedPointOrbit::target_units(s_bits);
    double min_lo = INFINITY;
    double min_hi = INFINITY;
    std::uint64_t hits = 0;
    u128 pos = 0;
    std::size_t next = 0;
    const std::uint64_t n_max = checkpoints.back();
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        pos += step;
        const u128 d = FixedPointOrbit::circle_distance(pos, target);
        const u128 err = static_cast<u128>(n) * 2;
        const u128 d_lo = d > err ? d - err : 0;
        const u128 d_hi = d + err;
        const double nd = static_cast<double>(n);
        // Conversion and three products each round by at most 2^-53 relative.
        const double v_lo = nd * phi.lo(n) * (static_cast<double>(d_lo) * kUnit) * (1.0 - kWiden);
        const double v_hi = nd * phi.hi(n) * (static_cast<double>(d_hi) * kUnit) * (1.0 + kWiden);
        if (v_lo < min_lo) min_lo = v_lo;
        if (v_hi < min_hi) min_hi = v_hi;
        if (v_hi < 1.0) {
            ++hits;
        } else if (v_lo < 1.0) {
            throw PrecisionError("hit test undecided at n = " + std::to_string(n) +
                                 " for s = " + std::to_string(s_bits) + "/2^64");
        }
        if (n == checkpoints[next]) {
            if (min_hi - min_lo > max_width * min_hi) {
                throw PrecisionError("running minimum not resolved at N = " + std::to_string(n) +
                                     " for s = " + std::to_string(s_bits) + "/2^64");
            }
            out.r_lo.push_back(min_lo);
            out.r_hi.push_back(min_hi);
            out.hits.push_back(hits);
            ++next;
        }
    }
    return out;
}

std::string s_string(std::uint64_t bits) {
    Rational s(BigInt(static_cast<unsigned long>(bits)), BigInt(1) << 64);
    s.canonicalize();
    return rational_str(s);
}

}  // namespace

double median(std::vector<double> values) { return quantiles(std::move(values)).median; }

Quantiles quantiles(std::vector<double> values) {
    if (values.empty()) throw ValidationError("quantiles of an empty sample");
    std::sort(values.begin(), values.end());
    auto at = [&](double p) {
        const double h = (static_cast<double>(values.size()) - 1.0) * p;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        if (lo + 1 >= values.size()) return values.back();
        return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
    };
    return Quantiles{values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

std::vector<double> SimulationResult::medians() const {
    std::vector<double> out;
    for (const auto& q : r_quantiles) out.push_back(q.median);
    return out;
}

SimulationResult run_liminf_targets(const IrrationalSpec& theta, const PhiSpec& phi,
                                    const std::vector<std::uint64_t>& targets,
                                    const std::vector<std::uint64_t>& checkpoints, std::uint64_t seed,
                                    const SimulationOptions& opt) {
    check_checkpoints(checkpoints);
    SimulationResult res;
    res.seed = seed;
    res.theta = theta.describe();
    res.phi = phi.describe();
    res.samples = targets.size();
    res.checkpoints = checkpoints;
    if (targets.empty()) return res;

    const FixedPointOrbit orbit = make_orbit(theta, checkpoints.back(), opt.cap_k);
    const PhiBoundsTable table(phi, checkpoints.back());
    res.trajectories.resize(targets.size());
    parallel_for(targets.size(), opt.threads, [&](std::size_t i) {
        res.trajectories[i] = trajectory(orbit.step(), targets[i], table, checkpoints, opt.max_relative_width);
    });
    for (std::size_t j = 0; j < checkpoints.size(); ++j) {
        std::vector<double> r;
        r.reserve(targets.size());
        for (const auto& t : res.trajectories) r.push_back(t.r(j));
        res.r_quantiles.push_back(quantiles(std::move(r)));
    }
    return res;
}

SimulationResult run_liminf_experiment(const IrrationalSpec& theta, const PhiSpec& phi, std::size_t samples,
                                       const std::vector<std::uint64_t>& checkpoints, std::uint64_t seed,
                                       const SimulationOptions& opt) {
    if (samples < 1) throw ValidationError("samples must be >= 1");
    std::vector<std::uint64_t> targets(samples);
    for (std::size_t j = 0; j < samples; ++j) targets[j] = SplitMix64::at(seed, j);
    return run_liminf_targets(theta, phi, targets, checkpoints, seed, opt);
}

SimulationResult minkowski_check(const IrrationalSpec& theta, std::size_t samples, std::uint64_t n_max,
                                 std::uint64_t seed, const SimulationOptions& opt) {
    if (n_max < 1) throw ValidationError("N_max must be >= 1");
    std::vector<std::uint64_t> cps;
    for (std::uint64_t n = 1; n < n_max; n *= 2) cps.push_back(n);
    cps.push_back(n_max);
    return run_liminf_experiment(theta, PhiSpec::constant(4), samples, cps, seed, opt);
}

ThetaBuild theta_builder_squares(const PhiSpec& phi, std::size_t k_max, const ThetaBuildOptions& opt) {
    if (k_max < 1) throw ValidationError("K must be >= 1");
    if (phi.is_bounded()) throw ConstructionError("phi is bounded; phi(q_k) > k^2 cannot hold for all k");
    auto exceeds = [&](const BigInt& q, const CertifiedReal& target) {
        for (unsigned prec = opt.precision_bits; prec <= 8192; prec *= 2) {
            Certainty c = less(target, eval_phi_prec(phi, q, prec));
            if (c != Certainty::Undecided) return c == Certainty::True;
        }
        throw PrecisionError("cannot compare phi(" + q.get_str() + ") with " + target.to_string());
    };
    ThetaBuild out;
    out.q.push_back(BigInt(1));
    BigInt q_prev = 0;  // q_{-1}
    for (std::size_t k = 0; k < k_max; ++k) {
        const BigInt& qk = out.q.back();
        const CertifiedReal target(static_cast<long>((k + 1) * (k + 1)));
        auto ok = [&](const BigInt& a) { return exceeds(a * qk + q_prev, target); };
        BigInt a = 1;
        if (!ok(a)) {
            BigInt bad = 1;
            a = 2;
            while (!ok(a)) {
                if (mpz_sizeinbase(a.get_mpz_t(), 2) > opt.cap_bits) {
                    throw ConstructionError("a_" + std::to_string(k + 1) + " exceeds " +
                                            std::to_string(opt.cap_bits) + " bits");
                }
                bad = a;
                a *= 2;
            }
            while (a - bad > 1) {
                BigInt mid = (a + bad) / 2;
                if (ok(mid)) {
                    a = mid;
                } else {
                    bad = mid;
                }
            }
        }
        BigInt next = a * qk + q_prev;
        q_prev = qk;
        out.quotients.push_back(a);
        out.q.push_back(next);
    }
    out.spec = IrrationalSpec::explicit_list(out.quotients, IrrationalSpec::golden());
    ConvergentTable table(out.spec);
    table.extend_to(k_max, k_max + 1);
    for (std::size_t k = 1; k <= k_max; ++k) {
        if (table.q(k) != out.q[k] ||
            !exceeds(table.q(k), CertifiedReal(static_cast<long>(k * k)))) {
            throw ConstructionError("post-check phi(q_k) > k^2 failed at k = " + std::to_string(k));
        }
    }
    return out;
}

std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n) {
    if (n == 0) return {0.0, 1.0};
    constexpr double z = 1.96;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double denom = 1.0 + z * z / nn;
    const double center = (p + z * z / (2 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double BorelCantelliResult::fraction_within() const {
    if (rows.empty()) return 0.0;
    std::size_t ok = 0;
    for (const auto& r : rows) ok += r.within ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(rows.size());
}

namespace {

u128 units_floor(const Rational& x) {
    if (sgn(x) <= 0) return 0;
    BigInt v = floor(x * Rational(BigInt(1) << 128));
    if (v >= (BigInt(1) << 128)) return ~static_cast<u128>(0);
    BigInt hi = v >> 64;
    BigInt lo = v - (hi << 64);
    return (static_cast<u128>(hi.get_ui()) << 64) | static_cast<u128>(lo.get_ui());
}

u128 units_ceil(const Rational& x) {
    u128 f = units_floor(x);
    return f == ~static_cast<u128>(0) ? f : f + 1;
}

/// s in G_k decided from the fixed-point orbit, ball by ball.
Certainty member_fixed(const FixedPointOrbit& orbit, const GkStructure& g, std::uint64_t s_bits) {
    const u128 target = FixedPointOrbit::target_units(s_bits);
    bool undecided = false;
    for (const auto& layer : g.layers) {
        const u128 r_lo = units_floor(layer.radius.lower());
        const u128 r_hi = units_ceil(layer.radius.upper());
        const std::uint64_t from = layer.n_from.get_ui();
        const std::uint64_t to = layer.n_to.get_ui();
        for (std::uint64_t n = from + 1; n <= to; ++n) {
            const u128 d = FixedPointOrbit::circle_distance(orbit.position(n), target);
            const u128 err = orbit.error_units(n);
            if (d + err < r_lo) return Certainty::True;
            if (!(d > err && d - err > r_hi)) undecided = true;
        }
    }
    return undecided ? Certainty::Undecided : Certainty::False;
}

}  // namespace

BorelCantelliResult borel_cantelli_statistic(const IrrationalSpec& theta, const PhiSpec& phi, std::size_t k_from,
                                             std::size_t k_to, std::size_t samples, std::uint64_t seed,
                                             const BorelCantelliOptions& opt) {
    BorelCantelliResult res;
    res.seed = seed;
    res.theta = theta.describe();
    res.samples = samples;
    MeasureLab lab(theta, phi, opt.measure);
    res.phi = lab.phi().describe();
    if (samples == 0) return res;
    if (k_to < k_from) throw ValidationError("empty k range");

    std::vector<std::uint64_t> targets(samples);
    for (std::size_t j = 0; j < samples; ++j) targets[j] = SplitMix64::at(seed, j);

    std::vector<const GkStructure*> gks;
    for (std::size_t k = k_from; k <= k_to; ++k) gks.push_back(&lab.build_Gk(k));
    const std::uint64_t n_max = lab.table().q(k_to + 1).get_ui();
    const FixedPointOrbit orbit = make_orbit(theta, n_max, opt.measure.cap_k);

    // membership[j][i]: sample j in G_{k_from + i}
    std::vector<std::vector<char>> member(samples, std::vector<char>(gks.size(), 0));
    std::vector<std::size_t> checked(samples, 0);
    std::vector<std::size_t> disagree(samples, 0);
    parallel_for(samples, 0, [&](std::size_t j) {
        Rational s(BigInt(static_cast<unsigned long>(targets[j])), BigInt(1) << 64);
        s.canonicalize();
        for (std::size_t i = 0; i < gks.size(); ++i) {
            const GkStructure& g = *gks[i];
            const Rational margin = g.all.center_error + g.all.radius_error;
            Certainty exact = g.all.set.contains_certified(s, margin);
            const bool cross = j < opt.cross_check_samples;
            Certainty fixed = Certainty::Undecided;
            if (cross || exact == Certainty::Undecided) fixed = member_fixed(orbit, g, targets[j]);
            if (exact == Certainty::Undecided) exact = fixed;
            if (exact == Certainty::Undecided) {
                throw PrecisionError("membership of s = " + s_string(targets[j]) + " in G_" +
                                     std::to_string(g.k) + " undecided");
            }
            member[j][i] = exact == Certainty::True ? 1 : 0;
            if (cross && fixed != Certainty::Undecided) {
                ++checked[j];
                if (fixed != exact) ++disagree[j];
            }
        }
    });
    for (std::size_t j = 0; j < samples; ++j) {
        res.cross_checked += checked[j];
        res.disagreements += disagree[j];
    }
    std::vector<double> cumulative(samples, 0.0);
    for (std::size_t i = 0; i < gks.size(); ++i) {
        BorelCantelliRow row;
        row.k = gks[i]->k;
        row.mu = gks[i]->all.measure();
        for (std::size_t j = 0; j < samples; ++j) {
            row.hits += static_cast<std::uint64_t>(member[j][i]);
            cumulative[j] += member[j][i];
        }
        row.frequency = static_cast<double>(row.hits) / static_cast<double>(samples);
        std::tie(row.wilson_lo, row.wilson_hi) = wilson_interval(row.hits, samples);
        const double mu = row.mu.approx();
        row.within = row.wilson_lo <= mu && mu <= row.wilson_hi;
        row.cumulative_median = median(cumulative);
        res.rows.push_back(row);
    }
    return res;
}

nlohmann::ordered_json to_json(const SimulationResult& r) {
    nlohmann::ordered_json j;
    j["seed"] = r.seed;
    j["prng"] = r.prng;
    j["theta"] = r.theta;
    j["phi"] = r.phi;
    j["samples"] = r.samples;
    j["checkpoints"] = r.checkpoints;
    nlohmann::ordered_json qs = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < r.r_quantiles.size(); ++c) {
        const auto& q = r.r_quantiles[c];
        qs.push_back({{"N", r.checkpoints[c]}, {"min", q.min}, {"q25", q.q25}, {"median", q.median},
                      {"q75", q.q75}, {"max", q.max}});
    }
    j["R_quantiles"] = qs;
    nlohmann::ordered_json ts = nlohmann::ordered_json::array();
    for (const auto& t : r.trajectories) {
        nlohmann::ordered_json e;
        e["s"] = s_string(t.s_bits);
        e["R_lo"] = t.r_lo;
        e["R_hi"] = t.r_hi;
        e["hits"] = t.hits;
        ts.push_back(e);
    }
    j["trajectories"] = ts;
    return j;
}

std::string quantiles_csv(const SimulationResult& r) {
    std::ostringstream out;
    out.precision(12);
    out << "N,min,q25,median,q75,max,median_hits\n";
    for (std::size_t c = 0; c < r.r_quantiles.size(); ++c) {
        const auto& q = r.r_quantiles[c];
        std::vector<double> hits;
        for (const auto& t : r.trajectories) hits.push_back(static_cast<double>(t.hits[c]));
        out << r.checkpoints[c] << ',' << q.min << ',' << q.q25 << ',' << q.median << ',' << q.q75 << ','
            << q.max << ',' << median(hits) << '\n';
    }
    return out.str();
}

nlohmann::ordered_json to_json(const BorelCantelliResult& r) {
    nlohmann::ordered_json j;
    j["seed"] = r.seed;
    j["prng"] = r.prng;
    j["theta"] = r.theta;
    j["phi"] = r.phi;
    j["samples"] = r.samples;
    j["cross_checked"] = r.cross_checked;
    j["disagreements"] = r.disagreements;
    j["fraction_within"] = r.fraction_within();
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json e;
        e["k"] = row.k;
        put_certified(e, "mu", row.mu);
        e["hits"] = row.hits;
        e["frequency"] = row.frequency;
        e["wilson_lo"] = row.wilson_lo;
        e["wilson_hi"] = row.wilson_hi;
        e["within"] = row.within;
        e["cumulative_median"] = row.cumulative_median;
        rows.push_back(e);
    }
    j["rows"] = rows;
    return j;
}

std::string to_csv(const BorelCantelliResult& r) {
    std::ostringstream out;
    out.precision(12);
    out << "k,mu,hits,frequency,wilson_lo,wilson_hi,within,cumulative_median\n";
    for (const auto& row : r.rows) {
        out << row.k << ',' << row.mu.to_string() << ',' << row.hits << ',' << row.frequency << ','
            << row.wilson_lo << ',' << row.wilson_hi << ',' << (row.within ? 1 : 0) << ','
            << row.cumulative_median << '\n';
    }
    return out.str();
}

nlohmann::ordered_json to_json(const ThetaBuild& b) {
    nlohmann::ordered_json j;
    j["K"] = b.quotients.size();
    std::vector<std::string> a;
    for (const auto& x : b.quotients) a.push_back(x.get_str());
    j["quotients"] = a;
    std::vector<std::string> q;
    for (const auto& x : b.q) q.push_back(x.get_str());
    j["q"] = q;
    j["tail"] = "constant(1)";
    return j;
}

}  // namespace rotlab
