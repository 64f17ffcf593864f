#include "rotlab/measure.hpp"

#include "rotlab/errors.hpp"
#include "rotlab/series.hpp"

#include <algorithm>

namespace rotlab {

namespace {

constexpr unsigned kMaxEscalationBits = 8192;
constexpr unsigned long kRadiusSafetyBits = 64;

struct BallList {
    std::vector<std::pair<Rational, Rational>> balls;
    Rational radius_error;
};

Rational center_of(const BigInt& n, const ThetaApprox& ta) {
    BigInt t = n * ta.value.get_num();
    mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), ta.value.get_den().get_mpz_t());
    Rational c(t, ta.value.get_den());
    c.canonicalize();
    return c;
}

/// Dyadic stand-in for an inexact radius; exact radii are used as they are.
std::pair<Rational, Rational> usable(const CertifiedReal& r, unsigned prec) {
    if (r.is_exact()) return {r.value(), Rational(0)};
    CertifiedReal s = r.rounded(prec);
    return {s.value(), s.error_bound()};
}

MeasuredSet make_set(const BallList& list, const ThetaApprox& ta, const BigInt& n_max) {
    MeasuredSet out;
    out.set = CircleIntervalSet::balls(list.balls);
    out.convergent_index = ta.m;
    out.balls = list.balls.size();
    out.center_error = Rational(n_max) * ta.error;
    out.radius_error = list.radius_error;
    return out;
}

Certainty relation_holds(const std::string& rel, const CertifiedReal& lhs, const CertifiedReal& rhs) {
    if (rel == "<=") return less_equal(lhs, rhs);
    if (rel == "<") return less(lhs, rhs);
    if (rel == ">=") return less_equal(rhs, lhs);
    if (rel == ">") return less(rhs, lhs);
    throw ValidationError("unknown relation " + rel);
}

Certainty from_bool(bool b) { return b ? Certainty::True : Certainty::False; }

}  // namespace

const char* to_string(Certainty c) noexcept {
    switch (c) {
    case Certainty::True: return "holds";
    case Certainty::False: return "fails";
    case Certainty::Undecided: return "undecided";
    }
    return "undecided";
}

Rational MeasuredSet::perturbation() const {
    return 2 * Rational(static_cast<unsigned long>(balls)) * (center_error + radius_error);
}

CertifiedReal MeasuredSet::measure() const { return CertifiedReal(set.measure(), perturbation()); }

CertifiedReal GkStructure::closed_form() const {
    CertifiedReal sum;
    for (const auto& layer : layers) sum = sum + CertifiedReal(Rational(1, 1) / Rational(layer.n_to));
    return CertifiedReal(Rational(q_k) / 4) * sum / phi_qk1;
}

std::size_t first_nondegenerate_index(const ConvergentTable& table) {
    return table.size() > 1 && table.q(0) == table.q(1) ? 1 : 0;
}

MeasureLab::MeasureLab(IrrationalSpec theta, const PhiSpec& phi, MeasureOptions opt)
    : table_(std::move(theta)), phi_(PhiSpec::at_least_four(phi)), opt_(opt) {}

void MeasureLab::require(std::size_t k) { table_.extend_to(k + 1, opt_.cap_k); }

CertifiedReal MeasureLab::phi_at(const BigInt& n) const {
    return eval_phi_prec(phi_, n, opt_.precision_bits);
}

namespace {

/// Rational stand-in for theta: every center n theta, n <= n_max, moves by less
/// than 2^-64 of the smallest radius.
ThetaApprox choose_theta(ConvergentTable& table, const BigInt& n_max, const Rational& r_min,
                         std::size_t cap_k) {
    Rational target = r_min / Rational(n_max);
    target /= Rational(BigInt(1) << kRadiusSafetyBits);
    return approx_within(table, target, cap_k);
}

void append_balls(BallList& list, const ThetaApprox& ta, const BigInt& n_from, const BigInt& n_to,
                  const std::vector<std::pair<Rational, Rational>>& radius_and_error) {
    BigInt n = n_from + 1;
    for (const auto& [r, e] : radius_and_error) {
        list.balls.emplace_back(center_of(n, ta), r);
        if (e > list.radius_error) list.radius_error = e;
        ++n;
    }
    if (n != n_to + 1) throw ConsistencyError("ball count does not match index range");
}

}  // namespace

MeasuredSet MeasureLab::build_Ek(std::size_t k) {
    require(k);
    const BigInt lo = table_.q(k);
    const BigInt hi = table_.q(k + 1);
    BigInt count = hi - lo;
    if (count > opt_.cap_arcs) {
        throw ResourceError("E_" + std::to_string(k) + " needs " + count.get_str() + " balls, cap " +
                            std::to_string(opt_.cap_arcs));
    }
    std::vector<std::pair<Rational, Rational>> radii;
    radii.reserve(count.get_ui());
    Rational r_min;
    for (BigInt n = lo + 1; n <= hi; ++n) {
        CertifiedReal r = CertifiedReal(Rational(1)) / (CertifiedReal(n) * phi_at(n));
        radii.push_back(usable(r, opt_.precision_bits));
        Rational r_lo = radii.back().first - radii.back().second;
        if (radii.size() == 1 || r_lo < r_min) r_min = r_lo;
    }
    if (radii.empty()) throw ValidationError("E_" + std::to_string(k) + " is empty (q_k = q_{k+1})");
    ThetaApprox ta = choose_theta(table_, hi, r_min, opt_.cap_k);
    BallList list;
    list.balls.reserve(radii.size());
    append_balls(list, ta, lo, hi, radii);
    return make_set(list, ta, hi);
}

BigInt MeasureLab::q_star(std::size_t k) {
    require(k);
    const BigInt& qk = table_.q(k);
    const BigInt& qk1 = table_.q(k + 1);
    const CertifiedReal bound(qk1);
    auto below = [&](const BigInt& n) {
        for (unsigned prec = opt_.precision_bits; prec <= kMaxEscalationBits; prec *= 2) {
            Certainty c = less(CertifiedReal(n) * eval_phi_prec(phi_, n, prec), bound);
            if (c != Certainty::Undecided) return c == Certainty::True;
        }
        throw PrecisionError("cannot compare n phi(n) with q_{k+1} at n = " + n.get_str());
    };
    if (!below(qk)) return qk;
    // below(lo) holds; below(hi) fails since phi >= 4.
    BigInt lo = qk;
    BigInt hi = qk1;
    while (hi - lo > 1) {
        BigInt mid = (lo + hi) / 2;
        if (below(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

const GkStructure& MeasureLab::build_Gk(std::size_t k) {
    if (auto it = gk_.find(k); it != gk_.end()) return it->second;
    require(k);
    GkStructure g;
    g.k = k;
    g.q_k = table_.q(k);
    g.q_k1 = table_.q(k + 1);
    if (g.q_k == g.q_k1) {
        throw ValidationError("G_" + std::to_string(k) + " is undefined when q_k = q_{k+1}");
    }
    g.q_star = q_star(k);
    g.b_next = ceil_div(g.q_k1 - g.q_star, g.q_k);
    BigInt balls = g.b_next * g.q_k;
    if (balls > opt_.cap_arcs) {
        throw ResourceError("G_" + std::to_string(k) + " needs " + balls.get_str() + " balls, cap " +
                            std::to_string(opt_.cap_arcs));
    }
    g.phi_qk1 = phi_at(g.q_k1);

    std::vector<CertifiedReal> radius;
    for (BigInt i = 0; i < g.b_next; ++i) {
        BigInt x = g.q_k1 - i * g.q_k;
        radius.push_back(CertifiedReal(Rational(1)) / (CertifiedReal(Rational(BigInt(8 * x))) * g.phi_qk1));
    }
    // i = 0 has the smallest radius
    auto r0 = usable(radius.front(), opt_.precision_bits);
    ThetaApprox ta = choose_theta(table_, g.q_k1, r0.first - r0.second, opt_.cap_k);

    BallList all;
    all.balls.reserve(balls.get_ui());
    for (std::size_t idx = 0; idx < radius.size(); ++idx) {
        GkLayer layer;
        layer.i = static_cast<unsigned long>(idx);
        layer.n_to = g.q_k1 - layer.i * g.q_k;
        layer.n_from = layer.n_to - g.q_k;
        layer.radius = radius[idx];
        auto ru = usable(radius[idx], opt_.precision_bits);
        std::vector<std::pair<Rational, Rational>> radii(g.q_k.get_ui(), ru);
        BallList one;
        append_balls(one, ta, layer.n_from, layer.n_to, radii);
        layer.arcs = make_set(one, ta, layer.n_to);
        all.balls.insert(all.balls.end(), one.balls.begin(), one.balls.end());
        if (one.radius_error > all.radius_error) all.radius_error = one.radius_error;
        g.layers.push_back(std::move(layer));
    }
    g.all = make_set(all, ta, g.q_k1);
    g.min_gap = min_ball_gap(all.balls);
    g.gap_slack = 2 * (g.all.center_error + g.all.radius_error);
    if (!g.disjoint_certified()) {
        throw ConsistencyError("balls of G_" + std::to_string(k) + " are not certified disjoint (gap " +
                               rational_str(g.min_gap) + ")");
    }
    return gk_.emplace(k, std::move(g)).first->second;
}

std::vector<AuditRecord> MeasureLab::audit_inequalities(std::size_t k_from, std::size_t k_to) {
    std::vector<AuditRecord> out;
    const unsigned prec = opt_.precision_bits;
    auto add = [&](std::string id, std::size_t k, std::string rel, CertifiedReal lhs, CertifiedReal rhs,
                   std::string note = {}) {
        AuditRecord r;
        r.id = std::move(id);
        r.k = k;
        r.holds = relation_holds(rel, lhs, rhs);
        r.relation = std::move(rel);
        r.lhs = std::move(lhs);
        r.rhs = std::move(rhs);
        r.note = std::move(note);
        out.push_back(std::move(r));
    };
    auto add_bool = [&](std::string id, std::size_t k, std::string rel, CertifiedReal lhs, CertifiedReal rhs,
                        bool holds, std::string note = {}) {
        AuditRecord r;
        r.id = std::move(id);
        r.k = k;
        r.relation = std::move(rel);
        r.lhs = std::move(lhs);
        r.rhs = std::move(rhs);
        r.holds = from_bool(holds);
        r.note = std::move(note);
        out.push_back(std::move(r));
    };

    for (std::size_t k = k_from; k <= k_to; ++k) {
        require(k);
        const BigInt qk = table_.q(k);
        const BigInt qk1 = table_.q(k + 1);
        if (qk == qk1) continue;
        const BigInt qkm1 = k == 0 ? BigInt(0) : table_.q(k - 1);
        const CertifiedReal phik = phi_at(qk);
        Rational ratio(qk1, qk);
        ratio.canonicalize();

        // Upper bounds for E_k.
        const CertifiedReal mu_e = build_Ek(k).measure();
        add("lll1", k, "<=", mu_e, (CertifiedReal(2) * log(CertifiedReal(ratio), prec) / phik).rounded(prec));
        const bool small_phi = less(CertifiedReal(qk) * phik, CertifiedReal(qk1)) == Certainty::True;
        if (small_phi) {
            CertifiedReal rhs = CertifiedReal(3) / phik + CertifiedReal(2) * log(phik, prec) / phik;
            add("lll2", k, "<=", mu_e, rhs.rounded(prec));
        }

        // Structure of G_k.
        const GkStructure& g = build_Gk(k);
        add_bool("q_star_range", k, "in [q_k, q_{k+1})", CertifiedReal(g.q_star), CertifiedReal(qk),
                 g.q_star >= qk && g.q_star < qk1, "q_{k+1} = " + qk1.get_str());
        add_bool("b_range", k, "in [1, a_{k+1}]", CertifiedReal(g.b_next), CertifiedReal(table_.a(k + 1)),
                 g.b_next >= 1 && g.b_next <= table_.a(k + 1));
        add("Gk_disjoint", k, ">", CertifiedReal(g.min_gap, g.gap_slack), CertifiedReal(0),
            "smallest gap between balls");

        for (const auto& layer : g.layers) {
            const Rational used = usable(layer.radius, prec).first;
            const bool exact_sum = layer.arcs.set.measure() == Rational(g.q_k) * 2 * used;
            CertifiedReal closed = CertifiedReal(Rational(g.q_k)) * CertifiedReal(2) * layer.radius;
            add_bool("Gki_closed_form", k, "==", layer.arcs.measure(), closed,
                     exact_sum && g.disjoint_certified(),
                     "i=" + layer.i.get_str() + "; q_k/(8(q_{k+1}-i q_k)phi(q_{k+1})) = rhs/2");
        }
        const CertifiedReal mu_g = g.all.measure();
        {
            Rational used_sum(0);
            for (const auto& layer : g.layers) used_sum += Rational(g.q_k) * 2 * usable(layer.radius, prec).first;
            add_bool("Gk_closed_form", k, "==", mu_g, g.closed_form(),
                     g.all.set.measure() == used_sum && g.disjoint_certified());
        }

        const Rational tol = Rational(1, 1) / Rational(BigInt(1) << prec);
        approx_within(table_, tol / Rational(qk), opt_.cap_k);
        const CertifiedReal dist_qk = dist_to_integer(qk, table_, tol);
        add("radius_bound", k, "<", g.layers.back().radius, dist_qk / CertifiedReal(2),
            "largest ball radius vs ||q_k theta||/2");

        // Ball-level containment G_k in F_k: radius <= 1/(n phi(n)) and n > q_{k-1}.
        {
            CertifiedReal worst;
            bool first = true;
            Certainty all_ok = Certainty::True;
            for (const auto& layer : g.layers) {
                for (BigInt n = layer.n_from + 1; n <= layer.n_to; ++n) {
                    CertifiedReal v = (layer.radius * CertifiedReal(n) * phi_at(n)).rounded(prec);
                    Certainty c = less_equal(v, CertifiedReal(1));
                    if (c == Certainty::False) all_ok = Certainty::False;
                    if (c == Certainty::Undecided && all_ok == Certainty::True) all_ok = Certainty::Undecided;
                    worst = first ? v : max(worst, v);
                    first = false;
                }
            }
            AuditRecord r;
            r.id = "Gk_in_Fk";
            r.k = k;
            r.relation = "<=";
            r.lhs = worst;
            r.rhs = CertifiedReal(1);
            r.holds = all_ok;
            r.note = "max over balls of radius * n phi(n)";
            out.push_back(std::move(r));
            const BigInt n_min = g.layers.back().n_from + 1;
            add_bool("Gk_index_range", k, ">", CertifiedReal(n_min), CertifiedReal(qkm1), n_min > qkm1,
                     "smallest orbit index vs q_{k-1}");
        }

        // Lower bounds for G_k.
        const CertifiedReal inv8phi = CertifiedReal(Rational(1, 8)) / g.phi_qk1;
        {
            Rational q(qk1 + qk, qk1 - (g.b_next - 1) * qk);
            q.canonicalize();
            add("ineq0_middle", k, ">=", mu_g, (inv8phi * log(CertifiedReal(q), prec)).rounded(prec));
            Rational q2(qk1 + qk, qk + g.q_star);
            q2.canonicalize();
            add("ineq0", k, ">=", mu_g, (inv8phi * log(CertifiedReal(q2), prec)).rounded(prec));
        }
        if (small_phi) {
            CertifiedReal rhs = log(phi_at(g.q_star), prec) / (CertifiedReal(16) * g.phi_qk1);
            add("ineq1", k, ">=", mu_g, rhs.rounded(prec));
        }
        if (g.q_star == qk) {
            // needs q_{k-1} >= 1; at k = 0, b = a_1 - 1
            if (k >= 1) {
                add_bool("ineq2_b", k, "==", CertifiedReal(g.b_next), CertifiedReal(table_.a(k + 1)),
                         g.b_next == table_.a(k + 1), "q* = q_k forces b_{k+1} = a_{k+1}");
            }
            Rational q(qk1 + qk, qk + qkm1);
            q.canonicalize();
            add("ineq2", k, ">=", mu_g, (inv8phi * log(CertifiedReal(q), prec)).rounded(prec));
        }
    }
    return out;
}

std::vector<QuasiRecord> MeasureLab::quasi_independence(
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<QuasiRecord> out;
    const unsigned prec = opt_.precision_bits;
    for (const auto& [l, k] : pairs) {
        if (l >= k) throw ValidationError("quasi-independence pairs need l < k");
        const MeasuredSet& gl = build_Gk(l).all;
        const MeasuredSet& gk = build_Gk(k).all;
        QuasiRecord r;
        r.l = l;
        r.k = k;
        CircleIntervalSet inter = gk.set.intersect(gl.set);
        r.lhs = CertifiedReal(inter.measure(), gk.perturbation() + gl.perturbation());
        const std::size_t d = k - l;
        CertifiedReal decay;
        if (d % 2 == 0) {
            decay = CertifiedReal(Rational(BigInt(1), BigInt(1) << (d / 2)));
        } else {
            Rational e(-static_cast<long>(d), 2);
            decay = exp(CertifiedReal(e) * log(CertifiedReal(2), prec), prec);
        }
        const CertifiedReal mk = gk.measure();
        r.rhs = (mk * gl.measure() + CertifiedReal(6) * decay * mk).rounded(prec);
        r.holds = less(r.lhs, r.rhs);
        out.push_back(std::move(r));
    }
    return out;
}

DenjoyKoksmaResult MeasureLab::denjoy_koksma_count(const Rational& start, const Rational& length,
                                                   std::size_t k, const Rational& x0) {
    if (sgn(length) <= 0) throw ValidationError("arc length must be positive");
    require(k);
    DenjoyKoksmaResult res;
    res.k = k;
    res.q_k = table_.q(k);
    const CircleIntervalSet arc = CircleIntervalSet::arc(start, length);
    const Rational mu = arc.measure();
    res.expected = Rational(res.q_k) * mu;
    res.bound_low = res.expected - 2;
    res.bound_high = res.expected + 2;

    const unsigned long n_count = res.q_k.get_ui();
    std::vector<unsigned long> pending(n_count);
    for (unsigned long n = 0; n < n_count; ++n) pending[n] = n;
    BigInt count = 0;
    Rational tol = Rational(1, 1) / Rational(BigInt(1) << 64) / Rational(res.q_k);
    for (unsigned bits = 64; !pending.empty(); bits += 64) {
        if (bits > kMaxEscalationBits) {
            throw PrecisionError("orbit point " + std::to_string(pending.front()) +
                                 " lies too close to the arc boundary");
        }
        ThetaApprox ta = approx_within(table_, tol, opt_.cap_k);
        std::vector<unsigned long> next;
        for (unsigned long n : pending) {
            BigInt nb(n);
            Rational pos = x0 + center_of(nb, ta);
            Certainty c = arc.contains_certified(pos, Rational(nb) * ta.error);
            if (c == Certainty::True) {
                ++count;
            } else if (c == Certainty::Undecided) {
                next.push_back(n);
            }
        }
        pending.swap(next);
        tol /= Rational(BigInt(1) << 64);
    }
    res.count = count;
    res.holds = abs(Rational(count) - res.expected) < 2;
    return res;
}

nlohmann::ordered_json to_json(const AuditRecord& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["k"] = r.k;
    j["relation"] = r.relation;
    put_certified(j, "lhs", r.lhs);
    put_certified(j, "rhs", r.rhs);
    j["holds"] = r.holds == Certainty::True;
    j["status"] = to_string(r.holds);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

nlohmann::ordered_json to_json(const QuasiRecord& r) {
    nlohmann::ordered_json j;
    j["l"] = r.l;
    j["k"] = r.k;
    put_certified(j, "lhs", r.lhs);
    put_certified(j, "rhs", r.rhs);
    j["holds"] = r.holds == Certainty::True;
    j["status"] = to_string(r.holds);
    return j;
}

nlohmann::ordered_json to_json(const DenjoyKoksmaResult& r) {
    nlohmann::ordered_json j;
    j["k"] = r.k;
    j["q_k"] = r.q_k.get_str();
    j["count"] = r.count.get_str();
    j["expected"] = decimal_str(r.expected, 12);
    j["expected_exact"] = rational_str(r.expected);
    j["bound_low"] = rational_str(r.bound_low);
    j["bound_high"] = rational_str(r.bound_high);
    j["holds"] = r.holds;
    return j;
}

nlohmann::ordered_json to_json(const GkStructure& g) {
    nlohmann::ordered_json j;
    j["k"] = g.k;
    j["q_k"] = g.q_k.get_str();
    j["q_k1"] = g.q_k1.get_str();
    j["q_star"] = g.q_star.get_str();
    j["b_next"] = g.b_next.get_str();
    put_certified(j, "phi_q_k1", g.phi_qk1);
    put_certified(j, "measure", g.all.measure());
    put_certified(j, "closed_form", g.closed_form());
    j["disjoint"] = g.disjoint_certified();
    j["theta_convergent_index"] = g.all.convergent_index;
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const auto& l : g.layers) {
        nlohmann::ordered_json e;
        e["i"] = l.i.get_str();
        e["n_from_exclusive"] = l.n_from.get_str();
        e["n_to_inclusive"] = l.n_to.get_str();
        put_certified(e, "radius", l.radius);
        put_certified(e, "measure", l.arcs.measure());
        layers.push_back(e);
    }
    j["layers"] = layers;
    return j;
}

}  // namespace rotlab
