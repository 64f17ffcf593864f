#include "rotlab/circle_set.hpp"

#include "rotlab/errors.hpp"

#include <algorithm>
#include <sstream>

namespace rotlab {

namespace {

void push_wrapped(std::vector<Arc>& out, const Rational& start, const Rational& length) {
    if (sgn(length) < 0) throw ValidationError("arc length must be nonnegative");
    if (sgn(length) == 0) return;
    if (length >= 1) {
        out.push_back(Arc{Rational(0), Rational(1)});
        return;
    }
    Rational lo = frac(start);
    Rational hi = lo + length;
    if (hi <= 1) {
        out.push_back(Arc{lo, hi});
    } else {
        out.push_back(Arc{lo, Rational(1)});
        out.push_back(Arc{Rational(0), hi - 1});
    }
}

Rational circle_dist(const Rational& a, const Rational& b) {
    Rational d = abs(a - b);
    Rational e = 1 - d;
    return d < e ? d : e;
}

}  // namespace

CircleIntervalSet CircleIntervalSet::normalize(std::vector<Arc> pieces) {
    std::sort(pieces.begin(), pieces.end(),
              [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
    CircleIntervalSet out;
    for (auto& p : pieces) {
        if (!out.arcs_.empty() && p.lo <= out.arcs_.back().hi) {
            if (p.hi > out.arcs_.back().hi) out.arcs_.back().hi = std::move(p.hi);
        } else {
            out.arcs_.push_back(std::move(p));
        }
    }
    return out;
}

CircleIntervalSet CircleIntervalSet::full() {
    CircleIntervalSet s;
    s.arcs_.push_back(Arc{Rational(0), Rational(1)});
    return s;
}

CircleIntervalSet CircleIntervalSet::arc(const Rational& start, const Rational& length) {
    std::vector<Arc> pieces;
    push_wrapped(pieces, start, length);
    return normalize(std::move(pieces));
}

CircleIntervalSet CircleIntervalSet::balls(const std::vector<std::pair<Rational, Rational>>& center_radius) {
    std::vector<Arc> pieces;
    pieces.reserve(center_radius.size() + 2);
    for (const auto& [c, r] : center_radius) push_wrapped(pieces, c - r, 2 * r);
    return normalize(std::move(pieces));
}

CircleIntervalSet CircleIntervalSet::from_arcs(const std::vector<std::pair<Rational, Rational>>& start_length) {
    std::vector<Arc> pieces;
    pieces.reserve(start_length.size() + 2);
    for (const auto& [s, l] : start_length) push_wrapped(pieces, s, l);
    return normalize(std::move(pieces));
}

bool CircleIntervalSet::is_full() const {
    return arcs_.size() == 1 && sgn(arcs_[0].lo) == 0 && arcs_[0].hi == 1;
}

Rational CircleIntervalSet::measure() const {
    Rational m(0);
    for (const auto& a : arcs_) m += a.hi - a.lo;
    return m;
}

bool CircleIntervalSet::contains(const Rational& x) const {
    Rational y = frac(x);
    auto it = std::upper_bound(arcs_.begin(), arcs_.end(), y,
                               [](const Rational& v, const Arc& a) { return v < a.lo; });
    if (it == arcs_.begin()) return false;
    --it;
    return y < it->hi;
}

Certainty CircleIntervalSet::contains_certified(const Rational& x, const Rational& margin) const {
    const bool inside = contains(x);
    if (sgn(margin) == 0 || arcs_.empty() || is_full()) {
        return inside ? Certainty::True : Certainty::False;
    }
    Rational y = frac(x);
    // The seam at 0 is not a boundary when both sides are covered.
    const bool seam = sgn(arcs_.front().lo) == 0 && arcs_.back().hi == 1;
    std::vector<const Rational*> nearby;
    auto it = std::upper_bound(arcs_.begin(), arcs_.end(), y,
                               [](const Rational& v, const Arc& a) { return v < a.lo; });
    auto add_arc = [&](std::vector<Arc>::const_iterator a) {
        if (!(seam && a == arcs_.begin())) nearby.push_back(&a->lo);
        if (!(seam && a == arcs_.end() - 1)) nearby.push_back(&a->hi);
    };
    if (it != arcs_.end()) add_arc(it);
    if (it != arcs_.begin()) add_arc(it - 1);
    // wrap-around neighbours
    add_arc(arcs_.begin());
    add_arc(arcs_.end() - 1);
    for (const Rational* b : nearby) {
        if (circle_dist(y, *b) <= margin) return Certainty::Undecided;
    }
    return inside ? Certainty::True : Certainty::False;
}

CircleIntervalSet CircleIntervalSet::unite(const CircleIntervalSet& other) const {
    std::vector<Arc> pieces = arcs_;
    pieces.insert(pieces.end(), other.arcs_.begin(), other.arcs_.end());
    return normalize(std::move(pieces));
}

CircleIntervalSet CircleIntervalSet::intersect(const CircleIntervalSet& other) const {
    CircleIntervalSet out;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < arcs_.size() && j < other.arcs_.size()) {
        const Arc& a = arcs_[i];
        const Arc& b = other.arcs_[j];
        const Rational& lo = a.lo < b.lo ? b.lo : a.lo;
        const Rational& hi = a.hi < b.hi ? a.hi : b.hi;
        if (lo < hi) out.arcs_.push_back(Arc{lo, hi});
        if (a.hi < b.hi) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

std::string CircleIntervalSet::to_csv() const {
    std::ostringstream out;
    out << "lo,hi\n";
    for (const auto& a : arcs_) out << rational_str(a.lo) << ',' << rational_str(a.hi) << '\n';
    return out.str();
}

bool operator==(const CircleIntervalSet& a, const CircleIntervalSet& b) {
    if (a.arcs_.size() != b.arcs_.size()) return false;
    for (std::size_t i = 0; i < a.arcs_.size(); ++i) {
        if (a.arcs_[i].lo != b.arcs_[i].lo || a.arcs_[i].hi != b.arcs_[i].hi) return false;
    }
    return true;
}

Rational min_ball_gap(std::vector<std::pair<Rational, Rational>> center_radius) {
    if (center_radius.size() < 2) return Rational(1);
    for (auto& cr : center_radius) cr.first = frac(cr.first);
    std::sort(center_radius.begin(), center_radius.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Rational best;
    for (std::size_t i = 0; i < center_radius.size(); ++i) {
        const auto& a = center_radius[i];
        const auto& b = center_radius[(i + 1) % center_radius.size()];
        Rational d = b.first - a.first;
        if (sgn(d) < 0 || (i + 1 == center_radius.size())) d += 1;
        Rational gap = d - a.second - b.second;
        if (i == 0 || gap < best) best = gap;
    }
    return best;
}

}  // namespace rotlab
