#pragma once

#include "rotlab/certified.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rotlab {

/// Half-open arc [lo, hi) with 0 <= lo < hi <= 1.
struct Arc {
    Rational lo;
    Rational hi;
};

/// Finite union of half-open arcs on R/Z with exact rational endpoints.
///
/// Stored arcs are disjoint, non-adjacent and sorted by left endpoint. An arc
/// crossing 0 is stored as two pieces [l, 1) and [0, r).
class CircleIntervalSet {
public:
    CircleIntervalSet() = default;

    static CircleIntervalSet full();
    /// [start, start + length) mod 1; length >= 1 gives the full circle.
    static CircleIntervalSet arc(const Rational& start, const Rational& length);
    /// Union of balls [c - r, c + r) given as (center, radius), radius >= 0.
    static CircleIntervalSet balls(const std::vector<std::pair<Rational, Rational>>& center_radius);
    /// Union of arbitrary (start, length) arcs.
    static CircleIntervalSet from_arcs(const std::vector<std::pair<Rational, Rational>>& start_length);

    const std::vector<Arc>& arcs() const noexcept { return arcs_; }
    bool empty() const noexcept { return arcs_.empty(); }
    bool is_full() const;
    Rational measure() const;

    /// Exact membership of x mod 1.
    bool contains(const Rational& x) const;
    /// Membership of every point within `margin` of x mod 1: True if all are
    /// inside, False if all are outside, Undecided otherwise. margin = 0 is exact.
    Certainty contains_certified(const Rational& x, const Rational& margin) const;

    CircleIntervalSet unite(const CircleIntervalSet& other) const;
    CircleIntervalSet intersect(const CircleIntervalSet& other) const;

    /// "lo,hi" rows with exact "p/q" endpoints.
    std::string to_csv() const;

    friend bool operator==(const CircleIntervalSet& a, const CircleIntervalSet& b);

private:
    static CircleIntervalSet normalize(std::vector<Arc> pieces);
    std::vector<Arc> arcs_;
};

/// Smallest circular gap between distinct balls (c_i, r_i): min over neighbouring
/// centers of dist(c_i, c_j) - r_i - r_j. Negative means two balls overlap.
/// Returns 1 for fewer than two balls.
Rational min_ball_gap(std::vector<std::pair<Rational, Rational>> center_radius);

}  // namespace rotlab
