#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aperiodic/core.hpp"
#include "aperiodic/errors.hpp"
#include "aperiodic/quadratic.hpp"

// Generators and exact combinatorics for the symbolic systems: substitutions,
// irrational rotations, continued fractions, forbidden distances, and exact
// Sturmian patch frequencies.

namespace aperiodic {

inline Symbol thue_morse_symbol(std::int64_t i) { return detail::thue_morse_at(i); }

struct SubstitutionRule {
    // images[s] is the word substituted for symbol id s
    std::vector<std::vector<Symbol>> images;

    std::size_t alphabet_size() const { return images.size(); }

    void validate() const {
        if (images.empty()) throw domain_error("substitution rule over empty alphabet");
        for (const auto& img : images) {
            if (img.empty()) throw domain_error("substitution image must be non-empty");
            for (Symbol s : img)
                if (s.id >= images.size())
                    throw domain_error("substitution image symbol outside alphabet");
        }
    }
};

inline SubstitutionRule thue_morse_rule() {
    return SubstitutionRule{{{Symbol{0}, Symbol{1}}, {Symbol{1}, Symbol{0}}}};
}

// 0 -> 01, 1 -> 0
inline SubstitutionRule fibonacci_rule() {
    return SubstitutionRule{{{Symbol{0}, Symbol{1}}, {Symbol{0}}}};
}

// Iterates the substitution on the seed; each iterate is a prefix of the
// next, so the result is the fixed-point prefix anchored at site 0.
inline Window substitution_prefix(const SubstitutionRule& rule, Symbol seed,
                                  int iterations) {
    rule.validate();
    if (seed.id >= rule.alphabet_size())
        throw domain_error("substitution seed outside alphabet");
    if (iterations < 0) throw domain_error("iterations must be >= 0");
    if (iterations > 0 && rule.images[seed.id].front() != seed)
        throw contract_error("substitution has no fixed point from this seed");
    std::vector<Symbol> word{seed};
    for (int it = 0; it < iterations; ++it) {
        std::vector<Symbol> next;
        std::size_t grown = 0;
        for (Symbol s : word) grown += rule.images[s.id].size();
        if (grown > (std::size_t(1) << 26))
            throw budget_error("substitution prefix exceeds the enumeration budget");
        next.reserve(grown);
        for (Symbol s : word)
            for (Symbol t : rule.images[s.id]) next.push_back(t);
        word = std::move(next);
    }
    return Window(0, std::move(word));
}

inline Symbol sturmian_symbol(const RotationNumber& phi, std::int64_t i) {
    return Symbol{static_cast<std::uint8_t>(sturmian_is_one(phi, i) ? 1 : 0)};
}

// Partial quotients a_1..a_depth of phi in (0,1) = [0; a_1, a_2, ...].
inline std::vector<std::int64_t> continued_fraction(const RotationNumber& phi, int depth) {
    if (depth < 1) throw domain_error("continued fraction depth must be >= 1");
    std::vector<std::int64_t> out;
    if (!phi.is_quadratic()) {
        // rational surrogate: plain Euclid; termination means the input was rational
        Quad v = phi.as_quad();
        int128 p = v.a, q = v.c; // x = p/q in (0,1)
        while (static_cast<int>(out.size()) < depth) {
            if (p == 0)
                throw rationality_error(
                    "continued fraction terminated after " + std::to_string(out.size()) +
                    " quotients: the decimal input is rational at this depth");
            int128 a = q / p;
            out.push_back(detail::narrow128(a));
            int128 r = q - a * p;
            q = p;
            p = r;
        }
        return out;
    }
    // exact quadratic-surd recurrence on x = (P + sqrt(Dn)) / Q
    Quad v = phi.as_quad();
    int128 P, Q;
    int128 Dn = int128(v.b) * v.b * v.D;
    if (v.b > 0) { P = v.a; Q = v.c; }
    else { P = -int128(v.a); Q = -int128(v.c); }
    if ((Dn - P * P) % Q != 0) {
        int128 q = Q < 0 ? -Q : Q;
        P *= q;
        Dn *= q * q;
        Q *= q;
    }
    int128 s = detail::isqrt128(Dn);
    auto floor_term = [&](int128 Pk, int128 Qk) -> int128 {
        auto fdiv = [](int128 num, int128 den) {
            int128 q = num / den;
            if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
            return q;
        };
        if (Qk > 0) return fdiv(Pk + s, Qk);
        return -fdiv(Pk + s, -Qk) - 1;
    };
    int128 a0 = floor_term(P, Q);
    P = a0 * Q - P;
    Q = (Dn - P * P) / Q;
    for (int k = 0; k < depth; ++k) {
        if (Q == 0) throw domain_error("degenerate continued-fraction state");
        int128 ak = floor_term(P, Q);
        out.push_back(detail::narrow128(ak));
        P = ak * Q - P;
        Q = (Dn - P * P) / Q;
    }
    return out;
}

enum class BadlyApproximable { YesUpToDepth, No };

// Depth-limited certificate: all partial quotients <= bound.  Not a proof.
inline BadlyApproximable is_badly_approximable_heuristic(const RotationNumber& phi,
                                                         int depth, std::int64_t bound) {
    auto quotients = continued_fraction(phi, depth);
    for (std::int64_t a : quotients)
        if (a > bound) return BadlyApproximable::No;
    return BadlyApproximable::YesUpToDepth;
}

// ---------------------------------------------------------------------------
// Exact circle intervals.  An ArcSet is a disjoint union of half-open arcs
// [l, r) with 0 <= l < r <= 1 and exact endpoints.
// ---------------------------------------------------------------------------
struct CircleInterval {
    Quad left;
    Quad right; // [left, right), non-wrapping piece
};

class ArcSet {
public:
    ArcSet() = default;

    static ArcSet full() {
        ArcSet s;
        s.arcs_.push_back({quad_int(0), quad_int(1)});
        return s;
    }

    // [l, r) taken mod 1; l, r in [0, 1].  l == r yields the empty set.
    static ArcSet interval_mod1(const Quad& l, const Quad& r) {
        ArcSet s;
        int lr = quad_cmp(l, r);
        if (lr == 0) return s;
        if (lr < 0) {
            s.arcs_.push_back({l, r});
        } else { // wraps through 1
            if (quad_cmp(r, quad_int(0)) > 0) s.arcs_.push_back({quad_int(0), r});
            if (quad_cmp(l, quad_int(1)) < 0) s.arcs_.push_back({l, quad_int(1)});
        }
        return s;
    }

    bool empty() const { return arcs_.empty(); }
    const std::vector<CircleInterval>& arcs() const { return arcs_; }

    // translate by s mod 1, s in [0, 1)
    ArcSet shifted(const Quad& s) const {
        ArcSet out;
        for (const auto& arc : arcs_) {
            Quad l = quad_add(arc.left, s);
            Quad r = quad_add(arc.right, s);
            Quad one = quad_int(1);
            if (quad_cmp(r, one) <= 0) {
                out.arcs_.push_back({l, r});
            } else if (quad_cmp(l, one) >= 0) {
                out.arcs_.push_back({quad_sub(l, one), quad_sub(r, one)});
            } else {
                out.arcs_.push_back({l, one});
                out.arcs_.push_back({quad_int(0), quad_sub(r, one)});
            }
        }
        out.sort_arcs();
        return out;
    }

    ArcSet intersect(const ArcSet& other) const {
        ArcSet out;
        for (const auto& x : arcs_) {
            for (const auto& y : other.arcs_) {
                const Quad& l = quad_cmp(x.left, y.left) >= 0 ? x.left : y.left;
                const Quad& r = quad_cmp(x.right, y.right) <= 0 ? x.right : y.right;
                if (quad_cmp(l, r) < 0) out.arcs_.push_back({l, r});
            }
        }
        out.sort_arcs();
        return out;
    }

    Quad total_length() const {
        Quad sum = quad_int(0);
        for (const auto& arc : arcs_) sum = quad_add(sum, quad_sub(arc.right, arc.left));
        return sum;
    }

    // smallest nonzero circular gap between endpoints of *this and of other;
    // used for decimal ambiguity guards.  Exact coincidences are skipped: the
    // half-open convention decides them deterministically (0 and 1 are the
    // same circle point, and wrap splits share endpoints by construction).
    long double min_endpoint_gap(const ArcSet& other) const {
        auto canon = [](const Quad& q) {
            long double v = quad_to_ld(q);
            return v >= 1.0L ? v - 1.0L : v;
        };
        long double best = 1.0L;
        for (const auto& x : arcs_)
            for (const auto& y : other.arcs_)
                for (long double ex : {canon(x.left), canon(x.right)})
                    for (long double ey : {canon(y.left), canon(y.right)}) {
                        long double d = std::fabs(ex - ey);
                        d = std::min(d, 1.0L - d);
                        if (d > 0.0L) best = std::min(best, d);
                    }
        return best;
    }

private:
    void sort_arcs() {
        std::sort(arcs_.begin(), arcs_.end(), [](const CircleInterval& a, const CircleInterval& b) {
            return quad_cmp(a.left, b.left) < 0;
        });
    }

    std::vector<CircleInterval> arcs_;
};

namespace detail {

// I_0 = [0, phi) and I_1 = [phi, 1): the rotation-coding membership arcs.
inline ArcSet letter_arc(const RotationNumber& phi, int letter) {
    Quad p = phi.as_quad();
    return letter == 0 ? ArcSet::interval_mod1(quad_int(0), p)
                       : ArcSet::interval_mod1(p, quad_int(1));
}

inline void decimal_guard(const RotationNumber& phi, std::int64_t scale,
                          const ArcSet& a, const ArcSet& b) {
    if (phi.is_quadratic()) return;
    if (a.min_endpoint_gap(b) < phi.guard_band(scale))
        throw ambiguity_error(
            "decimal rotation number too coarse for an exact interval decision; "
            "raise the declared precision or use the quadratic form");
}

} // namespace detail

struct ForbiddenSet {
    int m = 0;                           // shortest forbidden run of 0s
    std::vector<std::int64_t> distances; // forbidden 1-1 distances, ascending
    std::int64_t k_max = 0;

    bool contains(std::int64_t d) const {
        return std::binary_search(distances.begin(), distances.end(), d);
    }
};

// Forbidden distances and the forbidden run length for phi in (1/2, 1):
// d is forbidden iff [phi,1) and its rotate by -d*phi are disjoint, and a run
// of l zeros is possible iff the first l rotates of [0,phi) meet.
inline ForbiddenSet forbidden_distances(const RotationNumber& phi, std::int64_t k_max) {
    if (k_max < 0) throw domain_error("k_max must be >= 0");
    const Quad& p = phi.as_quad();
    if (quad_cmp(p, quad_make(1, 0, 2, 0)) <= 0 || quad_cmp(p, quad_int(1)) >= 0)
        throw domain_error("forbidden distances require phi in (1/2, 1)");
    ForbiddenSet out;
    out.k_max = k_max;
    ArcSet ones = detail::letter_arc(phi, 1);
    for (std::int64_t d = 1; d <= k_max; ++d) {
        Quad shift = quad_frac(quad_neg(phi.frac_multiple(d)));
        ArcSet rotated = ones.shifted(shift);
        detail::decimal_guard(phi, d, ones, rotated);
        if (ones.intersect(rotated).empty()) out.distances.push_back(d);
    }
    ArcSet zeros = detail::letter_arc(phi, 0);
    ArcSet run = zeros;
    int len = 1;
    for (;; ++len) {
        Quad shift = quad_frac(quad_neg(phi.frac_multiple(len)));
        ArcSet next = zeros.shifted(shift);
        detail::decimal_guard(phi, len, run, next);
        ArcSet meet = run.intersect(next);
        if (meet.empty()) break;
        run = meet;
        if (len > 4096) throw domain_error("zero-run search failed to terminate");
    }
    out.m = len + 1;
    return out;
}

// Exact frequency of a binary patch in the Sturmian system: the length of
// the cylinder set  intersection of (I_{s} - o*phi)  over the patch cells.
inline double sturmian_patch_frequency(const RotationNumber& phi, const Patch& patch) {
    ArcSet cyl = ArcSet::full();
    for (const auto& cell : patch.cells()) {
        if (cell.symbol.id > 1)
            throw domain_error("sturmian patch frequency needs a binary patch");
        Quad shift = quad_frac(quad_neg(phi.frac_multiple(cell.offset)));
        ArcSet arc = detail::letter_arc(phi, cell.symbol.id).shifted(shift);
        detail::decimal_guard(phi, cell.offset, cyl, arc);
        cyl = cyl.intersect(arc);
    }
    return quad_to_double(cyl.total_length());
}

// Birkhoff average at scale L: patch count over [0, L) divided by the number
// of fully-contained placements.
inline double empirical_frequency(const ConfigurationSource& source, const Patch& patch,
                                  std::int64_t L) {
    if (L < patch.diameter() + 1)
        throw domain_error("empirical frequency needs L >= patch diameter + 1");
    Window w = source.window(0, L);
    return static_cast<double>(count_patch(w, patch)) /
           static_cast<double>(L - patch.diameter());
}

} // namespace aperiodic
