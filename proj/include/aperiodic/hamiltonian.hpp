#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aperiodic/core.hpp"
#include "aperiodic/errors.hpp"
#include "aperiodic/symbolic.hpp"

// Interaction families and energy algebra: the four-spin Thue-Morse
// Hamiltonian, the Sturmian forbidden-distance Hamiltonian, chemical
// potentials, relative energies, broken bonds, and ground-state checks.

namespace aperiodic {

// One translation-invariant family of interaction terms.  The family's term
// at anchor i acts on sites {i + o : o in offsets}; its energy is a full
// table over symbol assignments, indexed by sum_k sym(offsets[k]) * S^k.
struct TermFamily {
    std::string id;
    std::vector<std::int64_t> offsets; // distinct, sorted, offsets[0] == 0
    std::vector<double> table;
    double coupling = 1.0;
    double min_energy = 0.0;
    double max_energy = 0.0;
    bool chemical = false;    // chemical-potential term; excluded from bond counting
    bool normalized01 = true; // energies take exactly the values {0, coupling}

    std::int64_t diameter() const { return offsets.back(); }

    void finalize() {
        if (offsets.empty() || offsets.front() != 0)
            throw contract_error("term offsets must be normalized with minimum 0");
        min_energy = table.front();
        max_energy = table.front();
        for (double v : table) {
            min_energy = std::min(min_energy, v);
            max_energy = std::max(max_energy, v);
        }
        normalized01 = min_energy == 0.0;
        for (double v : table)
            if (v != 0.0 && (!normalized01 || (max_energy != 0.0 && v != max_energy)))
                normalized01 = false;
    }

    template <class SymAt>
    double value_at(std::size_t alphabet, SymAt&& sym_at, std::int64_t anchor) const {
        std::size_t code = 0, w = 1;
        for (std::int64_t o : offsets) {
            code += sym_at(anchor + o).id * w;
            w *= alphabet;
        }
        return table[code];
    }
};

struct HamiltonianSpec {
    enum class Family { ThueMorse, SturmianPair, FiniteRange };

    Family family = Family::FiniteRange;
    std::size_t alphabet = 2;
    std::vector<TermFamily> terms;
    std::vector<std::pair<Patch, double>> chemical_potentials;

    // parameters of the parametric families (valid for the matching kind)
    double tm_lambda = 0.25;
    int tm_r_max = 8;
    int tm_p_max = 8;
    std::optional<RotationNumber> phi;
    double st_alpha = 4.0;
    std::int64_t st_k_max = 64;
    int st_m = 0;

    // truncation tail: bound on the neglected |energy change| per override site
    double tail_unit = 0.0;

    std::int64_t max_diameter() const {
        std::int64_t d = 0;
        for (const auto& f : terms) d = std::max(d, f.diameter());
        return d;
    }
};

namespace detail {

inline double spin(std::uint8_t id) { return id == 0 ? 1.0 : -1.0; } // '+' is id 0

inline std::vector<std::int64_t> distinct_sorted(std::vector<std::int64_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace detail

// Four-spin family J(r,p) (s_i + s_{i+2^r})^2 (s_{i+(2p+1)2^r} + s_{i+(2p+2)2^r})^2
// with J(r,p) = lambda^{r+p}, truncated at r <= r_max, p <= p_max.
inline HamiltonianSpec build_tm_hamiltonian(double lambda = 0.25, int r_max = 8,
                                            int p_max = 8) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw domain_error("thue-morse coupling decay requires lambda in (0,1)");
    if (r_max < 0 || p_max < 0 || r_max > 40 || p_max > 40)
        throw domain_error("thue-morse cutoffs out of range");
    HamiltonianSpec spec;
    spec.family = HamiltonianSpec::Family::ThueMorse;
    spec.alphabet = 2;
    spec.tm_lambda = lambda;
    spec.tm_r_max = r_max;
    spec.tm_p_max = p_max;
    for (int r = 0; r <= r_max; ++r) {
        for (int p = 0; p <= p_max; ++p) {
            std::int64_t step = std::int64_t(1) << r;
            std::vector<std::int64_t> raw{0, step, (2 * p + 1) * step, (2 * p + 2) * step};
            TermFamily f;
            f.id = "tm:r=" + std::to_string(r) + ",p=" + std::to_string(p);
            f.offsets = detail::distinct_sorted(raw);
            f.coupling = std::pow(lambda, r + p);
            f.table.resize(std::size_t(1) << f.offsets.size());
            for (std::size_t code = 0; code < f.table.size(); ++code) {
                auto sym = [&](std::int64_t site) {
                    for (std::size_t k = 0; k < f.offsets.size(); ++k)
                        if (f.offsets[k] == site) return std::uint8_t((code >> k) & 1);
                    throw contract_error("offset lookup failed");
                };
                double a = detail::spin(sym(raw[0])) + detail::spin(sym(raw[1]));
                double b = detail::spin(sym(raw[2])) + detail::spin(sym(raw[3]));
                f.table[code] = f.coupling * a * a * b * b;
            }
            f.finalize();
            spec.terms.push_back(std::move(f));
        }
    }
    // neglected couplings: sum of 16 lambda^{r+p} beyond the cutoffs, times the
    // <= 4 intersecting anchors per override site
    double geo = 1.0 / (1.0 - lambda);
    double partial = (1.0 - std::pow(lambda, r_max + 1)) * geo *
                     (1.0 - std::pow(lambda, p_max + 1)) * geo;
    spec.tail_unit = 4.0 * 16.0 * (geo * geo - partial);
    return spec;
}

// Two-body terms d^{-alpha} on the forbidden distances plus the finite-range
// penalty on m consecutive 0s.  Every Sturmian configuration of phi zeroes
// all terms, which is the non-frustration witness.
inline HamiltonianSpec build_sturmian_hamiltonian(const RotationNumber& phi,
                                                  double alpha = 4.0,
                                                  std::int64_t k_max = 64) {
    if (!(alpha > 3.0)) throw domain_error("sturmian pair decay requires alpha > 3");
    if (k_max < 0) throw domain_error("k_max must be >= 0");
    ForbiddenSet forbidden = forbidden_distances(phi, k_max);
    HamiltonianSpec spec;
    spec.family = HamiltonianSpec::Family::SturmianPair;
    spec.alphabet = 2;
    spec.phi = phi;
    spec.st_alpha = alpha;
    spec.st_k_max = k_max;
    spec.st_m = forbidden.m;
    for (std::int64_t d : forbidden.distances) {
        TermFamily f;
        f.id = "pair:d=" + std::to_string(d);
        f.offsets = {0, d};
        f.coupling = std::pow(static_cast<double>(d), -alpha);
        f.table = {0.0, 0.0, 0.0, f.coupling}; // both sites '1'
        f.finalize();
        spec.terms.push_back(std::move(f));
    }
    TermFamily run;
    run.id = "run:m=" + std::to_string(forbidden.m);
    for (int j = 0; j < forbidden.m; ++j) run.offsets.push_back(j);
    run.coupling = 1.0;
    run.table.assign(std::size_t(1) << forbidden.m, 0.0);
    run.table[0] = 1.0; // all sites '0'
    run.finalize();
    spec.terms.push_back(std::move(run));
    spec.tail_unit =
        k_max == 0 ? 2.0 * (1.0 + 1.0 / (alpha - 1.0))
                   : 2.0 * std::pow(static_cast<double>(k_max), 1.0 - alpha) / (alpha - 1.0);
    return spec;
}

inline HamiltonianSpec finite_range_spec(std::vector<TermFamily> terms,
                                         std::size_t alphabet) {
    HamiltonianSpec spec;
    spec.family = HamiltonianSpec::Family::FiniteRange;
    spec.alphabet = alphabet;
    for (auto& f : terms) {
        f.finalize();
        spec.terms.push_back(std::move(f));
    }
    return spec;
}

// Adds a one-patch term contributing -eps per occurrence (eps > 0 favors the
// patch).  Value semantics: the input spec is unchanged.
inline HamiltonianSpec add_chemical_potential(HamiltonianSpec spec, const Patch& patch,
                                              double eps) {
    TermFamily f;
    f.chemical = true;
    f.id = "chem:";
    std::size_t want = 0, w = 1;
    for (const auto& cell : patch.cells()) {
        f.offsets.push_back(cell.offset);
        f.id += std::to_string(cell.offset) + "=" + std::to_string(int(cell.symbol.id)) + ",";
        if (cell.symbol.id >= spec.alphabet)
            throw domain_error("chemical-potential patch symbol outside alphabet");
    }
    f.id.pop_back();
    // dense table over the patch's offset set; -eps exactly on the matching code
    f.table.assign([&] {
        std::size_t n = 1;
        for (std::size_t k = 0; k < f.offsets.size(); ++k) n *= spec.alphabet;
        return n;
    }(), 0.0);
    for (std::size_t k = 0; k < patch.cells().size(); ++k) {
        want += patch.cells()[k].symbol.id * w;
        w *= spec.alphabet;
    }
    f.table[want] = -eps;
    f.coupling = eps;
    f.finalize();
    spec.terms.push_back(std::move(f));
    spec.chemical_potentials.emplace_back(patch, eps);
    return spec;
}

struct EnergyBreakdown {
    double total = 0.0;
    std::map<std::string, double> per_term; // family id -> summed energy change
    double tail_bound = 0.0;
};

namespace detail {

// anchors of family f whose term meets at least one override site
inline std::vector<std::int64_t> meeting_anchors(const TermFamily& f,
                                                 const std::map<std::int64_t, Symbol>& ov) {
    std::vector<std::int64_t> anchors;
    anchors.reserve(ov.size() * f.offsets.size());
    for (const auto& [site, sym] : ov)
        for (std::int64_t o : f.offsets) anchors.push_back(site - o);
    return distinct_sorted(std::move(anchors));
}

} // namespace detail

// H(Y|X): sums term(Y) - term(X) over exactly the terms meeting the override
// sites; every other difference vanishes.
inline EnergyBreakdown relative_energy(const HamiltonianSpec& spec, const Excitation& e) {
    EnergyBreakdown out;
    if (e.empty()) return out;
    std::int64_t lo_ov = e.overrides().begin()->first;
    std::int64_t hi_ov = e.overrides().rbegin()->first;
    std::int64_t maxd = spec.max_diameter();
    std::int64_t lo = lo_ov - maxd;
    std::int64_t len = hi_ov + maxd - lo + 1;
    Window wy = e.window(lo, len);
    Window wx = e.base().window(lo, len);
    auto ysym = [&](std::int64_t i) { return wy.at(i); };
    auto xsym = [&](std::int64_t i) { return wx.at(i); };
    for (const auto& f : spec.terms) {
        double delta = 0.0;
        for (std::int64_t a : detail::meeting_anchors(f, e.overrides()))
            delta += f.value_at(spec.alphabet, ysym, a) - f.value_at(spec.alphabet, xsym, a);
        if (delta != 0.0) out.per_term[f.id] = delta;
        out.total += delta;
    }
    out.tail_bound = spec.tail_unit * static_cast<double>(e.overrides().size());
    return out;
}

struct BondCounts {
    std::int64_t on_excited = 0; // broken bonds of Y near the overrides
    std::int64_t on_base = 0;    // same count on X (0 when X is a ground state)
};

inline BondCounts bond_counts(const HamiltonianSpec& spec, const Excitation& e) {
    BondCounts out;
    if (e.empty()) return out;
    for (const auto& f : spec.terms) {
        if (f.chemical) continue; // bond counting concerns the interaction part only
        if (f.min_energy == f.max_energy) continue;
        if (!f.normalized01)
            throw contract_error("spec not normalizable to {0,1} for bond counting");
        for (std::int64_t a : detail::meeting_anchors(f, e.overrides())) {
            auto ysym = [&](std::int64_t i) { return e.at(i); };
            auto xsym = [&](std::int64_t i) { return e.base().at(i); };
            if (f.value_at(spec.alphabet, ysym, a) != 0.0) ++out.on_excited;
            if (f.value_at(spec.alphabet, xsym, a) != 0.0) ++out.on_base;
        }
    }
    return out;
}

// B(Y): broken bonds of the excitation, counted over the terms meeting the
// override sites.  Equals the global count whenever the base zeroes all terms.
inline std::int64_t broken_bonds(const HamiltonianSpec& spec, const Excitation& e) {
    return bond_counts(spec, e).on_excited;
}

// true iff every term fully contained in [start, start+len) attains its
// recorded minimum on the source
inline bool non_frustration_check(const HamiltonianSpec& spec,
                                  const ConfigurationSource& source, std::int64_t start,
                                  std::int64_t len) {
    Window w = source.window(start, len);
    auto sym = [&](std::int64_t i) { return w.at(i); };
    for (const auto& f : spec.terms)
        for (std::int64_t a = start; a + f.diameter() < start + len; ++a)
            if (f.value_at(spec.alphabet, sym, a) != f.min_energy) return false;
    return true;
}

// Mean energy per lattice site over anchors in [start, start+len); terms may
// extend past the right edge and are evaluated on the source.
inline double energy_density(const HamiltonianSpec& spec, const ConfigurationSource& source,
                             std::int64_t start, std::int64_t len) {
    if (len < 1) throw domain_error("energy density needs a non-empty window");
    auto sym = [&](std::int64_t i) { return source.at(i); };
    double total = 0.0;
    for (const auto& f : spec.terms)
        for (std::int64_t a = start; a < start + len; ++a)
            total += f.value_at(spec.alphabet, sym, a);
    return total / static_cast<double>(len);
}

// ---------------------------------------------------------------------------
// Exhaustive excitation search on a window.
// ---------------------------------------------------------------------------
namespace detail {

struct WindowInstance {
    const TermFamily* family;
    std::int64_t anchor;
    double x_value;
    std::size_t fixed_code; // contribution of sites outside the window
    std::vector<std::pair<std::size_t, std::size_t>> inside; // (window index, weight)
};

template <class SymAt>
std::vector<WindowInstance> window_instances(const HamiltonianSpec& spec, SymAt&& base_at,
                                             std::int64_t start, std::int64_t width) {
    std::vector<WindowInstance> out;
    for (const auto& f : spec.terms) {
        for (std::int64_t a = start - f.diameter(); a < start + width; ++a) {
            WindowInstance inst{&f, a, 0.0, 0, {}};
            std::size_t weight = 1;
            std::size_t base_code = 0;
            for (std::int64_t o : f.offsets) {
                std::int64_t site = a + o;
                std::uint8_t id = base_at(site).id;
                base_code += id * weight;
                if (site >= start && site < start + width)
                    inst.inside.emplace_back(static_cast<std::size_t>(site - start), weight);
                else
                    inst.fixed_code += id * weight;
                weight *= spec.alphabet;
            }
            if (inst.inside.empty()) continue;
            inst.x_value = f.table[base_code];
            out.push_back(std::move(inst));
        }
    }
    return out;
}

} // namespace detail

struct SearchOutcome {
    double min_energy = 0.0;                  // official value: relative_energy of the witness
    Excitation witness;                       // overrides vs the base, normalized
    EnergyBreakdown breakdown;                // breakdown of the witness
    double tail_bound = 0.0;
    std::uint64_t enumerated = 0;
};

// Exact minimizer of H(Y|X) over assignments on [start, start+width), with Y
// elsewhere equal to the base.  With max_flips, the search is restricted to
// the Hamming ball around the base.  Ties resolve to the lexicographically
// smallest override set.
inline SearchOutcome exhaustive_excitation_search(const HamiltonianSpec& spec,
                                                  const ConfigurationSource& source,
                                                  std::int64_t start, std::int64_t width,
                                                  std::optional<int> max_flips = {}) {
    if (width < 1) throw domain_error("search window must be non-empty");
    const std::size_t S = spec.alphabet;
    double budget = 0.0;
    if (max_flips) {
        double total = 0.0, ways = 1.0;
        for (int k = 0; k <= *max_flips && k <= width; ++k) {
            total += ways;
            ways = ways * double(width - k) / double(k + 1) * double(S - 1);
        }
        budget = total;
    } else {
        budget = std::pow(double(S), double(width));
    }
    if (budget > double(1 << 24))
        throw budget_error("excitation search space exceeds the 2^24 enumeration budget");

    std::int64_t maxd = spec.max_diameter();
    Window base_win = source.window(start - maxd, width + 2 * maxd);
    auto base_at = [&](std::int64_t i) { return base_win.at(i); };
    auto instances = detail::window_instances(spec, base_at, start, width);

    std::vector<std::uint8_t> assign(width), base_ids(width);
    for (std::int64_t j = 0; j < width; ++j) base_ids[j] = base_at(start + j).id;

    auto energy_of = [&](const std::vector<std::uint8_t>& a) {
        double e = 0.0;
        for (const auto& inst : instances) {
            std::size_t code = inst.fixed_code;
            for (auto [idx, wt] : inst.inside) code += a[idx] * wt;
            e += inst.family->table[code] - inst.x_value;
        }
        return e;
    };
    auto overrides_of = [&](const std::vector<std::uint8_t>& a) {
        std::map<std::int64_t, Symbol> ov;
        for (std::int64_t j = 0; j < width; ++j)
            if (a[j] != base_ids[j]) ov.emplace(start + j, Symbol{a[j]});
        return ov;
    };

    double best = 0.0;
    std::vector<std::uint8_t> best_assign = base_ids;
    bool have = false;
    std::uint64_t enumerated = 0;
    auto consider = [&](const std::vector<std::uint8_t>& a) {
        ++enumerated;
        double e = energy_of(a);
        if (!have || e < best) {
            best = e;
            best_assign = a;
            have = true;
        } else if (e == best) {
            auto cand = overrides_of(a);
            auto incumbent = overrides_of(best_assign);
            if (std::lexicographical_compare(
                    cand.begin(), cand.end(), incumbent.begin(), incumbent.end(),
                    [](const auto& x, const auto& y) {
                        return x.first != y.first ? x.first < y.first
                                                  : x.second.id < y.second.id;
                    }))
                best_assign = a;
        }
    };

    if (!max_flips) {
        assign = base_ids; // enumerate all codes via an odometer from all-zero
        std::fill(assign.begin(), assign.end(), 0);
        for (;;) {
            consider(assign);
            std::int64_t j = 0;
            while (j < width) {
                if (++assign[j] < S) break;
                assign[j] = 0;
                ++j;
            }
            if (j == width) break;
        }
    } else {
        // Hamming ball: choose flip positions recursively, then symbols
        assign = base_ids;
        auto rec = [&](auto&& self, std::int64_t from, int budget_left) -> void {
            consider(assign);
            if (budget_left == 0) return;
            for (std::int64_t j = from; j < width; ++j) {
                std::uint8_t saved = assign[j];
                for (std::size_t s = 0; s < S; ++s) {
                    if (s == saved) continue;
                    assign[j] = static_cast<std::uint8_t>(s);
                    self(self, j + 1, budget_left - 1);
                }
                assign[j] = saved;
            }
        };
        rec(rec, 0, *max_flips);
    }

    Excitation witness = apply_excitation(source, overrides_of(best_assign));
    EnergyBreakdown breakdown = relative_energy(spec, witness);
    double official = breakdown.total;
    double tail =
        spec.tail_unit * double(max_flips ? std::min<std::int64_t>(*max_flips, width) : width);
    return SearchOutcome{official, std::move(witness), std::move(breakdown), tail,
                         enumerated};
}

struct GroundVerdict {
    bool locally_ground = true;
    double min_energy = 0.0;
    double tail_bound = 0.0;
    Excitation witness;
    EnergyBreakdown breakdown;
};

// Ground-state property probed exhaustively on one window:
// locally-ground iff the enumerated minimum stays above -tail_bound.
inline GroundVerdict is_local_ground_state(const HamiltonianSpec& spec,
                                           const ConfigurationSource& source,
                                           std::int64_t window_start,
                                           std::int64_t window_width,
                                           std::optional<int> max_flips = {}) {
    SearchOutcome s =
        exhaustive_excitation_search(spec, source, window_start, window_width, max_flips);
    GroundVerdict v{s.min_energy >= -s.tail_bound, s.min_energy, s.tail_bound,
                    std::move(s.witness), std::move(s.breakdown)};
    return v;
}

} // namespace aperiodic
