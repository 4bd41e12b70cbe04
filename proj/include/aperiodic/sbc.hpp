#pragma once

#include <cstdint>
#include <thread>
#include <vector>

#include "aperiodic/core.hpp"
#include "aperiodic/errors.hpp"
#include "aperiodic/hamiltonian.hpp"
#include "aperiodic/wang.hpp"

// Strict Boundary Condition testers: window discrepancy profiles (1D form),
// broken-bond ratios (excitation form), tiling deviations (2D form), and the
// balanced-word diagnostic.

namespace aperiodic {

struct DiscrepancyRow {
    std::int64_t L = 0;
    double D = 0.0;              // max over windows of |count - omega * placements|
    std::int64_t argmax_start = 0;
};

struct DiscrepancyReport {
    double omega = 0.0;
    std::int64_t prefix = 0;
    bool exhaustive = true;
    std::vector<DiscrepancyRow> rows; // sorted by L
};

// For each L: the exact maximum over all windows of length L inside
// [0, prefix) of |count_patch - omega * (L - diameter)|.  Fully-contained
// placements, so omega multiplies the placement count, not the raw length.
inline DiscrepancyReport discrepancy_profile(const ConfigurationSource& source,
                                             const Patch& patch, double omega,
                                             std::vector<std::int64_t> lengths,
                                             std::int64_t prefix) {
    std::sort(lengths.begin(), lengths.end());
    if (lengths.empty()) throw domain_error("discrepancy profile needs lengths");
    std::int64_t diam = patch.diameter();
    if (lengths.front() < diam + 1)
        throw domain_error("window length below patch diameter + 1");
    if (lengths.back() > prefix)
        throw domain_error("window length exceeds the scanned prefix");

    Window w = source.window(0, prefix);
    // prefix sums of the match indicator: placements t in [0, prefix - diam)
    std::int64_t places = prefix - diam;
    std::vector<std::int64_t> ps(static_cast<std::size_t>(places) + 1, 0);
    for (std::int64_t t = 0; t < places; ++t)
        ps[static_cast<std::size_t>(t) + 1] =
            ps[static_cast<std::size_t>(t)] + (patch.matches(w, t) ? 1 : 0);

    DiscrepancyReport report;
    report.omega = omega;
    report.prefix = prefix;
    for (std::int64_t L : lengths) {
        double expected = omega * static_cast<double>(L - diam);
        DiscrepancyRow row{L, -1.0, 0};
        for (std::int64_t s = 0; s + L <= prefix; ++s) {
            std::int64_t cnt = ps[static_cast<std::size_t>(s + L - diam)] -
                               ps[static_cast<std::size_t>(s)];
            double dev = std::abs(static_cast<double>(cnt) - expected);
            if (dev > row.D) {
                row.D = dev;
                row.argmax_start = s;
            }
        }
        report.rows.push_back(row);
    }
    return report;
}

// Envelope form of the profile: for each checkpoint C, the maximum of D(l)
// over every window length l <= C.  This is the quantity that grows without
// bound when the Strict Boundary Condition fails; per-length D can dip at
// self-similar lengths (dyadic windows of the Thue-Morse word are nearly
// balanced) while the envelope keeps climbing.
inline DiscrepancyReport discrepancy_envelope(const ConfigurationSource& source,
                                              const Patch& patch, double omega,
                                              std::vector<std::int64_t> checkpoints,
                                              std::int64_t prefix, int threads = 1) {
    std::sort(checkpoints.begin(), checkpoints.end());
    if (checkpoints.empty()) throw domain_error("discrepancy envelope needs checkpoints");
    std::int64_t diam = patch.diameter();
    if (checkpoints.front() < diam + 1)
        throw domain_error("checkpoint below patch diameter + 1");
    if (checkpoints.back() > prefix)
        throw domain_error("checkpoint exceeds the scanned prefix");
    if (threads < 1) throw domain_error("thread count must be >= 1");

    Window w = source.window(0, prefix);
    std::int64_t places = prefix - diam;
    std::vector<std::int64_t> ps(static_cast<std::size_t>(places) + 1, 0);
    for (std::int64_t t = 0; t < places; ++t)
        ps[static_cast<std::size_t>(t) + 1] =
            ps[static_cast<std::size_t>(t)] + (patch.matches(w, t) ? 1 : 0);

    const std::int64_t l_max = checkpoints.back();
    std::vector<double> dmax(static_cast<std::size_t>(l_max) + 1, 0.0);
    std::vector<std::int64_t> darg(static_cast<std::size_t>(l_max) + 1, 0);
    auto scan_length = [&](std::int64_t L) {
        double expected = omega * static_cast<double>(L - diam);
        double best = -1.0;
        std::int64_t arg = 0;
        for (std::int64_t s = 0; s + L <= prefix; ++s) {
            double dev = std::abs(static_cast<double>(ps[static_cast<std::size_t>(s + L - diam)] -
                                                      ps[static_cast<std::size_t>(s)]) -
                                  expected);
            if (dev > best) {
                best = dev;
                arg = s;
            }
        }
        dmax[static_cast<std::size_t>(L)] = best;
        darg[static_cast<std::size_t>(L)] = arg;
    };
    if (threads == 1) {
        for (std::int64_t L = diam + 1; L <= l_max; ++L) scan_length(L);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::int64_t L = diam + 1 + t; L <= l_max; L += threads)
                    scan_length(L);
            });
        for (auto& th : pool) th.join();
    }

    DiscrepancyReport report;
    report.omega = omega;
    report.prefix = prefix;
    double cum = 0.0;
    std::int64_t cum_arg = 0;
    std::size_t next = 0;
    for (std::int64_t L = diam + 1; L <= l_max; ++L) {
        if (dmax[static_cast<std::size_t>(L)] > cum) {
            cum = dmax[static_cast<std::size_t>(L)];
            cum_arg = darg[static_cast<std::size_t>(L)];
        }
        while (next < checkpoints.size() && checkpoints[next] == L) {
            report.rows.push_back({L, cum, cum_arg});
            ++next;
        }
    }
    return report;
}

struct ExcitationRatio {
    std::int64_t patch_diff = 0;  // n_ar(Y|X)
    std::int64_t broken = 0;      // B(Y)
    double ratio = 0.0;           // |n| / B
    bool unbounded = false;       // B == 0 with |n| > 0
};

// Excitation-form probe: |n_ar(Y|X)| against the broken-bond count.  A family with
// bounded B and unbounded |n| certifies SBC failure.
inline ExcitationRatio sbc_excitation_ratio(const HamiltonianSpec& spec,
                                            const Excitation& e, const Patch& patch) {
    if (e.empty()) throw contract_error("sbc ratio needs a non-empty excitation");
    ExcitationRatio out;
    std::int64_t margin = std::max(patch.diameter(), spec.max_diameter());
    out.patch_diff = diff_count(e, patch, std::max<std::int64_t>(margin, 1));
    out.broken = broken_bonds(spec, e);
    if (out.broken > 0)
        out.ratio = static_cast<double>(std::abs(out.patch_diff)) /
                    static_cast<double>(out.broken);
    else
        out.unbounded = out.patch_diff != 0;
    return out;
}

struct TilingDeviation {
    std::int64_t count = 0;     // n_ar
    double expected = 0.0;      // omega * |Lambda|
    double deviation = 0.0;     // |count - expected|
    std::int64_t perimeter = 0; // P(Lambda), edges
    double per_boundary = 0.0;  // deviation / P
};

// 2D form: patch-count deviation against omega * |Lambda|, normalized by the
// region perimeter.
inline TilingDeviation tiling_discrepancy(const TilingGrid& grid, const Patch2D& patch,
                                          double omega) {
    TilingDeviation out;
    out.count = count_patch_2d(grid, patch);
    const auto& rg = grid.region();
    out.expected = omega * static_cast<double>(rg.cells());
    out.deviation = std::abs(static_cast<double>(out.count) - out.expected);
    out.perimeter = 2 * (rg.width + rg.height);
    out.per_boundary = out.deviation / static_cast<double>(out.perimeter);
    return out;
}

// Balanced-word diagnostic: max over lengths l <= L_max of the spread
// (max - min) of symbol counts over all windows of length l inside a prefix
// of 4 * L_max sites.  Balanced words give exactly 1.
inline std::int64_t balanced_check(const ConfigurationSource& source, Symbol symbol,
                                   std::int64_t L_max) {
    if (source.alphabet_size() != 2)
        throw domain_error("balanced check is defined for binary alphabets");
    if (L_max < 1) throw domain_error("L_max must be >= 1");
    std::int64_t prefix = 4 * L_max;
    Window w = source.window(0, prefix);
    std::vector<std::int64_t> ps(static_cast<std::size_t>(prefix) + 1, 0);
    for (std::int64_t i = 0; i < prefix; ++i)
        ps[static_cast<std::size_t>(i) + 1] =
            ps[static_cast<std::size_t>(i)] + (w.at(i) == symbol ? 1 : 0);
    std::int64_t worst = 0;
    for (std::int64_t len = 1; len <= L_max; ++len) {
        std::int64_t lo = prefix, hi = 0;
        for (std::int64_t s = 0; s + len <= prefix; ++s) {
            std::int64_t c = ps[static_cast<std::size_t>(s + len)] -
                             ps[static_cast<std::size_t>(s)];
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

} // namespace aperiodic
