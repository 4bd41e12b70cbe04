#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aperiodic/core.hpp"
#include "aperiodic/errors.hpp"
#include "aperiodic/hamiltonian.hpp"

// Finite-volume Gibbs states with a fixed boundary configuration: exact
// enumeration and single-site Metropolis sampling.  Terms straddling the
// volume boundary read the boundary source; terms entirely outside are
// constant and dropped.

namespace aperiodic {

// Counter-free splittable generator; documented in output metadata so runs
// are reproducible within this implementation.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // [0, 1) with 53 random bits
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // multiply-shift range reduction
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

private:
    std::uint64_t state_;
};

inline constexpr const char* kRngName = "splitmix64";

struct GibbsProblem {
    HamiltonianSpec spec;
    std::int64_t volume_start = 0;
    std::int64_t volume_len = 0;
    ConfigurationSource boundary; // the configuration X outside (and initially inside) V
    double beta = 1.0;            // inverse temperature, >= 0
};

struct ObservableStat {
    std::string label; // canonical "offset=symbol,..." text of the patch
    double mean = 0.0;
    double se = 0.0;
};

struct GibbsEstimate {
    double beta = 0.0;
    std::string method;          // "exact" | "metropolis"
    std::uint64_t sweeps = 0;
    std::uint64_t burn_in = 0;
    std::uint64_t seed = 0;
    std::string rng = kRngName;
    double energy_mean = 0.0;
    double energy_se = 0.0;
    std::vector<ObservableStat> observables;
};

inline std::string patch_label(const Patch& patch) {
    std::string s;
    for (const auto& cell : patch.cells()) {
        if (!s.empty()) s += ",";
        s += std::to_string(cell.offset) + "=" + std::to_string(int(cell.symbol.id));
    }
    return s;
}

namespace detail {

inline void check_gibbs_problem(const GibbsProblem& pb, const std::vector<Patch>& obs) {
    if (pb.volume_len < 1) throw domain_error("gibbs volume must be non-empty");
    if (pb.beta < 0) throw domain_error("beta must be >= 0");
    if (pb.boundary.alphabet_size() != pb.spec.alphabet)
        throw domain_error("boundary alphabet does not match the spec");
    for (const auto& p : obs)
        if (p.diameter() + 1 > pb.volume_len)
            throw domain_error("observable patch larger than the volume");
}

inline std::int64_t patch_count_in_assignment(const std::vector<std::uint8_t>& a,
                                              const Patch& patch) {
    std::int64_t n = static_cast<std::int64_t>(a.size());
    std::int64_t diam = patch.diameter();
    std::int64_t count = 0;
    for (std::int64_t t = 0; t + diam < n; ++t) {
        bool ok = true;
        for (const auto& cell : patch.cells())
            if (a[static_cast<std::size_t>(t + cell.offset)] != cell.symbol.id) {
                ok = false;
                break;
            }
        if (ok) ++count;
    }
    return count;
}

} // namespace detail

// Exact Boltzmann expectations over all |S|^|V| assignments on the volume,
// boundary fixed.  Log-sum-exp against the minimal energy keeps the weights
// in range.  Observable means are densities over fully-contained placements.
inline GibbsEstimate exact_gibbs(const GibbsProblem& pb, const std::vector<Patch>& observables) {
    detail::check_gibbs_problem(pb, observables);
    const std::size_t S = pb.spec.alphabet;
    const std::int64_t n = pb.volume_len;
    if (std::pow(double(S), double(n)) > double(1 << 24))
        throw budget_error("gibbs volume exceeds the 2^24 enumeration budget");

    std::int64_t maxd = pb.spec.max_diameter();
    Window bwin = pb.boundary.window(pb.volume_start - maxd, n + 2 * maxd);
    auto base_at = [&](std::int64_t i) { return bwin.at(i); };
    auto instances = detail::window_instances(pb.spec, base_at, pb.volume_start, n);

    std::vector<std::uint8_t> assign(static_cast<std::size_t>(n), 0);
    std::vector<double> energies;
    std::vector<std::vector<std::int64_t>> counts(observables.size());
    // pass 1: energies (the constant part from x_value cancels in the ratio,
    // keep absolute energies of the window terms instead)
    for (;;) {
        double e = 0.0;
        for (const auto& inst : instances) {
            std::size_t code = inst.fixed_code;
            for (auto [idx, wt] : inst.inside) code += assign[idx] * wt;
            e += inst.family->table[code];
        }
        energies.push_back(e);
        for (std::size_t k = 0; k < observables.size(); ++k)
            counts[k].push_back(detail::patch_count_in_assignment(assign, observables[k]));
        std::int64_t j = 0;
        while (j < n) {
            if (++assign[static_cast<std::size_t>(j)] < S) break;
            assign[static_cast<std::size_t>(j)] = 0;
            ++j;
        }
        if (j == n) break;
    }
    double emin = energies.front();
    for (double e : energies) emin = std::min(emin, e);
    double z = 0.0, esum = 0.0;
    std::vector<double> osum(observables.size(), 0.0);
    for (std::size_t i = 0; i < energies.size(); ++i) {
        double w = std::exp(-pb.beta * (energies[i] - emin));
        z += w;
        esum += w * energies[i];
        for (std::size_t k = 0; k < observables.size(); ++k)
            osum[k] += w * static_cast<double>(counts[k][i]);
    }
    GibbsEstimate est;
    est.beta = pb.beta;
    est.method = "exact";
    est.energy_mean = esum / z;
    est.energy_se = 0.0;
    for (std::size_t k = 0; k < observables.size(); ++k) {
        double places = static_cast<double>(n - observables[k].diameter());
        est.observables.push_back({patch_label(observables[k]), osum[k] / z / places, 0.0});
    }
    return est;
}

// Single-site Metropolis chain: uniform site, uniform different symbol,
// acceptance min(1, e^{-beta dH}) with dH summed exactly over the terms
// covering the site.  Standard errors come from 32 batch means.
inline GibbsEstimate metropolis_sample(const GibbsProblem& pb, std::uint64_t sweeps,
                                       std::uint64_t burn_in, std::uint64_t seed,
                                       const std::vector<Patch>& observables) {
    detail::check_gibbs_problem(pb, observables);
    if (sweeps <= burn_in) throw domain_error("sweeps must exceed burn_in");
    const std::size_t S = pb.spec.alphabet;
    const std::int64_t n = pb.volume_len;

    std::int64_t maxd = pb.spec.max_diameter();
    Window bwin = pb.boundary.window(pb.volume_start - maxd, n + 2 * maxd);
    auto base_at = [&](std::int64_t i) { return bwin.at(i); };
    auto instances = detail::window_instances(pb.spec, base_at, pb.volume_start, n);

    // per-site lists of instances covering that site
    std::vector<std::vector<const detail::WindowInstance*>> covering(
        static_cast<std::size_t>(n));
    for (const auto& inst : instances)
        for (auto [idx, wt] : inst.inside) covering[idx].push_back(&inst);

    std::vector<std::uint8_t> state(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j)
        state[static_cast<std::size_t>(j)] = base_at(pb.volume_start + j).id;

    auto total_energy = [&] {
        double e = 0.0;
        for (const auto& inst : instances) {
            std::size_t code = inst.fixed_code;
            for (auto [idx, wt] : inst.inside) code += state[idx] * wt;
            e += inst.family->table[code];
        }
        return e;
    };
    auto local_energy = [&](std::size_t site) {
        double e = 0.0;
        for (const auto* inst : covering[site]) {
            std::size_t code = inst->fixed_code;
            for (auto [idx, wt] : inst->inside) code += state[idx] * wt;
            e += inst->family->table[code];
        }
        return e;
    };

    SplitMix64 rng(seed);
    double energy = total_energy();

    const std::uint64_t measured = sweeps - burn_in;
    const std::uint64_t batches = std::min<std::uint64_t>(32, measured);
    std::vector<double> ebatch(batches, 0.0);
    std::vector<std::vector<double>> obatch(observables.size(),
                                            std::vector<double>(batches, 0.0));
    std::vector<std::uint64_t> batch_n(batches, 0);

    for (std::uint64_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::int64_t step = 0; step < n; ++step) {
            std::size_t site = static_cast<std::size_t>(rng.next_below(std::uint64_t(n)));
            std::uint8_t old_sym = state[site];
            std::uint8_t new_sym = static_cast<std::uint8_t>(
                (old_sym + 1 + rng.next_below(std::uint64_t(S - 1))) % S);
            double before = local_energy(site);
            state[site] = new_sym;
            double after = local_energy(site);
            double dh = after - before;
            bool accept = dh <= 0.0 || rng.next_double() < std::exp(-pb.beta * dh);
            if (accept)
                energy += dh;
            else
                state[site] = old_sym;
        }
        if (sweep < burn_in) continue;
        std::uint64_t b = (sweep - burn_in) * batches / measured;
        ebatch[b] += energy;
        ++batch_n[b];
        for (std::size_t k = 0; k < observables.size(); ++k) {
            double places = static_cast<double>(n - observables[k].diameter());
            obatch[k][b] +=
                static_cast<double>(detail::patch_count_in_assignment(state, observables[k])) /
                places;
        }
        if ((sweep - burn_in + 1) * batches % measured == 0)
            energy = total_energy(); // kill float drift at batch boundaries
    }

    auto batch_stats = [&](const std::vector<double>& sums) {
        double mean = 0.0, count = 0.0;
        for (std::size_t b = 0; b < batches; ++b) {
            mean += sums[b];
            count += static_cast<double>(batch_n[b]);
        }
        mean /= count;
        double var = 0.0;
        for (std::size_t b = 0; b < batches; ++b) {
            double bm = sums[b] / static_cast<double>(batch_n[b]);
            var += (bm - mean) * (bm - mean);
        }
        double se = batches > 1
                        ? std::sqrt(var / static_cast<double>(batches - 1) /
                                    static_cast<double>(batches))
                        : 0.0;
        return std::pair<double, double>(mean, se);
    };

    GibbsEstimate est;
    est.beta = pb.beta;
    est.method = "metropolis";
    est.sweeps = sweeps;
    est.burn_in = burn_in;
    est.seed = seed;
    auto [em, ese] = batch_stats(ebatch);
    est.energy_mean = em;
    est.energy_se = ese;
    for (std::size_t k = 0; k < observables.size(); ++k) {
        auto [om, ose] = batch_stats(obatch[k]);
        est.observables.push_back({patch_label(observables[k]), om, ose});
    }
    return est;
}

struct AnnealResult {
    std::vector<GibbsEstimate> estimates; // one per beta, ascending
    bool energy_monotone = true;          // non-increasing within tolerance
};

// Independent chains per beta with derived seeds; seed_i = seed for i == 0 so
// a singleton list reproduces a single metropolis_sample call exactly.
inline AnnealResult anneal_profile(const GibbsProblem& base, std::vector<double> betas,
                                   bool exact_method, std::uint64_t sweeps,
                                   std::uint64_t burn_in, std::uint64_t seed,
                                   const std::vector<Patch>& observables) {
    if (betas.empty()) throw domain_error("anneal profile needs betas");
    for (std::size_t i = 1; i < betas.size(); ++i)
        if (betas[i] <= betas[i - 1])
            throw domain_error("betas must be strictly ascending");
    AnnealResult out;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        GibbsProblem pb = base;
        pb.beta = betas[i];
        std::uint64_t seed_i = seed + std::uint64_t(i) * 0x9E3779B97F4A7C15ULL;
        out.estimates.push_back(exact_method
                                    ? exact_gibbs(pb, observables)
                                    : metropolis_sample(pb, sweeps, burn_in, seed_i,
                                                        observables));
    }
    for (std::size_t i = 1; i < out.estimates.size(); ++i) {
        const auto& prev = out.estimates[i - 1];
        const auto& cur = out.estimates[i];
        double slack = 3.0 * std::sqrt(prev.energy_se * prev.energy_se +
                                       cur.energy_se * cur.energy_se) +
                       1e-9;
        if (cur.energy_mean > prev.energy_mean + slack) out.energy_monotone = false;
    }
    return out;
}

} // namespace aperiodic
