#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "aperiodic/core.hpp"
#include "aperiodic/errors.hpp"
#include "aperiodic/hamiltonian.hpp"

// Zero-temperature stability experiments: excitation-family scans tracking
// the threshold chemical potential, and the exhaustive window search.

namespace aperiodic {

struct FamilyMember {
    std::int64_t size = 0; // width / scale parameter
    std::string id;
    std::map<std::int64_t, Symbol> overrides;
};

// Finite, enumerable families of local excitations of a binary source.
class ExcitationFamily {
public:
    ExcitationFamily(ConfigurationSource base, std::vector<FamilyMember> members)
        : base_(std::move(base)), members_(std::move(members)) {
        if (base_.alphabet_size() != 2)
            throw domain_error("excitation families flip binary configurations");
    }

    static ExcitationFamily single_flips(const ConfigurationSource& base,
                                         std::int64_t start, std::int64_t count) {
        std::vector<FamilyMember> members;
        for (std::int64_t i = start; i < start + count; ++i) {
            FamilyMember m{1, "flip@" + std::to_string(i), {}};
            m.overrides.emplace(i, flipped(base, i));
            members.push_back(std::move(m));
        }
        return ExcitationFamily(base, std::move(members));
    }

    // flip the block [a, a+w) for every width w and anchor a in the given range
    static ExcitationFamily contiguous_block_flips(const ConfigurationSource& base,
                                                   const std::vector<std::int64_t>& widths,
                                                   std::int64_t anchor_start,
                                                   std::int64_t anchor_count) {
        std::vector<FamilyMember> members;
        for (std::int64_t w : widths) {
            if (w < 1) throw domain_error("block width must be >= 1");
            for (std::int64_t a = anchor_start; a < anchor_start + anchor_count; ++a) {
                FamilyMember m{w, "block@" + std::to_string(a) + "+" + std::to_string(w), {}};
                for (std::int64_t i = a; i < a + w; ++i)
                    m.overrides.emplace(i, flipped(base, i));
                members.push_back(std::move(m));
            }
        }
        return ExcitationFamily(base, std::move(members));
    }

    // flip dyadic blocks [a*2^k, (a+1)*2^k), aligned with the four-spin
    // family's lag structure
    static ExcitationFamily dyadic_block_flips(const ConfigurationSource& base,
                                               const std::vector<int>& scales,
                                               std::int64_t blocks_per_scale) {
        std::vector<FamilyMember> members;
        for (int k : scales) {
            if (k < 0 || k > 24) throw domain_error("dyadic scale out of range");
            std::int64_t w = std::int64_t(1) << k;
            for (std::int64_t a = 0; a < blocks_per_scale; ++a) {
                FamilyMember m{w, "dyadic@" + std::to_string(a) + "<<" + std::to_string(k), {}};
                for (std::int64_t i = a * w; i < (a + 1) * w; ++i)
                    m.overrides.emplace(i, flipped(base, i));
                members.push_back(std::move(m));
            }
        }
        return ExcitationFamily(base, std::move(members));
    }

    const ConfigurationSource& base() const { return base_; }
    const std::vector<FamilyMember>& members() const { return members_; }

    Excitation realize(const FamilyMember& m) const {
        return apply_excitation(base_, m.overrides);
    }

private:
    static Symbol flipped(const ConfigurationSource& base, std::int64_t i) {
        return Symbol{static_cast<std::uint8_t>(1 - base.at(i).id)};
    }

    ConfigurationSource base_;
    std::vector<FamilyMember> members_;
};

struct StabilityRow {
    std::int64_t size = 0;
    std::string best_id;        // member minimizing H/n at this size (or H if no n > 0)
    double energy = 0.0;        // unperturbed H(Y|X) of that member
    std::int64_t gain = 0;      // total favored-patch gain n of that member
    double eps_size = std::numeric_limits<double>::infinity(); // min H/n at this size
    double eps_star = std::numeric_limits<double>::infinity(); // running min over sizes
};

struct StabilityCurve {
    std::vector<StabilityRow> rows; // ascending size
};

// For each member: unperturbed H(Y|X) and the favored-patch gain
// n = sum of diff_counts.  eps*(size) is the running minimum of H/n over
// members with n > 0; a decreasing curve is desk-scale instability evidence.
inline StabilityCurve stability_scan(const HamiltonianSpec& spec,
                                     const std::vector<Patch>& favored,
                                     const ExcitationFamily& family) {
    if (family.members().empty()) throw domain_error("excitation family is empty");
    if (favored.empty()) throw domain_error("stability scan needs favored patches");
    std::map<std::int64_t, StabilityRow> by_size;
    for (const auto& m : family.members()) {
        Excitation e = family.realize(m);
        if (e.empty()) continue; // flips never normalize away, but stay safe
        double energy = relative_energy(spec, e).total;
        std::int64_t gain = 0;
        for (const auto& p : favored)
            gain += diff_count(e, p, std::max<std::int64_t>(p.diameter(), 1));
        auto [it, fresh] = by_size.try_emplace(m.size);
        StabilityRow& row = it->second;
        if (fresh) {
            row.size = m.size;
            row.best_id = m.id;
            row.energy = energy;
            row.gain = gain;
        }
        if (gain > 0) {
            double eps = energy / static_cast<double>(gain);
            if (eps < row.eps_size) {
                row.eps_size = eps;
                row.best_id = m.id;
                row.energy = energy;
                row.gain = gain;
            }
        } else if (!std::isfinite(row.eps_size) && energy < row.energy) {
            row.best_id = m.id;
            row.energy = energy;
            row.gain = gain;
        }
    }
    StabilityCurve curve;
    double running = std::numeric_limits<double>::infinity();
    for (auto& [size, row] : by_size) {
        running = std::min(running, row.eps_size);
        row.eps_star = running;
        curve.rows.push_back(row);
    }
    return curve;
}

} // namespace aperiodic
