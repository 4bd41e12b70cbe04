#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aperiodic/gibbs.hpp"
#include "aperiodic/hamiltonian.hpp"
#include "aperiodic/sbc.hpp"
#include "aperiodic/stability.hpp"
#include "aperiodic/text.hpp"

// Declarative spec files, CSV emission, and JSON serialization of results.

namespace aperiodic {

inline std::string format_double(double v, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// full 17-digit form, for exact round-trips in spec files
inline std::string format_exact(double v) { return format_double(v, 17); }

inline std::string spec_glyphs(const HamiltonianSpec& spec) {
    if (spec.family == HamiltonianSpec::Family::ThueMorse) return "+-";
    std::string g = "0123456789";
    return g.substr(0, spec.alphabet);
}

// ---------------------------------------------------------------------------
// Hamiltonian spec text format, round-trip stable.  Lines:
//   family thue-morse|sturmian|finite-range
//   lambda/r_max/p_max or phi/alpha/k_max or alphabet + term lines
//   chem <patch> <eps>
// Term energies are listed in assignment-code order, code = sum of
// symbol_k * alphabet^k over the offsets in ascending order.
// ---------------------------------------------------------------------------
inline std::string serialize_spec(const HamiltonianSpec& spec) {
    std::ostringstream out;
    switch (spec.family) {
    case HamiltonianSpec::Family::ThueMorse:
        out << "family thue-morse\n";
        out << "lambda " << format_exact(spec.tm_lambda) << "\n";
        out << "r_max " << spec.tm_r_max << "\n";
        out << "p_max " << spec.tm_p_max << "\n";
        break;
    case HamiltonianSpec::Family::SturmianPair:
        out << "family sturmian\n";
        out << "phi " << spec.phi->to_string() << "\n";
        out << "alpha " << format_exact(spec.st_alpha) << "\n";
        out << "k_max " << spec.st_k_max << "\n";
        break;
    case HamiltonianSpec::Family::FiniteRange:
        out << "family finite-range\n";
        out << "alphabet " << spec.alphabet << "\n";
        for (const auto& f : spec.terms) {
            if (f.chemical) continue;
            out << "term " << f.id << " offsets ";
            for (std::size_t k = 0; k < f.offsets.size(); ++k)
                out << (k ? "," : "") << f.offsets[k];
            out << " energies ";
            for (std::size_t k = 0; k < f.table.size(); ++k)
                out << (k ? "," : "") << format_exact(f.table[k]);
            out << "\n";
        }
        break;
    }
    for (const auto& [patch, eps] : spec.chemical_potentials)
        out << "chem " << patch_to_string(patch, spec_glyphs(spec)) << " "
            << format_exact(eps) << "\n";
    return out.str();
}

namespace detail {

inline std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(s.substr(pos));
            break;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

} // namespace detail

inline HamiltonianSpec parse_spec(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    std::string family;
    double lambda = 0.25, alpha = 4.0;
    int r_max = 8, p_max = 8;
    std::int64_t k_max = 64;
    std::size_t alphabet = 2;
    std::string phi_text;
    std::vector<TermFamily> terms;
    std::vector<std::pair<std::string, double>> chems;
    auto fail = [&](const std::string& what) {
        return parse_error("spec line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls{line};
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "family") {
            if (!(ls >> family)) throw fail("missing family name");
        } else if (key == "lambda") {
            if (!(ls >> lambda)) throw fail("bad lambda");
        } else if (key == "r_max") {
            if (!(ls >> r_max)) throw fail("bad r_max");
        } else if (key == "p_max") {
            if (!(ls >> p_max)) throw fail("bad p_max");
        } else if (key == "phi") {
            if (!(ls >> phi_text)) throw fail("bad phi");
        } else if (key == "alpha") {
            if (!(ls >> alpha)) throw fail("bad alpha");
        } else if (key == "k_max") {
            if (!(ls >> k_max)) throw fail("bad k_max");
        } else if (key == "alphabet") {
            if (!(ls >> alphabet)) throw fail("bad alphabet");
        } else if (key == "term") {
            TermFamily f;
            std::string word, offsets_kw, offsets_text, energies_kw, energies_text;
            if (!(ls >> f.id >> offsets_kw >> offsets_text >> energies_kw >> energies_text) ||
                offsets_kw != "offsets" || energies_kw != "energies")
                throw fail("expected 'term <id> offsets <o,..> energies <e,..>'");
            try {
                for (const auto& o : detail::split_list(offsets_text, ','))
                    f.offsets.push_back(std::stoll(o));
                for (const auto& e : detail::split_list(energies_text, ','))
                    f.table.push_back(std::stod(e));
            } catch (const std::exception&) {
                throw fail("bad term numbers");
            }
            terms.push_back(std::move(f));
        } else if (key == "chem") {
            std::string patch_text;
            double eps = 0.0;
            if (!(ls >> patch_text >> eps)) throw fail("expected 'chem <patch> <eps>'");
            chems.emplace_back(patch_text, eps);
        } else {
            throw fail("unknown key '" + key + "'");
        }
    }
    HamiltonianSpec spec;
    if (family == "thue-morse") {
        spec = build_tm_hamiltonian(lambda, r_max, p_max);
    } else if (family == "sturmian") {
        if (phi_text.empty()) throw parse_error("sturmian spec needs a phi line");
        spec = build_sturmian_hamiltonian(RotationNumber::parse(phi_text), alpha, k_max);
    } else if (family == "finite-range") {
        std::size_t expect = 1;
        for (auto& f : terms) {
            expect = 1;
            for (std::size_t k = 0; k < f.offsets.size(); ++k) expect *= alphabet;
            if (f.table.size() != expect)
                throw parse_error("term " + f.id + " needs " + std::to_string(expect) +
                                  " energies");
        }
        spec = finite_range_spec(std::move(terms), alphabet);
    } else {
        throw parse_error("unknown or missing spec family '" + family + "'");
    }
    for (const auto& [patch_text, eps] : chems)
        spec = add_chemical_potential(spec, parse_patch(patch_text, spec_glyphs(spec)), eps);
    return spec;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------
inline nlohmann::json to_json(const GibbsEstimate& est) {
    nlohmann::json obs = nlohmann::json::array();
    for (const auto& o : est.observables)
        obs.push_back({{"patch", o.label}, {"mean", o.mean}, {"se", o.se}});
    return nlohmann::json{{"beta", est.beta},
                          {"method", est.method},
                          {"sweeps", est.sweeps},
                          {"burn_in", est.burn_in},
                          {"seed", est.seed},
                          {"rng", est.rng},
                          {"energy", {{"mean", est.energy_mean}, {"se", est.energy_se}}},
                          {"observables", obs}};
}

inline nlohmann::json to_json(const DiscrepancyReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"L", r.L}, {"D", r.D}, {"argmax_start", r.argmax_start}});
    return nlohmann::json{{"omega", report.omega},
                          {"prefix", report.prefix},
                          {"exhaustive", report.exhaustive},
                          {"rows", rows}};
}

inline nlohmann::json to_json(const StabilityCurve& curve) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : curve.rows)
        rows.push_back({{"size", r.size},
                        {"best", r.best_id},
                        {"energy", r.energy},
                        {"gain", r.gain},
                        {"epsilon_star", r.eps_star}});
    return nlohmann::json{{"rows", rows}};
}

// ---------------------------------------------------------------------------
// CSV emission (12 significant digits, headers always present)
// ---------------------------------------------------------------------------
inline std::string to_csv(const DiscrepancyReport& report) {
    std::string out = "L,D,argmax_start\n";
    for (const auto& r : report.rows)
        out += std::to_string(r.L) + "," + format_double(r.D) + "," +
               std::to_string(r.argmax_start) + "\n";
    return out;
}

inline std::string to_csv(const StabilityCurve& curve) {
    std::string out = "size,energy,gain,epsilon_star\n";
    for (const auto& r : curve.rows)
        out += std::to_string(r.size) + "," + format_double(r.energy) + "," +
               std::to_string(r.gain) + "," + format_double(r.eps_star) + "\n";
    return out;
}

} // namespace aperiodic
