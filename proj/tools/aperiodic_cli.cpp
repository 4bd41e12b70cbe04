// Command-line surface over the aperiodic library.  Every subcommand is a
// thin wrapper: it builds the library call, serializes the result, and embeds
// the full invocation and library version for provenance.
//
// Exit codes: 0 success, 1 domain/contract error, 2 parse error, 3 budget
// error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aperiodic/gibbs.hpp"
#include "aperiodic/io.hpp"
#include "aperiodic/sbc.hpp"
#include "aperiodic/stability.hpp"
#include "aperiodic/symbolic.hpp"
#include "aperiodic/text.hpp"
#include "aperiodic/version.hpp"
#include "aperiodic/wang.hpp"

namespace ap = aperiodic;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string out;            // empty = stdout
    std::string format = "csv"; // csv | json
    int threads = 1;
};

struct SourceOpts {
    std::string system; // thue-morse | sturmian | periodic | explicit
    std::string phi;
    std::string word;
    std::string window;
    std::int64_t window_start = 0;
    std::string fill;
};

std::string g_invocation;

void add_common(CLI::App* cmd, CommonOpts& o, bool json_default = false) {
    if (json_default) o.format = "json";
    cmd->add_option("--out", o.out, "output file (default: stdout)");
    cmd->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", o.threads,
                    "worker threads for parallelizable scans (results are "
                    "identical to --threads 1)")
        ->check(CLI::PositiveNumber);
}

void add_source(CLI::App* cmd, SourceOpts& o, bool required = true) {
    auto* sys = cmd->add_option("--system", o.system,
                                "thue-morse | sturmian | periodic | explicit")
                    ->check(CLI::IsMember({"thue-morse", "sturmian", "periodic", "explicit"}));
    if (required) sys->required();
    cmd->add_option("--phi", o.phi,
                    "rotation number, quad:(A+B*sqrtD)/C or dec:value:digits");
    cmd->add_option("--word", o.word, "periodic word, e.g. 01 or +-");
    cmd->add_option("--window", o.window, "explicit window content");
    cmd->add_option("--window-at", o.window_start, "explicit window start site");
    cmd->add_option("--fill", o.fill, "explicit fill symbol outside the window");
}

std::string glyphs_for(const SourceOpts& o) {
    if (o.system == "thue-morse") return "+-";
    std::string g = "0123456789";
    if (o.system == "periodic" && !o.word.empty() && o.word.find_first_of("+-") != std::string::npos)
        return "+-";
    if (o.system == "explicit" && !o.window.empty() &&
        o.window.find_first_of("+-") != std::string::npos)
        return "+-";
    return g;
}

ap::ConfigurationSource make_source(const SourceOpts& o) {
    if (o.system == "thue-morse") return ap::ConfigurationSource::thue_morse();
    if (o.system == "sturmian") {
        if (o.phi.empty()) throw ap::parse_error("--system sturmian needs --phi");
        return ap::ConfigurationSource::sturmian(ap::RotationNumber::parse(o.phi));
    }
    std::string glyphs = glyphs_for(o);
    if (o.system == "periodic") {
        if (o.word.empty()) throw ap::parse_error("--system periodic needs --word");
        auto word = ap::parse_word(o.word, glyphs);
        std::size_t alpha = 2;
        for (ap::Symbol s : word) alpha = std::max<std::size_t>(alpha, s.id + 1);
        return ap::ConfigurationSource::periodic(word, alpha);
    }
    if (o.system == "explicit") {
        if (o.window.empty() || o.fill.empty())
            throw ap::parse_error("--system explicit needs --window and --fill");
        auto word = ap::parse_word(o.window, glyphs);
        ap::Symbol fill = ap::symbol_from_glyph(o.fill[0], glyphs);
        std::size_t alpha = std::size_t(fill.id) + 1;
        for (ap::Symbol s : word) alpha = std::max<std::size_t>(alpha, s.id + 1);
        alpha = std::max<std::size_t>(alpha, 2);
        return ap::ConfigurationSource::explicit_window(
            ap::Window(o.window_start, word), fill, alpha);
    }
    throw ap::parse_error("unknown --system '" + o.system + "'");
}

ap::HamiltonianSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ap::domain_error("cannot open spec file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ap::parse_spec(ss.str());
}

std::string slurp(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ap::domain_error(std::string("cannot open ") + what + " '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// default base configuration for a spec: the configuration its family zeroes
ap::ConfigurationSource source_for_spec(const ap::HamiltonianSpec& spec,
                                        const SourceOpts& opts) {
    if (!opts.system.empty()) return make_source(opts);
    switch (spec.family) {
    case ap::HamiltonianSpec::Family::ThueMorse:
        return ap::ConfigurationSource::thue_morse();
    case ap::HamiltonianSpec::Family::SturmianPair:
        return ap::ConfigurationSource::sturmian(*spec.phi);
    case ap::HamiltonianSpec::Family::FiniteRange:
        throw ap::domain_error("finite-range specs need an explicit --system");
    }
    throw ap::contract_error("unreachable");
}

std::string spec_or_source_glyphs(const ap::HamiltonianSpec& spec, const SourceOpts& o) {
    if (!o.system.empty()) return glyphs_for(o);
    return ap::spec_glyphs(spec);
}

void emit(const CommonOpts& common, const std::string& payload) {
    std::string full = "# invocation: " + g_invocation + "\n# version: " +
                       std::string(ap::kLibraryName) + " " + ap::kVersion + "\n" + payload;
    if (common.out.empty()) {
        std::cout << full;
        return;
    }
    std::ofstream out(common.out);
    if (!out) throw ap::domain_error("cannot open output file '" + common.out + "'");
    out << full;
}

void emit_json(const CommonOpts& common, json result) {
    json wrapped{{"invocation", g_invocation},
                 {"version", std::string(ap::kLibraryName) + " " + ap::kVersion},
                 {"result", std::move(result)}};
    std::string text = wrapped.dump(2) + "\n";
    if (common.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(common.out);
    if (!out) throw ap::domain_error("cannot open output file '" + common.out + "'");
    out << text;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    // comma list with a-b ranges: "2,4,8" or "1-64" or "2,8-12"
    std::vector<std::int64_t> out;
    for (const auto& item : ap::detail::split_list(text, ',')) {
        if (item.empty()) continue;
        auto dash = item.find('-', 1); // allow a leading minus sign
        try {
            if (dash == std::string::npos) {
                out.push_back(std::stoll(item));
            } else {
                std::int64_t a = std::stoll(item.substr(0, dash));
                std::int64_t b = std::stoll(item.substr(dash + 1));
                for (std::int64_t v = a; v <= b; ++v) out.push_back(v);
            }
        } catch (const std::exception&) {
            throw ap::parse_error("bad integer list '" + text + "'");
        }
    }
    if (out.empty()) throw ap::parse_error("empty integer list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : ap::detail::split_list(text, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ap::parse_error("bad number list '" + text + "'");
        }
    }
    if (out.empty()) throw ap::parse_error("empty number list");
    return out;
}

std::string override_text(const std::map<std::int64_t, ap::Symbol>& ov,
                          const std::string& glyphs) {
    std::string s;
    for (const auto& [site, sym] : ov) {
        if (!s.empty()) s += ",";
        s += std::to_string(site) + ":" + ap::glyph_of(sym, glyphs);
    }
    return s;
}

ap::Patch2D parse_patch2d(const std::string& text) {
    // "dx,dy=id;dx,dy=id"
    std::vector<ap::Patch2DCell> cells;
    for (const auto& item : ap::detail::split_list(text, ';')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        auto comma = item.find(',');
        if (eq == std::string::npos || comma == std::string::npos || comma > eq)
            throw ap::parse_error("bad 2d patch cell '" + item + "'; expected dx,dy=id");
        try {
            cells.push_back({std::stoll(item.substr(0, comma)),
                             std::stoll(item.substr(comma + 1, eq - comma - 1)),
                             std::stoi(item.substr(eq + 1))});
        } catch (const std::exception&) {
            throw ap::parse_error("bad 2d patch cell '" + item + "'");
        }
    }
    return ap::Patch2D(std::move(cells));
}

json breakdown_json(const ap::EnergyBreakdown& bd) {
    json terms = json::object();
    for (const auto& [id, v] : bd.per_term) terms[id] = v;
    return json{{"total", bd.total}, {"tail_bound", bd.tail_bound}, {"per_term", terms}};
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

int run_cli(int argc, char** argv) {
    CLI::App app{"lattice-gas models of aperiodic order: generators, energies, "
                 "boundary-condition diagnostics, stability scans, Gibbs sampling, "
                 "and a Wang-tile engine"};
    app.require_subcommand(1);

    // generate
    struct {
        CommonOpts common;
        SourceOpts src;
        std::int64_t start = 0, len = 16;
    } gen;
    auto* c_gen = app.add_subcommand("generate", "materialize a window of a configuration");
    add_source(c_gen, gen.src);
    c_gen->add_option("--start", gen.start, "first site");
    c_gen->add_option("--len", gen.len, "window length")->check(CLI::NonNegativeNumber);
    add_common(c_gen, gen.common);
    c_gen->callback([&] {
        auto src = make_source(gen.src);
        std::string glyphs = glyphs_for(gen.src);
        std::string word = ap::to_string(ap::window_of(src, gen.start, gen.len), glyphs);
        if (gen.common.format == "json")
            emit_json(gen.common, json{{"start", gen.start}, {"len", gen.len}, {"window", word}});
        else
            emit(gen.common, word + "\n");
    });

    // frequency
    struct {
        CommonOpts common;
        SourceOpts src;
        std::string patch;
        std::int64_t L = 1000000;
    } freq;
    auto* c_freq = app.add_subcommand("frequency", "empirical (and exact Sturmian) patch frequency");
    add_source(c_freq, freq.src);
    c_freq->add_option("--patch", freq.patch, "patch text, '.' for gaps")->required();
    c_freq->add_option("--L", freq.L, "averaging scale")->check(CLI::PositiveNumber);
    add_common(c_freq, freq.common);
    c_freq->callback([&] {
        auto src = make_source(freq.src);
        ap::Patch patch = ap::parse_patch(freq.patch, glyphs_for(freq.src));
        double emp = ap::empirical_frequency(src, patch, freq.L);
        std::optional<double> exact;
        if (src.kind() == ap::ConfigurationSource::Kind::Sturmian)
            exact = ap::sturmian_patch_frequency(src.rotation(), patch);
        if (freq.common.format == "json") {
            json j{{"patch", freq.patch}, {"L", freq.L}, {"empirical", emp}};
            if (exact) j["exact"] = *exact;
            emit_json(freq.common, j);
        } else {
            std::string csv = "patch,L,empirical,exact\n" + freq.patch + "," +
                              std::to_string(freq.L) + "," + ap::format_double(emp) + "," +
                              (exact ? ap::format_double(*exact) : "") + "\n";
            emit(freq.common, csv);
        }
    });

    // forbidden
    struct {
        CommonOpts common;
        std::string phi;
        std::int64_t kmax = 64;
    } forb;
    auto* c_forb = app.add_subcommand("forbidden", "forbidden 1-1 distances and the zero-run bound");
    c_forb->add_option("--phi", forb.phi, "rotation number")->required();
    c_forb->add_option("--kmax", forb.kmax, "largest distance tested")->check(CLI::PositiveNumber);
    add_common(c_forb, forb.common);
    c_forb->callback([&] {
        ap::ForbiddenSet fs =
            ap::forbidden_distances(ap::RotationNumber::parse(forb.phi), forb.kmax);
        if (forb.common.format == "json") {
            emit_json(forb.common,
                      json{{"m", fs.m}, {"k_max", fs.k_max}, {"distances", fs.distances}});
        } else {
            std::string csv = "# m: " + std::to_string(fs.m) + "\nd,forbidden\n";
            for (std::int64_t d = 1; d <= fs.k_max; ++d)
                csv += std::to_string(d) + "," + (fs.contains(d) ? "1" : "0") + "\n";
            emit(forb.common, csv);
        }
    });

    // cf
    struct {
        CommonOpts common;
        std::string phi;
        int depth = 20;
        std::int64_t bound = -1;
    } cf;
    auto* c_cf = app.add_subcommand("cf", "continued-fraction partial quotients");
    c_cf->add_option("--phi", cf.phi, "rotation number")->required();
    c_cf->add_option("--depth", cf.depth, "number of quotients")->check(CLI::PositiveNumber);
    c_cf->add_option("--bound", cf.bound,
                     "also report the badly-approximable verdict for this bound");
    add_common(c_cf, cf.common);
    c_cf->callback([&] {
        ap::RotationNumber phi = ap::RotationNumber::parse(cf.phi);
        auto q = ap::continued_fraction(phi, cf.depth);
        std::optional<bool> verdict;
        if (cf.bound >= 0)
            verdict = ap::is_badly_approximable_heuristic(phi, cf.depth, cf.bound) ==
                      ap::BadlyApproximable::YesUpToDepth;
        if (cf.common.format == "json") {
            json j{{"quotients", q}, {"depth", cf.depth}};
            if (verdict) j["badly_approximable_up_to_depth"] = *verdict;
            emit_json(cf.common, j);
        } else {
            std::string csv;
            if (verdict)
                csv += std::string("# badly-approximable up to depth: ") +
                       (*verdict ? "yes" : "no") + "\n";
            csv += "k,a_k\n";
            for (std::size_t k = 0; k < q.size(); ++k)
                csv += std::to_string(k + 1) + "," + std::to_string(q[k]) + "\n";
            emit(cf.common, csv);
        }
    });

    // energy
    struct {
        CommonOpts common;
        SourceOpts src;
        std::string spec;
        std::int64_t start = 0, len = 256;
    } en;
    auto* c_en = app.add_subcommand("energy", "per-site energy of a configuration window");
    c_en->add_option("--spec", en.spec, "hamiltonian spec file")->required();
    add_source(c_en, en.src, false);
    c_en->add_option("--start", en.start, "window start");
    c_en->add_option("--len", en.len, "window length")->check(CLI::PositiveNumber);
    add_common(c_en, en.common);
    c_en->callback([&] {
        ap::HamiltonianSpec spec = load_spec(en.spec);
        auto src = source_for_spec(spec, en.src);
        double density = ap::energy_density(spec, src, en.start, en.len);
        bool nf = ap::non_frustration_check(spec, src, en.start, en.len);
        if (en.common.format == "json") {
            emit_json(en.common, json{{"start", en.start},
                                      {"len", en.len},
                                      {"per_site", density},
                                      {"total", density * double(en.len)},
                                      {"non_frustrated_window", nf}});
        } else {
            std::string csv = "key,value\n";
            csv += "per_site," + ap::format_double(density) + "\n";
            csv += "total," + ap::format_double(density * double(en.len)) + "\n";
            csv += std::string("non_frustrated_window,") + (nf ? "1" : "0") + "\n";
            emit(en.common, csv);
        }
    });

    // relative-energy
    struct {
        CommonOpts common;
        SourceOpts src;
        std::string spec, overrides;
    } rel;
    auto* c_rel = app.add_subcommand("relative-energy", "H(Y|X) of a finite excitation");
    c_rel->add_option("--spec", rel.spec, "hamiltonian spec file")->required();
    add_source(c_rel, rel.src, false);
    c_rel->add_option("--override", rel.overrides, "site:glyph,... overrides")->required();
    add_common(c_rel, rel.common);
    c_rel->callback([&] {
        ap::HamiltonianSpec spec = load_spec(rel.spec);
        auto src = source_for_spec(spec, rel.src);
        std::string glyphs = spec_or_source_glyphs(spec, rel.src);
        ap::Excitation e =
            ap::apply_excitation(src, ap::parse_overrides(rel.overrides, glyphs));
        ap::EnergyBreakdown bd = ap::relative_energy(spec, e);
        if (rel.common.format == "json") {
            emit_json(rel.common, breakdown_json(bd));
        } else {
            std::string csv = "key,value\n";
            csv += "total," + ap::format_double(bd.total) + "\n";
            csv += "tail_bound," + ap::format_double(bd.tail_bound) + "\n";
            for (const auto& [id, v] : bd.per_term)
                csv += "term:" + id + "," + ap::format_double(v) + "\n";
            emit(rel.common, csv);
        }
    });

    // ground-check
    struct {
        CommonOpts common;
        SourceOpts src;
        std::string spec;
        std::int64_t start = 0, width = 12;
        int max_flips = -1;
    } gc;
    auto* c_gc = app.add_subcommand("ground-check",
                                    "exhaustive local ground-state verdict on a window");
    c_gc->add_option("--spec", gc.spec, "hamiltonian spec file")->required();
    add_source(c_gc, gc.src, false);
    c_gc->add_option("--window-start", gc.start, "window start");
    c_gc->add_option("--window-width", gc.width, "window width")->check(CLI::PositiveNumber);
    c_gc->add_option("--max-flips", gc.max_flips, "restrict to a Hamming ball");
    add_common(c_gc, gc.common);
    c_gc->callback([&] {
        ap::HamiltonianSpec spec = load_spec(gc.spec);
        auto src = source_for_spec(spec, gc.src);
        std::string glyphs = spec_or_source_glyphs(spec, gc.src);
        std::optional<int> flips;
        if (gc.max_flips >= 0) flips = gc.max_flips;
        ap::GroundVerdict v = ap::is_local_ground_state(spec, src, gc.start, gc.width, flips);
        if (gc.common.format == "json") {
            emit_json(gc.common,
                      json{{"locally_ground", v.locally_ground},
                           {"min_energy", v.min_energy},
                           {"tail_bound", v.tail_bound},
                           {"witness", override_text(v.witness.overrides(), glyphs)}});
        } else {
            std::string csv = "key,value\n";
            csv += std::string("locally_ground,") + (v.locally_ground ? "1" : "0") + "\n";
            csv += "min_energy," + ap::format_double(v.min_energy) + "\n";
            csv += "tail_bound," + ap::format_double(v.tail_bound) + "\n";
            csv += "witness," + override_text(v.witness.overrides(), glyphs) + "\n";
            emit(gc.common, csv);
        }
    });

    // discrepancy
    struct {
        CommonOpts common;
        SourceOpts src;
        std::string patch, lengths, omega = "auto";
        std::int64_t prefix = 100000;
        bool envelope = false;
    } disc;
    auto* c_disc = app.add_subcommand("discrepancy",
                                      "window-count deviation profile |n - omega L|");
    add_source(c_disc, disc.src);
    c_disc->add_option("--patch", disc.patch, "patch text")->required();
    c_disc->add_option("--lengths", disc.lengths, "window lengths, e.g. 10,100,1000")->required();
    c_disc->add_option("--prefix", disc.prefix, "scanned prefix length")->check(CLI::PositiveNumber);
    c_disc->add_option("--omega", disc.omega,
                       "auto | exact | empirical:<scale> | a numeric frequency");
    c_disc->add_flag("--envelope", disc.envelope,
                     "report the running max over all lengths <= each checkpoint");
    add_common(c_disc, disc.common);
    c_disc->callback([&] {
        auto src = make_source(disc.src);
        ap::Patch patch = ap::parse_patch(disc.patch, glyphs_for(disc.src));
        auto lengths = parse_int_list(disc.lengths);
        double omega = 0.0;
        bool sturmian = src.kind() == ap::ConfigurationSource::Kind::Sturmian;
        if (disc.omega == "exact" || (disc.omega == "auto" && sturmian)) {
            if (!sturmian)
                throw ap::domain_error("--omega exact needs a sturmian system");
            omega = ap::sturmian_patch_frequency(src.rotation(), patch);
        } else if (disc.omega.rfind("empirical:", 0) == 0) {
            omega = ap::empirical_frequency(src, patch,
                                            std::stoll(disc.omega.substr(10)));
        } else if (disc.omega == "auto") {
            std::int64_t scale = 64 * *std::max_element(lengths.begin(), lengths.end());
            omega = ap::empirical_frequency(src, patch, scale);
        } else {
            try {
                omega = std::stod(disc.omega);
            } catch (const std::exception&) {
                throw ap::parse_error("bad --omega '" + disc.omega + "'");
            }
        }
        ap::DiscrepancyReport rep =
            disc.envelope
                ? ap::discrepancy_envelope(src, patch, omega, lengths, disc.prefix,
                                           disc.common.threads)
                : ap::discrepancy_profile(src, patch, omega, lengths, disc.prefix);
        if (disc.common.format == "json")
            emit_json(disc.common, ap::to_json(rep));
        else
            emit(disc.common, "# omega: " + ap::format_double(omega) + "\n" + ap::to_csv(rep));
    });

    // balance
    struct {
        CommonOpts common;
        SourceOpts src;
        std::string symbol;
        std::int64_t lmax = 1000;
    } bal;
    auto* c_bal = app.add_subcommand("balance", "max window-count spread per length");
    add_source(c_bal, bal.src);
    c_bal->add_option("--symbol", bal.symbol, "symbol glyph")->required();
    c_bal->add_option("--lmax", bal.lmax, "largest window length")->check(CLI::PositiveNumber);
    add_common(c_bal, bal.common);
    c_bal->callback([&] {
        auto src = make_source(bal.src);
        ap::Symbol sym = ap::symbol_from_glyph(bal.symbol[0], glyphs_for(bal.src));
        std::int64_t dev = ap::balanced_check(src, sym, bal.lmax);
        if (bal.common.format == "json")
            emit_json(bal.common, json{{"L_max", bal.lmax}, {"max_deviation", dev}});
        else
            emit(bal.common, "L_max,max_deviation\n" + std::to_string(bal.lmax) + "," +
                                 std::to_string(dev) + "\n");
    });

    // stability-scan
    struct {
        CommonOpts common;
        SourceOpts src;
        std::string spec, family = "hierarchical", favored, scales = "2-8", widths = "1-16";
        std::int64_t anchors = 4, anchor_start = 0, flip_count = 16;
    } scan;
    auto* c_scan = app.add_subcommand("stability-scan",
                                      "threshold chemical potential over excitation families");
    c_scan->add_option("--spec", scan.spec, "hamiltonian spec file")->required();
    add_source(c_scan, scan.src, false);
    c_scan->add_option("--family", scan.family, "hierarchical | block | single")
        ->check(CLI::IsMember({"hierarchical", "block", "single"}));
    c_scan->add_option("--favored", scan.favored, "favored patches, comma list")->required();
    c_scan->add_option("--scales", scan.scales, "dyadic scales k (hierarchical family)");
    c_scan->add_option("--widths", scan.widths, "block widths (block family)");
    c_scan->add_option("--anchors", scan.anchors, "anchors per size");
    c_scan->add_option("--anchor-start", scan.anchor_start, "first anchor (block family)");
    c_scan->add_option("--flips", scan.flip_count, "site count (single family)");
    add_common(c_scan, scan.common);
    c_scan->callback([&] {
        ap::HamiltonianSpec spec = load_spec(scan.spec);
        auto src = source_for_spec(spec, scan.src);
        std::string glyphs = spec_or_source_glyphs(spec, scan.src);
        std::vector<ap::Patch> favored;
        for (const auto& p : ap::detail::split_list(scan.favored, ','))
            favored.push_back(ap::parse_patch(p, glyphs));
        std::optional<ap::ExcitationFamily> family;
        if (scan.family == "hierarchical") {
            std::vector<int> scales;
            for (auto v : parse_int_list(scan.scales)) scales.push_back(int(v));
            family = ap::ExcitationFamily::dyadic_block_flips(src, scales, scan.anchors);
        } else if (scan.family == "block") {
            family = ap::ExcitationFamily::contiguous_block_flips(
                src, parse_int_list(scan.widths), scan.anchor_start, scan.anchors);
        } else {
            family = ap::ExcitationFamily::single_flips(src, scan.anchor_start,
                                                        scan.flip_count);
        }
        ap::StabilityCurve curve = ap::stability_scan(spec, favored, *family);
        if (scan.common.format == "json")
            emit_json(scan.common, ap::to_json(curve));
        else
            emit(scan.common, ap::to_csv(curve));
    });

    // search
    struct {
        CommonOpts common;
        SourceOpts src;
        std::string spec;
        std::int64_t start = 0, width = 12;
        int max_flips = -1;
    } sr;
    auto* c_sr = app.add_subcommand("search", "exhaustive minimum of H(Y|X) on a window");
    c_sr->add_option("--spec", sr.spec, "hamiltonian spec file")->required();
    add_source(c_sr, sr.src, false);
    c_sr->add_option("--window-start", sr.start, "window start");
    c_sr->add_option("--window-width", sr.width, "window width")->check(CLI::PositiveNumber);
    c_sr->add_option("--max-flips", sr.max_flips, "restrict to a Hamming ball");
    add_common(c_sr, sr.common);
    sr.common.format = "csv";
    c_sr->callback([&] {
        ap::HamiltonianSpec spec = load_spec(sr.spec);
        auto src = source_for_spec(spec, sr.src);
        std::string glyphs = spec_or_source_glyphs(spec, sr.src);
        std::optional<int> flips;
        if (sr.max_flips >= 0) flips = sr.max_flips;
        ap::SearchOutcome o =
            ap::exhaustive_excitation_search(spec, src, sr.start, sr.width, flips);
        if (sr.common.format == "json") {
            json j = breakdown_json(o.breakdown);
            j["min_energy"] = o.min_energy;
            j["witness"] = override_text(o.witness.overrides(), glyphs);
            j["enumerated"] = o.enumerated;
            j["tail_bound"] = o.tail_bound;
            emit_json(sr.common, j);
        } else {
            std::string csv = "key,value\n";
            csv += "min_energy," + ap::format_double(o.min_energy) + "\n";
            csv += "tail_bound," + ap::format_double(o.tail_bound) + "\n";
            csv += "enumerated," + std::to_string(o.enumerated) + "\n";
            csv += "witness," + override_text(o.witness.overrides(), glyphs) + "\n";
            emit(sr.common, csv);
        }
    });

    // gibbs
    struct {
        CommonOpts common;
        SourceOpts src;
        std::string spec, method = "exact";
        std::int64_t volume = 12, volume_start = 0;
        double beta = 1.0;
        std::uint64_t sweeps = 100000, burn_in = 1000, seed = 1;
        std::vector<std::string> patches;
    } gb;
    auto* c_gb = app.add_subcommand("gibbs", "finite-volume Gibbs expectations");
    c_gb->add_option("--spec", gb.spec, "hamiltonian spec file")->required();
    add_source(c_gb, gb.src, false);
    c_gb->add_option("--volume", gb.volume, "volume size |V|")->check(CLI::PositiveNumber);
    c_gb->add_option("--volume-start", gb.volume_start, "first site of V");
    c_gb->add_option("--beta", gb.beta, "inverse temperature")->required();
    c_gb->add_option("--method", gb.method, "exact | metropolis")
        ->check(CLI::IsMember({"exact", "metropolis"}));
    c_gb->add_option("--sweeps", gb.sweeps, "metropolis sweeps");
    c_gb->add_option("--burn-in", gb.burn_in, "discarded sweeps");
    c_gb->add_option("--seed", gb.seed, "rng seed (fully determines the chain)");
    c_gb->add_option("--patch", gb.patches, "observable patch (repeatable)");
    add_common(c_gb, gb.common, true);
    c_gb->callback([&] {
        ap::HamiltonianSpec spec = load_spec(gb.spec);
        auto boundary = source_for_spec(spec, gb.src);
        std::string glyphs = spec_or_source_glyphs(spec, gb.src);
        std::vector<ap::Patch> obs;
        if (gb.patches.empty()) {
            for (std::size_t s = 0; s < spec.alphabet; ++s)
                obs.push_back(ap::Patch({{0, ap::Symbol{std::uint8_t(s)}}}));
        } else {
            for (const auto& p : gb.patches) obs.push_back(ap::parse_patch(p, glyphs));
        }
        ap::GibbsProblem pb{spec, gb.volume_start, gb.volume, boundary, gb.beta};
        ap::GibbsEstimate est = gb.method == "exact"
                                    ? ap::exact_gibbs(pb, obs)
                                    : ap::metropolis_sample(pb, gb.sweeps, gb.burn_in,
                                                            gb.seed, obs);
        if (gb.common.format == "json") {
            emit_json(gb.common, ap::to_json(est));
        } else {
            std::string csv = "patch,mean,se\n";
            for (const auto& o : est.observables)
                csv += o.label + "," + ap::format_double(o.mean) + "," +
                       ap::format_double(o.se) + "\n";
            csv += "energy," + ap::format_double(est.energy_mean) + "," +
                   ap::format_double(est.energy_se) + "\n";
            emit(gb.common, csv);
        }
    });

    // anneal
    struct {
        CommonOpts common;
        SourceOpts src;
        std::string spec, betas, method = "metropolis";
        std::int64_t volume = 12, volume_start = 0;
        std::uint64_t sweeps = 100000, burn_in = 1000, seed = 1;
        std::vector<std::string> patches;
    } an;
    auto* c_an = app.add_subcommand("anneal", "beta sweep of Gibbs estimates");
    c_an->add_option("--spec", an.spec, "hamiltonian spec file")->required();
    add_source(c_an, an.src, false);
    c_an->add_option("--volume", an.volume, "volume size |V|")->check(CLI::PositiveNumber);
    c_an->add_option("--volume-start", an.volume_start, "first site of V");
    c_an->add_option("--betas", an.betas, "ascending betas, e.g. 0.5,1,2,4,8")->required();
    c_an->add_option("--method", an.method, "exact | metropolis")
        ->check(CLI::IsMember({"exact", "metropolis"}));
    c_an->add_option("--sweeps", an.sweeps, "metropolis sweeps per beta");
    c_an->add_option("--burn-in", an.burn_in, "discarded sweeps per beta");
    c_an->add_option("--seed", an.seed, "base seed; chain i derives seed + i*gamma");
    c_an->add_option("--patch", an.patches, "observable patch (repeatable)");
    add_common(c_an, an.common, true);
    c_an->callback([&] {
        ap::HamiltonianSpec spec = load_spec(an.spec);
        auto boundary = source_for_spec(spec, an.src);
        std::string glyphs = spec_or_source_glyphs(spec, an.src);
        std::vector<ap::Patch> obs;
        if (an.patches.empty()) {
            for (std::size_t s = 0; s < spec.alphabet; ++s)
                obs.push_back(ap::Patch({{0, ap::Symbol{std::uint8_t(s)}}}));
        } else {
            for (const auto& p : an.patches) obs.push_back(ap::parse_patch(p, glyphs));
        }
        ap::GibbsProblem pb{spec, an.volume_start, an.volume, boundary, 1.0};
        ap::AnnealResult result =
            ap::anneal_profile(pb, parse_double_list(an.betas), an.method == "exact",
                               an.sweeps, an.burn_in, an.seed, obs);
        if (an.common.format == "json") {
            json rows = json::array();
            for (const auto& est : result.estimates) rows.push_back(ap::to_json(est));
            emit_json(an.common,
                      json{{"energy_monotone", result.energy_monotone}, {"rows", rows}});
        } else {
            std::string csv = "beta,energy_mean,energy_se\n";
            for (const auto& est : result.estimates)
                csv += ap::format_double(est.beta) + "," +
                       ap::format_double(est.energy_mean) + "," +
                       ap::format_double(est.energy_se) + "\n";
            emit(an.common, csv);
        }
    });

    // tiling-verify
    struct {
        CommonOpts common;
        std::string tileset, grid;
    } tv;
    auto* c_tv = app.add_subcommand("tiling-verify", "count mismatched Wang-tile edges");
    c_tv->add_option("--tileset", tv.tileset, "tileset file")->required();
    c_tv->add_option("--grid", tv.grid, "grid file")->required();
    add_common(c_tv, tv.common);
    c_tv->callback([&] {
        ap::Tileset ts = ap::load_tileset(slurp(tv.tileset, "tileset"));
        ap::TilingGrid grid = ap::parse_grid(slurp(tv.grid, "grid"));
        auto broken = ap::verify_tiling(ts, grid);
        if (tv.common.format == "json") {
            json bonds = json::array();
            for (const auto& b : broken)
                bonds.push_back({{"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2}, {"y2", b.y2}});
            emit_json(tv.common, json{{"broken", broken.size()}, {"bonds", bonds}});
        } else {
            std::string csv = "# broken: " + std::to_string(broken.size()) + "\nx1,y1,x2,y2\n";
            for (const auto& b : broken)
                csv += std::to_string(b.x1) + "," + std::to_string(b.y1) + "," +
                       std::to_string(b.x2) + "," + std::to_string(b.y2) + "\n";
            emit(tv.common, csv);
        }
    });

    // tiling-complete
    struct {
        CommonOpts common;
        std::string tileset, grid;
    } tc;
    auto* c_tc = app.add_subcommand("tiling-complete",
                                    "fill grid holes or certify unsatisfiability");
    c_tc->add_option("--tileset", tc.tileset, "tileset file")->required();
    c_tc->add_option("--grid", tc.grid, "grid file with '.' holes")->required();
    add_common(c_tc, tc.common);
    c_tc->callback([&] {
        ap::Tileset ts = ap::load_tileset(slurp(tc.tileset, "tileset"));
        ap::TilingGrid grid = ap::parse_grid(slurp(tc.grid, "grid"));
        ap::CompletionResult r = ap::complete_region(ts, grid);
        bool done = r.status == ap::CompletionStatus::Completed;
        if (tc.common.format == "json") {
            emit_json(tc.common, json{{"status", done ? "completed" : "unsatisfiable"},
                                      {"nodes", r.nodes},
                                      {"grid", done ? ap::serialize_grid(r.grid) : ""}});
        } else {
            std::string text = std::string("# status: ") +
                               (done ? "completed" : "unsatisfiable") + "\n";
            if (done) text += ap::serialize_grid(r.grid);
            emit(tc.common, text);
        }
    });

    // tiling-count
    struct {
        CommonOpts common;
        std::string grid, patch, omega;
    } tcnt;
    auto* c_tcnt = app.add_subcommand("tiling-count", "2D patch census with an optional "
                                                      "boundary-deviation report");
    c_tcnt->add_option("--grid", tcnt.grid, "grid file")->required();
    c_tcnt->add_option("--patch", tcnt.patch, "2d patch, dx,dy=id;...")->required();
    c_tcnt->add_option("--omega", tcnt.omega, "expected frequency for the deviation report");
    add_common(c_tcnt, tcnt.common);
    c_tcnt->callback([&] {
        ap::TilingGrid grid = ap::parse_grid(slurp(tcnt.grid, "grid"));
        ap::Patch2D patch = parse_patch2d(tcnt.patch);
        if (tcnt.omega.empty()) {
            std::int64_t n = ap::count_patch_2d(grid, patch);
            if (tcnt.common.format == "json")
                emit_json(tcnt.common, json{{"count", n}});
            else
                emit(tcnt.common, "key,value\ncount," + std::to_string(n) + "\n");
            return;
        }
        double omega = 0.0;
        try {
            omega = std::stod(tcnt.omega);
        } catch (const std::exception&) {
            throw ap::parse_error("bad --omega '" + tcnt.omega + "'");
        }
        ap::TilingDeviation dev = ap::tiling_discrepancy(grid, patch, omega);
        if (tcnt.common.format == "json") {
            emit_json(tcnt.common, json{{"count", dev.count},
                                        {"expected", dev.expected},
                                        {"deviation", dev.deviation},
                                        {"perimeter", dev.perimeter},
                                        {"per_boundary", dev.per_boundary}});
        } else {
            std::string csv = "key,value\n";
            csv += "count," + std::to_string(dev.count) + "\n";
            csv += "expected," + ap::format_double(dev.expected) + "\n";
            csv += "deviation," + ap::format_double(dev.deviation) + "\n";
            csv += "perimeter," + std::to_string(dev.perimeter) + "\n";
            csv += "per_boundary," + ap::format_double(dev.per_boundary) + "\n";
            emit(tcnt.common, csv);
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::ostringstream inv;
    for (int i = 0; i < argc; ++i) {
        if (i) inv << ' ';
        std::string a = argv[i];
        if (a.find(' ') != std::string::npos) inv << '"' << a << '"';
        else inv << a;
    }
    g_invocation = inv.str();
    try {
        return run_cli(argc, argv);
    } catch (const ap::budget_error& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const ap::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
