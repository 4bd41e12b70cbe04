// Acceptance suite: one line per criterion, [PASS]/[FAIL] with the measured
// runtime against its budget.  Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "aperiodic/gibbs.hpp"
#include "aperiodic/io.hpp"
#include "aperiodic/sbc.hpp"
#include "aperiodic/stability.hpp"
#include "aperiodic/symbolic.hpp"
#include "aperiodic/text.hpp"
#include "aperiodic/wang.hpp"

using namespace aperiodic;

namespace {

struct Checker {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

int g_failures = 0;

void criterion(int id, const std::string& name, double budget_s,
               const std::function<void(Checker&)>& body) {
    Checker c;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < budget_s, "runtime " + std::to_string(secs) + "s exceeds budget");
    std::printf("[%s] %02d %s (%.2f s / %.0f s)%s%s\n", c.ok ? "PASS" : "FAIL", id,
                name.c_str(), secs, budget_s, c.detail.empty() ? "" : ": ",
                c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++g_failures;
}

std::string run_cli(const std::string& args) {
    std::string cmd = std::string(APERIODIC_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {};
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    pclose(pipe);
    return out;
}

std::string last_line(const std::string& text) {
    std::istringstream in(text);
    std::string line, last;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') last = line;
    return last;
}

} // namespace

int main() {
    const RotationNumber golden = golden_rotation();

    criterion(1, "thue-morse-prefix-via-cli", 1.0, [&](Checker& c) {
        std::string out = run_cli("generate --system thue-morse --start 0 --len 16");
        c.expect(last_line(out) == "+--+-++--++-+--+",
                 "cli window mismatch: '" + last_line(out) + "'");
    });

    criterion(2, "dual-algorithm-thue-morse", 5.0, [&](Checker& c) {
        Window w = substitution_prefix(thue_morse_rule(), Symbol{0}, 17); // 131072
        c.expect(w.length() >= (1 << 16) + 1, "substitution prefix too short");
        for (std::int64_t i = 0; i <= (1 << 16); ++i) {
            if (thue_morse_symbol(i) != w.at(i)) {
                c.expect(false, "parity vs substitution mismatch at " + std::to_string(i));
                return;
            }
            if (thue_morse_symbol(-i - 1) != w.at(i)) {
                c.expect(false, "reflection mismatch at " + std::to_string(-i - 1));
                return;
            }
        }
    });

    criterion(3, "thue-morse-ground-energy", 30.0, [&](Checker& c) {
        auto tm = ConfigurationSource::thue_morse();
        HamiltonianSpec spec = build_tm_hamiltonian(0.25, 8, 8);
        Window w = window_of(tm, 0, 4096);
        auto sym = [&](std::int64_t i) { return w.at(i); };
        for (const auto& f : spec.terms)
            for (std::int64_t a = 0; a + f.diameter() < 4096; ++a)
                if (f.value_at(2, sym, a) != 0.0) {
                    c.expect(false, "nonzero term " + f.id + " at " + std::to_string(a));
                    return;
                }
        c.expect(non_frustration_check(spec, tm, 0, 4096), "non-frustration scan failed");
        double lambda = 0.25;
        HamiltonianSpec wide = build_tm_hamiltonian(lambda, 30, 30);
        auto plus = ConfigurationSource::periodic({Symbol{0}}, 2);
        double density = energy_density(wide, plus, 0, 16);
        double closed = 16.0 / ((1.0 - lambda) * (1.0 - lambda));
        c.expect(std::abs(density - closed) < 1e-9,
                 "all-plus density off by " + std::to_string(density - closed));
    });

    criterion(4, "sturmian-generation-orbit-equivalence", 10.0, [&](Checker& c) {
        auto st = ConfigurationSource::sturmian(golden);
        c.expect(to_string(window_of(st, 0, 7), "01") == "0101001", "rotation prefix wrong");
        const std::int64_t N = 10000;
        const int FLEN = 10;
        Window rot = window_of(st, 0, N);
        Window fib = substitution_prefix(fibonacci_rule(), Symbol{0}, 21); // 17711 sites
        auto factors = [&](const Window& w) {
            std::unordered_set<std::uint32_t> out;
            for (std::int64_t t = 0; t + FLEN <= N; ++t) {
                std::uint32_t code = 0;
                for (int j = 0; j < FLEN; ++j) code = (code << 1) | w.at(t + j).id;
                out.insert(code);
            }
            return out;
        };
        c.expect(factors(rot) == factors(fib), "length-10 factor sets differ");
    });

    criterion(5, "forbidden-distances", 10.0, [&](Checker& c) {
        ForbiddenSet fs = forbidden_distances(golden, 10);
        c.expect(fs.distances == std::vector<std::int64_t>{1, 4, 9},
                 "F cap [1,10] != {1,4,9}");
        c.expect(fs.m == 3, "m != 3");
        auto st = ConfigurationSource::sturmian(golden);
        const std::int64_t N = 100000;
        Window w = window_of(st, 0, N + 10);
        for (std::int64_t d = 1; d <= 10; ++d) {
            bool seen = false;
            for (std::int64_t i = 0; i < N && !seen; ++i)
                seen = w.at(i).id == 1 && w.at(i + d).id == 1;
            if (fs.contains(d))
                c.expect(!seen, "forbidden distance " + std::to_string(d) + " occupied");
            else
                c.expect(seen, "allowed distance " + std::to_string(d) + " never occurs");
        }
        std::int64_t run = 0, max_run = 0;
        for (std::int64_t i = 0; i < N; ++i) {
            run = w.at(i).id == 0 ? run + 1 : 0;
            max_run = std::max(max_run, run);
        }
        c.expect(max_run == fs.m - 1, "longest zero run disagrees with m");
    });

    criterion(6, "sbc-dichotomy", 60.0, [&](Checker& c) {
        const std::int64_t PREFIX = 1000000;
        auto st = ConfigurationSource::sturmian(golden);
        double omega1 = sturmian_patch_frequency(golden, make_patch({{0, 1}}));
        DiscrepancyReport sr = discrepancy_profile(st, make_patch({{0, 1}}), omega1,
                                                   {10, 100, 1000, 10000}, PREFIX);
        for (const auto& row : sr.rows)
            c.expect(row.D <= 1.0, "sturmian D(" + std::to_string(row.L) + ") = " +
                                       std::to_string(row.D) + " > 1");
        auto tm = ConfigurationSource::thue_morse();
        Patch pp = parse_patch("++", "+-");
        double omega = empirical_frequency(tm, pp, std::int64_t(1) << 20);
        int threads = std::max(1u, std::thread::hardware_concurrency());
        DiscrepancyReport env = discrepancy_envelope(tm, pp, omega, {1 << 8, 1 << 14},
                                                     PREFIX, threads);
        c.expect(env.rows[1].D > env.rows[0].D,
                 "envelope not growing: D(2^14)=" + std::to_string(env.rows[1].D) +
                     " vs D(2^8)=" + std::to_string(env.rows[0].D));
        c.expect(env.rows[1].D > 2.0,
                 "envelope D(2^14) = " + std::to_string(env.rows[1].D) + " <= 2");
    });

    criterion(7, "non-frustration-witnesses", 30.0, [&](Checker& c) {
        auto tm = ConfigurationSource::thue_morse();
        HamiltonianSpec tm_spec = build_tm_hamiltonian(0.25, 8, 8);
        c.expect(non_frustration_check(tm_spec, tm, 0, 4096), "thue-morse scan failed");
        auto st = ConfigurationSource::sturmian(golden);
        HamiltonianSpec st_spec = build_sturmian_hamiltonian(golden);
        c.expect(non_frustration_check(st_spec, st, 0, 10000), "sturmian scan failed");
        auto plus = ConfigurationSource::periodic({Symbol{0}}, 2);
        c.expect(!non_frustration_check(tm_spec, plus, 0, 16), "all-plus should frustrate");
    });

    criterion(8, "local-ground-state-12-sites", 60.0, [&](Checker& c) {
        auto tm = ConfigurationSource::thue_morse();
        HamiltonianSpec tm_spec = build_tm_hamiltonian(0.25, 8, 8);
        GroundVerdict tv = is_local_ground_state(tm_spec, tm, 0, 12);
        c.expect(tv.min_energy >= -tv.tail_bound, "thue-morse minimum below -tail");
        c.expect(tv.min_energy == 0.0 && tv.witness.empty(),
                 "thue-morse minimum not attained by the base");
        c.expect(tv.locally_ground, "thue-morse verdict not locally-ground");

        auto st = ConfigurationSource::sturmian(golden);
        HamiltonianSpec st_spec = build_sturmian_hamiltonian(golden);
        GroundVerdict sv = is_local_ground_state(st_spec, st, 0, 12);
        c.expect(sv.min_energy >= -sv.tail_bound, "sturmian minimum below -tail");
        c.expect(sv.min_energy == 0.0 && sv.witness.empty(),
                 "sturmian minimum not attained by the base");
    });

    criterion(9, "instability-experiments", 300.0, [&](Checker& c) {
        // exhaustive search: the four-spin family at lambda = 0.05, where the
        // dyadic seam cost sits below the eps = 1 aligned-pair gain on a
        // 16-site window (at lambda = 1/4 the threshold is ~1.43)
        auto tm = ConfigurationSource::thue_morse();
        HamiltonianSpec fast = build_tm_hamiltonian(0.05, 8, 8);
        fast = add_chemical_potential(fast, parse_patch("++", "+-"), 1.0);
        fast = add_chemical_potential(fast, parse_patch("--", "+-"), 1.0);
        SearchOutcome s = exhaustive_excitation_search(fast, tm, 0, 16);
        c.expect(s.min_energy < 0.0,
                 "perturbed minimum not negative: " + std::to_string(s.min_energy));
        c.expect(!s.witness.empty(), "no witness excitation");
        c.expect(relative_energy(fast, s.witness).total == s.min_energy,
                 "witness energy not reproducible bit-for-bit");

        // stability curves at the defaults: exactly non-increasing eps*
        HamiltonianSpec tm_spec = build_tm_hamiltonian(0.25, 8, 8);
        std::vector<Patch> aligned{parse_patch("++", "+-"), parse_patch("--", "+-")};
        auto hier = ExcitationFamily::dyadic_block_flips(
            tm, {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, 4);
        StabilityCurve tc = stability_scan(tm_spec, aligned, hier);
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& row : tc.rows) {
            c.expect(row.eps_star <= prev, "tm eps* increased at size " +
                                               std::to_string(row.size));
            prev = row.eps_star;
        }
        c.expect(tc.rows.size() == 11, "tm curve incomplete");

        HamiltonianSpec st_spec = build_sturmian_hamiltonian(golden);
        auto st = ConfigurationSource::sturmian(golden);
        std::vector<std::int64_t> widths;
        for (std::int64_t w = 1; w <= 64; ++w) widths.push_back(w);
        auto blocks = ExcitationFamily::contiguous_block_flips(st, widths, 0, 4);
        StabilityCurve sc = stability_scan(st_spec, {parse_patch("1", "01")}, blocks);
        prev = std::numeric_limits<double>::infinity();
        for (const auto& row : sc.rows) {
            c.expect(row.eps_star <= prev, "sturmian eps* increased at size " +
                                               std::to_string(row.size));
            prev = row.eps_star;
        }
        c.expect(sc.rows.size() == 64, "sturmian curve incomplete");
    });

    criterion(10, "gibbs-correctness", 300.0, [&](Checker& c) {
        HamiltonianSpec spec = build_sturmian_hamiltonian(golden);
        auto st = ConfigurationSource::sturmian(golden);
        GibbsProblem pb{spec, 0, 12, st, 1.0};
        std::vector<Patch> letters{make_patch({{0, 0}}), make_patch({{0, 1}})};

        GibbsEstimate ex = exact_gibbs(pb, letters);
        c.expect(std::abs(ex.observables[0].mean + ex.observables[1].mean - 1.0) < 1e-12,
                 "single-site normalization violated");

        double prev = std::numeric_limits<double>::infinity();
        for (double beta : {0.5, 1.0, 2.0, 4.0, 8.0}) {
            GibbsProblem q = pb;
            q.beta = beta;
            double e = exact_gibbs(q, letters).energy_mean;
            c.expect(e <= prev + 1e-12, "exact energy increased at beta " +
                                            std::to_string(beta));
            prev = e;
        }

        GibbsProblem zero = pb;
        zero.beta = 0.0;
        GibbsEstimate uniform = exact_gibbs(zero, letters);
        c.expect(std::abs(uniform.observables[0].mean - 0.5) < 1e-12,
                 "beta = 0 not uniform");

        GibbsProblem two = pb;
        two.beta = 2.0;
        GibbsEstimate exact2 = exact_gibbs(two, letters);
        GibbsEstimate mc = metropolis_sample(two, 1000000, 10000, 0xA5EED, letters);
        for (std::size_t k = 0; k < letters.size(); ++k) {
            double se = std::max(mc.observables[k].se, 1e-9);
            c.expect(std::abs(mc.observables[k].mean - exact2.observables[k].mean) <
                         3.0 * se,
                     "metropolis observable " + std::to_string(k) + " off by more than 3 se");
        }
        GibbsEstimate mc2 = metropolis_sample(two, 100000, 1000, 0xA5EED, letters);
        GibbsEstimate mc3 = metropolis_sample(two, 100000, 1000, 0xA5EED, letters);
        bool identical = mc2.energy_mean == mc3.energy_mean &&
                         mc2.energy_se == mc3.energy_se;
        for (std::size_t k = 0; k < letters.size(); ++k)
            identical = identical &&
                        mc2.observables[k].mean == mc3.observables[k].mean &&
                        mc2.observables[k].se == mc3.observables[k].se;
        c.expect(identical, "fixed seed not bit-reproducible");
    });

    criterion(11, "wang-engine", 10.0, [&](Checker& c) {
        Tileset single = load_tileset("T 0 0 0 0 0\n");
        TilingGrid g(GridRegion{0, 0, 10, 10});
        for (std::int64_t y = 0; y < 10; ++y)
            for (std::int64_t x = 0; x < 10; ++x) g.set(x, y, 0);
        c.expect(verify_tiling(single, g).empty(), "single-tile grid has broken bonds");

        Tileset checker = load_tileset("T 0 1 1 0 0\nT 1 0 0 1 1\n");
        TilingGrid cg(GridRegion{0, 0, 7, 7});
        for (std::int64_t y = 0; y < 7; ++y)
            for (std::int64_t x = 0; x < 7; ++x) cg.set(x, y, int((x + y) & 1));
        c.expect(verify_tiling(checker, cg).empty(), "checkerboard has broken bonds");

        Tileset bad = load_tileset("T 0 1 0 0 0\n");
        CompletionResult unsat = complete_region(bad, TilingGrid(GridRegion{0, 0, 1, 2}));
        c.expect(unsat.status == CompletionStatus::Unsatisfiable,
                 "vertical domino should be unsatisfiable");

        TilingGrid corrupted = cg;
        corrupted.set(3, 3, int((3 + 3) & 1) ^ 1); // interior: exactly 4 edges
        c.expect(verify_tiling(checker, corrupted).size() == 4,
                 "corrupted interior cell should break 4 bonds");
        corrupted = cg;
        corrupted.set(0, 0, 1); // corner: exactly 2 edges
        c.expect(verify_tiling(checker, corrupted).size() == 2,
                 "corrupted corner should break 2 bonds");

        for (std::int64_t L : {5, 9}) {
            TilingGrid sq(GridRegion{0, 0, L, L});
            for (std::int64_t y = 0; y < L; ++y)
                for (std::int64_t x = 0; x < L; ++x) sq.set(x, y, 0);
            TilingDeviation dev = tiling_discrepancy(sq, Patch2D({{0, 0, 0}}), 1.0);
            c.expect(dev.perimeter == 4 * L, "perimeter != 4L");
            c.expect(dev.deviation == 0.0, "single-tile deviation nonzero");
        }
    });

    if (g_failures == 0)
        std::printf("acceptance: all 11 criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures;
}
