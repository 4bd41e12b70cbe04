#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef APERIODIC_CLI_PATH
#error "APERIODIC_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(APERIODIC_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// payload = output minus provenance/comment lines
std::string payload(const std::string& out) {
    std::string body;
    std::size_t pos = 0;
    while (pos < out.size()) {
        std::size_t eol = out.find('\n', pos);
        if (eol == std::string::npos) eol = out.size();
        std::string line = out.substr(pos, eol - pos);
        if (!line.empty() && line[0] != '#') body += line + "\n";
        pos = eol + 1;
    }
    return body;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    REQUIRE(f.good());
    f << text;
}

const char* kSturmianSpec =
    "family sturmian\nphi quad:(-1+1*sqrt5)/2\nalpha 4\nk_max 64\n";

} // namespace

TEST_CASE("generate reproduces the thue-morse prefix") {
    RunResult r = run("generate --system thue-morse --start 0 --len 16");
    CHECK(r.exit_code == 0);
    CHECK(payload(r.out) == "+--+-++--++-+--+\n");
}

TEST_CASE("exit codes follow the error taxonomy") {
    CHECK(run("generate --system thue-morse --no-such-flag").exit_code == 2);
    CHECK(run("no-such-subcommand").exit_code == 2);
    CHECK(run("generate --system sturmian --phi junk --len 4").exit_code == 2);
    // rational phi is a domain error
    CHECK(run("generate --system sturmian --phi dec:0.5:1 --len 4").exit_code == 1);
    CHECK(run("cf --phi dec:0.5:1 --depth 5").exit_code == 1);
    // oversized exact volume is a budget error
    write_file("/tmp/cli_st.spec", kSturmianSpec);
    CHECK(run("gibbs --spec /tmp/cli_st.spec --volume 30 --beta 1 --method exact")
              .exit_code == 3);
}

TEST_CASE("every run embeds invocation and version") {
    RunResult r = run("generate --system periodic --word 01 --len 5");
    CHECK(r.out.find("# invocation: ") != std::string::npos);
    CHECK(r.out.find("# version: aperiodic ") != std::string::npos);
    CHECK(payload(r.out) == "01010\n");
}

TEST_CASE("discrepancy emits the documented CSV and stays within one") {
    RunResult r = run("discrepancy --system sturmian --phi \"quad:(-1+1*sqrt5)/2\" "
                      "--patch 1 --lengths 10,100,1000 --prefix 100000");
    CHECK(r.exit_code == 0);
    std::string body = payload(r.out);
    CHECK(body.rfind("L,D,argmax_start\n", 0) == 0);
    std::istringstream in(body);
    std::string line;
    std::getline(in, line); // header
    int rows = 0;
    while (std::getline(in, line)) {
        auto c1 = line.find(','), c2 = line.rfind(',');
        REQUIRE(c1 != std::string::npos);
        double d = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        CHECK(d <= 1.0);
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("gibbs json carries the full schema") {
    write_file("/tmp/cli_st.spec", kSturmianSpec);
    RunResult r = run("gibbs --spec /tmp/cli_st.spec --volume 10 --beta 2 --method exact");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("invocation"));
    CHECK(j.contains("version"));
    const auto& res = j["result"];
    for (const char* key : {"beta", "method", "sweeps", "seed", "rng", "energy",
                            "observables"})
        CHECK(res.contains(key));
    CHECK(res["method"] == "exact");
    CHECK(res["energy"].contains("mean"));
    CHECK(res["energy"].contains("se"));
    CHECK(res["observables"].size() == 2);
}

TEST_CASE("fixed seeds reproduce stochastic output byte-for-byte") {
    write_file("/tmp/cli_st.spec", kSturmianSpec);
    std::string args = "gibbs --spec /tmp/cli_st.spec --volume 8 --beta 1.5 "
                       "--method metropolis --sweeps 5000 --burn-in 100 --seed 99";
    RunResult a = run(args);
    RunResult b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    RunResult c = run(args + "9"); // different seed
    CHECK(c.out != a.out);
}

TEST_CASE("threads do not change envelope results") {
    std::string base = "discrepancy --system thue-morse --patch ++ --lengths 32,256 "
                       "--prefix 20000 --omega 0.16666666 --envelope";
    RunResult one = run(base + " --threads 1");
    RunResult four = run(base + " --threads 4");
    CHECK(one.exit_code == 0);
    CHECK(payload(one.out) == payload(four.out));
}

TEST_CASE("stability scan emits the documented CSV columns") {
    write_file("/tmp/cli_tm.spec", "family thue-morse\nlambda 0.25\nr_max 6\np_max 6\n");
    RunResult r = run("stability-scan --spec /tmp/cli_tm.spec --family hierarchical "
                      "--scales 2-5 --anchors 2 --favored ++,--");
    CHECK(r.exit_code == 0);
    std::string body = payload(r.out);
    CHECK(body.rfind("size,energy,gain,epsilon_star\n", 0) == 0);
    CHECK(std::count(body.begin(), body.end(), '\n') == 5); // header + 4 sizes
}

TEST_CASE("search and ground-check agree on the sturmian ground state") {
    write_file("/tmp/cli_st.spec", kSturmianSpec);
    RunResult s = run("search --spec /tmp/cli_st.spec --window-width 8");
    CHECK(s.exit_code == 0);
    CHECK(payload(s.out).find("min_energy,0\n") != std::string::npos);
    RunResult g = run("ground-check --spec /tmp/cli_st.spec --window-width 8 --format json");
    CHECK(g.exit_code == 0);
    auto j = nlohmann::json::parse(g.out);
    CHECK(j["result"]["locally_ground"] == true);
    CHECK(j["result"]["witness"] == "");
}

TEST_CASE("tiling commands round-trip files and certify fixtures") {
    write_file("/tmp/cli_single.tiles", "T 0 0 0 0 0\n");
    write_file("/tmp/cli_bad.tiles", "T 0 1 0 0 0\n");
    write_file("/tmp/cli_holes.grid", "G 3 3 0 0\n. . .\n. 0 .\n. . .\n");
    write_file("/tmp/cli_domino.grid", "G 1 2 0 0\n.\n.\n");

    RunResult done = run("tiling-complete --tileset /tmp/cli_single.tiles "
                         "--grid /tmp/cli_holes.grid --out /tmp/cli_done.grid");
    CHECK(done.exit_code == 0);
    RunResult verify = run("tiling-verify --tileset /tmp/cli_single.tiles "
                           "--grid /tmp/cli_done.grid");
    CHECK(verify.exit_code == 0);
    CHECK(verify.out.find("# broken: 0") != std::string::npos);

    RunResult unsat = run("tiling-complete --tileset /tmp/cli_bad.tiles "
                          "--grid /tmp/cli_domino.grid");
    CHECK(unsat.exit_code == 0);
    CHECK(unsat.out.find("unsatisfiable") != std::string::npos);

    RunResult count = run("tiling-count --grid /tmp/cli_done.grid --patch 0,0=0 --omega 1");
    CHECK(count.exit_code == 0);
    CHECK(payload(count.out).find("count,9") != std::string::npos);
    CHECK(payload(count.out).find("perimeter,12") != std::string::npos);
}

TEST_CASE("relative-energy reports the per-term breakdown") {
    write_file("/tmp/cli_st.spec", kSturmianSpec);
    // flipping site 1 of the golden word (a '1') to '0' makes a zero run
    RunResult r = run("relative-energy --spec /tmp/cli_st.spec --override 1:0 --format json");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["result"]["total"].get<double>() > 0.0);
    CHECK(j["result"].contains("per_term"));
}
