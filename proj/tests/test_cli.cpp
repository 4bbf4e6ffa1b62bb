#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

#include "btdw/oracles.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "btdw_cli_test";

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Run run(const std::string& args) {
    fs::create_directories(kWork);
    const auto out = kWork / "stdout.txt", err = kWork / "stderr.txt";
    const std::string cmd = std::string(BTDW_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("validate runs the fixture checks") {
    const auto r = run("validate");
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("PASS five-node q4 table") != std::string::npos);
}

TEST_CASE("l1 scores sum to one") {
    const auto r = run("centrality --named squid --theta 1 --alpha-rel 0.99 --norm l1");
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 12);
    CHECK(rows[0] == std::vector<std::string>{"node", "score"});
    double sum = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) sum += std::stod(rows[i][1]);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("named star matches the closed form") {
    const auto r = run("centrality --named star:10 --theta 0.5 --alpha 0.2 --norm none");
    REQUIRE(r.code == 0);
    const auto expected = btdw::star_katz(btdw::StarParams(10, 0.5), 0.2).scores;
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 12);
    for (int i = 0; i < 11; ++i) CHECK(std::stod(rows[static_cast<std::size_t>(i + 1)][1]) == doctest::Approx(expected[i]).epsilon(1e-11));
}

TEST_CASE("eigen-btdw at theta=1 gives the Perron vector with a metadata sidecar") {
    const auto out = kWork / "eig.csv";
    const auto r = run("centrality --named squid --measure eigen-btdw --theta 1 --norm none --tol 1e-13 --out " + out.string());
    REQUIRE(r.code == 0);
    const auto rows = csv(slurp(out));
    const auto sq = btdw::squid_spectrum();
    const double s0 = std::stod(rows[1][1]);
    for (int i = 0; i < 11; ++i) CHECK(std::stod(rows[static_cast<std::size_t>(i + 1)][1]) / s0 == doctest::Approx(sq.v[i]).epsilon(1e-8));
    const auto meta = nlohmann::json::parse(slurp(out.string() + ".json"));
    CHECK(meta["measure"] == "eigen-btdw");
    CHECK(meta["solver"]["converged"] == true);
    CHECK(meta["alpha"].get<double>() == doctest::Approx(1.0 / sq.lambda).epsilon(1e-8));
}

TEST_CASE("sweep output is byte-identical across runs and thread counts") {
    const std::string base = "sweep --named squid --thetas 0:1:0.05 --alpha-rel 0.5,0.9,0.99 ";
    const auto s1 = kWork / "s1.csv", s4 = kWork / "s4.csv";
    const auto a = run(base + "--jobs 1 --summary " + s1.string());
    const auto b = run(base + "--jobs 4 --summary " + s4.string());
    const auto c = run(base + "--jobs 4");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(slurp(s1) == slurp(s4));
    CHECK(csv(a.out).size() == 1 + 21 * 3 * 11);
    const auto wide = run(base + "--wide ipr");
    REQUIRE(wide.code == 0);
    CHECK(csv(wide.out).size() == 22);
    CHECK(csv(wide.out)[0].size() == 4);
}

TEST_CASE("sweep with a score file adds correlation columns") {
    const auto scores = kWork / "scores.csv";
    {
        std::ofstream f(scores);
        f << "node,score\n";
        for (int i = 1; i <= 11; ++i) f << i << ',' << (12 - i) << '\n';
    }
    const auto summary = kWork / "summary.csv";
    const auto r = run("sweep --named squid --thetas 0,1 --alphas 0.1,0.2 --scores " + scores.string() +
                       " --out /dev/null --summary " + summary.string());
    REQUIRE(r.code == 0);
    const auto rows = csv(slurp(summary));
    CHECK(rows[0] == std::vector<std::string>{"theta", "alpha", "status", "ipr", "tau", "rho", "normalization"});
    CHECK(rows.size() == 5);
}

TEST_CASE("unreadable score file fails before computing") {
    const auto r = run("sweep --named squid --thetas 0,1 --alphas 0.1 --scores /nonexistent/scores.csv");
    CHECK(r.code != 0);
    CHECK(r.out.empty());
    CHECK(r.err.find("score file") != std::string::npos);
}

TEST_CASE("failures give a nonzero exit and a diagnostic") {
    const auto beyond = run("centrality --named squid --theta 0 --alpha 5");
    CHECK(beyond.code != 0);
    CHECK(beyond.err.find("error") != std::string::npos);
    const auto cycle = run("centrality --named cycle:5 --measure eigen-btdw --theta 0.5");
    CHECK(cycle.code != 0);
    CHECK(!cycle.err.empty());
    CHECK(run("centrality --named squid --measure eigen-btdw --alpha 0.1").code != 0);
    CHECK(run("centrality --named squid --measure katz-btdw").code != 0);
    CHECK(run("centrality --graph /nonexistent/graph.txt --alpha 0.1").code != 0);
    CHECK(run("centrality --named squid --theta 2 --alpha 0.1").code != 0);
}

TEST_CASE("alpha-star table for a regular circulant") {
    const auto r = run("alpha-star --named regular:20:4 --thetas 0,0.5,1");
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"theta", "alpha_star", "rho", "converged", "iterations"});
    for (std::size_t i = 1; i < 4; ++i) {
        const double theta = std::stod(rows[i][0]);
        CHECK(std::stod(rows[i][1]) == doctest::Approx(1.0 / (3.0 + theta)).epsilon(1e-8));
        CHECK(rows[i][3] == "true");
    }
}

TEST_CASE("genfun routes agree through the CLI") {
    const std::string base = "genfun --named five-node --series exponential --alpha 1 --theta 0.5 --action-only ";
    const auto blockz = run(base + "--route blockz");
    const auto direct = run(base + "--route direct");
    const auto expm = run(base + "--route expm");
    REQUIRE(blockz.code == 0);
    REQUIRE(direct.code == 0);
    REQUIRE(expm.code == 0);
    const auto a = csv(blockz.out), b = csv(direct.out), c = csv(expm.out);
    REQUIRE(a.size() == 6);
    for (std::size_t i = 1; i < a.size(); ++i) {
        CHECK(std::stod(a[i][1]) == doctest::Approx(std::stod(b[i][1])).epsilon(1e-10));
        CHECK(std::stod(a[i][1]) == doctest::Approx(std::stod(c[i][1])).epsilon(1e-10));
    }

    const auto coeffs = kWork / "coeffs.txt";
    {
        std::ofstream f(coeffs);
        f << "# c0 c1 c2\n1, 0, 0\n";
    }
    const auto id = run("genfun --named five-node --series custom --coeffs " + coeffs.string());
    REQUIRE(id.code == 0);
    const auto m = csv(id.out);
    REQUIRE(m.size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) CHECK(std::stod(m[i][j]) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("walk-counts reproduces the printed q4 entry and agrees with brute force") {
    const auto rec = run("walk-counts --named five-node --theta 0.3 --k 4");
    const auto bf = run("walk-counts --named five-node --theta 0.3 --k 4 --brute-force");
    REQUIRE(rec.code == 0);
    REQUIRE(bf.code == 0);
    const auto a = csv(rec.out), b = csv(bf.out);
    REQUIRE(a.size() == 6);
    // q4(1,5) = 1 + t + t^2
    CHECK(std::stod(a[1][4]) == doctest::Approx(1.39).epsilon(1e-14));
    for (std::size_t i = 1; i < 6; ++i)
        for (std::size_t j = 0; j < 5; ++j) CHECK(std::stod(a[i][j]) == doctest::Approx(std::stod(b[i][j])).epsilon(1e-14));
}

TEST_CASE("edge-list files, bases and BTDW_DATA_DIR") {
    const auto dir = kWork / "data";
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "tri.txt");
        f << "# triangle plus a pendant\n0 1\n1 2\n2 0\n2 3\n";
    }
    const auto zero = run("centrality --graph " + (dir / "tri.txt").string() + " --base 0 --undirected --alpha 0.1");
    REQUIRE(zero.code == 0);
    CHECK(csv(zero.out)[1][0] == "0");
    const std::string env = "BTDW_DATA_DIR=" + dir.string() + " ";
    const std::string cmd = env + std::string(BTDW_CLI) + " centrality --graph tri.txt --base 0 --undirected --alpha 0.1 > " +
                            (kWork / "env.txt").string();
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(slurp(kWork / "env.txt") == zero.out);
}
