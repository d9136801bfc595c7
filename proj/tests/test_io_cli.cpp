#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "decaylab/grid.hpp"
#include "decaylab/io.hpp"

using namespace decaylab;
namespace fs = std::filesystem;
using Catch::Approx;

namespace {

fs::path work_dir() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / "decaylab_cli_test";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DECAYLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream os(p);
    os << body;
}

}  // namespace

TEST_CASE("curve CSV round trip") {
    std::vector<SurvivalCurve::Sample> s;
    for (double t : geometric_grid(0.1, 30.0, 40)) s.push_back({t, std::exp(-0.3 * t)});
    const SurvivalCurve curve{std::move(s)};
    std::stringstream ss;
    io::write_curve_csv(ss, curve);
    const auto back = io::read_curve_csv(ss);
    REQUIRE(back.size() == curve.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back.samples()[i].t == curve.samples()[i].t);
        CHECK(back.samples()[i].v == curve.samples()[i].v);
    }
}

TEST_CASE("curve CSV tolerates comments and extra columns") {
    std::stringstream ss("# comment\nt,value,extra\n0,1.0,9\n1,0.5,9\n2,0.25,9\n");
    const auto c = io::read_curve_csv(ss);
    REQUIRE(c.size() == 3);
    CHECK(c.samples()[1].v == 0.5);
}

TEST_CASE("malformed curve CSV raises ParseError") {
    std::stringstream bad("t,value\n0,1.0\nnot,a,number\n");
    CHECK_THROWS_AS(io::read_curve_csv(bad), io::ParseError);
    std::stringstream empty("t,value\n");
    CHECK_THROWS_AS(io::read_curve_csv(empty), io::ParseError);
    std::stringstream rising("t,value\n0,0.5\n1,0.9\n");
    CHECK_THROWS_AS(io::read_curve_csv(rising), io::ParseError);
}

TEST_CASE("mode-set JSON round trip sorts by gamma") {
    const ExpModeSet ms({{0.3, 0.5}, {0.7, 2.0}});
    const auto j = io::mode_set_to_json(ms, 700.0);
    const auto doc = io::mode_set_from_json(j);
    REQUIRE(doc.mass.has_value());
    CHECK(*doc.mass == 700.0);
    REQUIRE(doc.modes.size() == 2);
    CHECK(doc.modes[0].gamma == 0.5);
    CHECK(doc.modes[1].w == Approx(0.7).margin(1e-15));

    // null mass
    const auto j2 = io::mode_set_to_json(ms, std::nullopt);
    CHECK(j2["M"].is_null());
    CHECK_FALSE(io::mode_set_from_json(j2).mass.has_value());

    // unnormalized weights rejected
    auto bad = j;
    bad["modes"][0]["w"] = 0.9;
    CHECK_THROWS_AS(io::mode_set_from_json(bad), io::ParseError);
}

TEST_CASE("cli: fit recovers a pure exponential and is deterministic") {
    const auto dir = work_dir();
    {
        std::ofstream os(dir / "exp.csv");
        os << "t,value\n";
        for (double t : geometric_grid(0.1, 20.0, 50))
            os << io::format_double(t) << ',' << io::format_double(std::exp(-0.7 * t)) << '\n';
    }
    const std::string base = "fit --input " + (dir / "exp.csv").string() + " --modes 1 --seed 7 " +
                             "--restarts 3 --out ";
    REQUIRE(run_cli(base + (dir / "m1.json").string()) == 0);
    REQUIRE(run_cli(base + (dir / "m2.json").string()) == 0);
    CHECK(slurp(dir / "m1.json") == slurp(dir / "m2.json"));  // byte-identical under fixed seed

    const auto doc = io::read_model_file((dir / "m1.json").string());
    REQUIRE(doc.modes.size() == 1);
    // curve held P0 = e^{-0.7 t}; the fitted width matches 0.7
    CHECK(doc.modes[0].gamma == Approx(0.7).epsilon(1e-6));
    CHECK(doc.modes[0].w == Approx(1.0).margin(1e-9));
}

TEST_CASE("cli: malformed csv exits 2") {
    const auto dir = work_dir();
    write_file(dir / "bad.csv", "t,value\nghost,1\n");
    CHECK(run_cli("fit --input " + (dir / "bad.csv").string() + " --modes 1 --out " +
                  (dir / "x.json").string()) == 2);
    CHECK(run_cli("fit --input " + (dir / "missing.csv").string() + " --modes 1 --out " +
                  (dir / "x.json").string()) == 2);
}

TEST_CASE("cli: transform emits gamma column and matches rest law at p=0") {
    const auto dir = work_dir();
    write_file(dir / "model.json",
               R"({"M": 600.0, "modes": [{"w": 0.4, "gamma": 0.2}, {"w": 0.6, "gamma": 1.1}]})");
    REQUIRE(run_cli("transform --model " + (dir / "model.json").string() +
                    " --p 600 --grid 3:20:40 --out " + (dir / "tr.csv").string()) == 0);
    const auto body = slurp(dir / "tr.csv");
    CHECK(body.find("gamma = 1.4142135623730951") != std::string::npos);

    REQUIRE(run_cli("transform --model " + (dir / "model.json").string() +
                    " --p 0 --grid 3:20:40 --out " + (dir / "tr0.csv").string()) == 0);
    std::ifstream is(dir / "tr0.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double t, pp, p0, g;
        int warn;
        row >> t >> pp >> p0 >> g >> warn;
        CHECK(pp == Approx(p0).epsilon(1e-12));
        CHECK(g == 1.0);
        ++rows;
    }
    CHECK(rows == 40);
}

TEST_CASE("cli: transform without M exits 2") {
    const auto dir = work_dir();
    write_file(dir / "nom.json", R"({"M": null, "modes": [{"w": 1.0, "gamma": 0.5}]})");
    CHECK(run_cli("transform --model " + (dir / "nom.json").string() + " --p 100 --out " +
                  (dir / "t.csv").string()) == 2);
}

TEST_CASE("cli: window at gamma -> 1 exits 4, works for p > 0") {
    const auto dir = work_dir();
    write_file(dir / "w.json", R"({"M": 1000.0, "modes": [{"w": 1.0, "gamma": 1.0}]})");
    CHECK(run_cli("window --model " + (dir / "w.json").string() + " --p 0" + " --out " +
                  (dir / "w0.json").string()) == 4);
    REQUIRE(run_cli("window --model " + (dir / "w.json").string() + " --p 1000 --out " +
                    (dir / "w1.json").string()) == 0);
    nlohmann::json rep;
    std::ifstream(dir / "w1.json") >> rep;
    CHECK(rep["closed_interval"].get<bool>());
    CHECK(rep["dominant_indices"].size() == 1);
    CHECK(rep["gamma"].get<double>() == Approx(std::sqrt(2.0)));
    CHECK(rep["I_p"].size() == 1);
    const double lo = rep["I_p"][0][0].get<double>();
    const double hi = rep["I_p"][0][1].get<double>();
    CHECK(lo == Approx(2.0 * 1.000200060e-4 * std::sqrt(2.0) / 1.0).epsilon(1e-4));
    CHECK(hi == Approx(2.0 * 5.45327870 * std::sqrt(2.0) / 1.0).epsilon(1e-4));
}

TEST_CASE("cli: strong-decay ratio produces constraint warnings in the report") {
    const auto dir = work_dir();
    write_file(dir / "rho.json", R"({"M": 1.0, "modes": [{"w": 1.0, "gamma": 0.191}]})");
    REQUIRE(run_cli("window --model " + (dir / "rho.json").string() +
                    " --p 1.7320508 --ratio-max 0.5 --out " + (dir / "rho_w.json").string()) == 0);
    nlohmann::json rep;
    std::ifstream(dir / "rho_w.json") >> rep;
    // rho-meson-like width: xi too large for the default cut -> empty window with diagnostics
    if (rep["dominant_indices"].empty()) {
        CHECK(rep.contains("empty_window_diagnostics"));
    } else {
        CHECK_FALSE(rep["constraints_satisfied"]["pt"].get<bool>());
    }
}

TEST_CASE("cli: phi emits near-identity trace at p = 0 and linearity footer") {
    const auto dir = work_dir();
    write_file(dir / "m.json", R"({"M": 1000.0, "modes": [{"w": 1.0, "gamma": 0.001}]})");
    REQUIRE(run_cli("phi --model " + (dir / "m.json").string() +
                    " --p 0 --grid 100:10000:30:geom --out " + (dir / "phi0.csv").string()) == 0);
    const auto body = slurp(dir / "phi0.csv");
    CHECK(body.find("# linearity: slope = ") != std::string::npos);
    std::ifstream is(dir / "phi0.csv");
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double t, phi, tg, dev;
        int flag;
        row >> t >> phi >> tg >> dev >> flag;
        REQUIRE(phi == Approx(t).epsilon(1e-6));
    }
}

TEST_CASE("cli: outputs are byte-identical across repeated runs") {
    const auto dir = work_dir();
    write_file(dir / "d.json", R"({"M": 500.0, "modes": [{"w": 1.0, "gamma": 0.05}]})");
    const std::string args = "phi --model " + (dir / "d.json").string() +
                             " --p 1000 --grid 10:700:50 --out ";
    REQUIRE(run_cli(args + (dir / "p1.csv").string()) == 0);
    REQUIRE(run_cli(args + (dir / "p2.csv").string()) == 0);
    CHECK(slurp(dir / "p1.csv") == slurp(dir / "p2.csv"));
}

TEST_CASE("cli: transform output feeds back into fit (round trip)") {
    const auto dir = work_dir();
    write_file(dir / "rt.json", R"({"M": 2000.0, "modes": [{"w": 1.0, "gamma": 0.01}]})");
    REQUIRE(run_cli("transform --model " + (dir / "rt.json").string() +
                    " --p 0 --grid 1:400:60:geom --out " + (dir / "rt.csv").string()) == 0);
    REQUIRE(run_cli("fit --input " + (dir / "rt.csv").string() + " --modes 1 --seed 3 --out " +
                    (dir / "rt_back.json").string()) == 0);
    const auto doc = io::read_model_file((dir / "rt_back.json").string());
    CHECK(doc.modes[0].gamma == Approx(0.01).epsilon(1e-6));
}
