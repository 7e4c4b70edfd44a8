#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "dyadic/cli.hpp"
#include "dyadic/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace dyadic;

namespace {

fs::path scratch_dir() {
    const auto d = fs::temp_directory_path() / "dyadic_io_tests";
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::string all((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    return all;
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.0, -0.0, 0.1, 1.0 / 3.0, 2.5, -17.25, 1e-300, 1e308,
                     3.141592653589793, 245.57265972402755,
                     std::numeric_limits<double>::denorm_min()}) {
        const std::string s = io::format_double(v);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == v);
    }
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("time series CSV has the pinned column layout") {
    const auto dir = scratch_dir();
    const auto path = dir / "ts.csv";

    diagnostics_record r1;
    r1.t = 0.0;
    r1.energy = 1.0;
    r1.enstrophy = 2.0;
    r1.norm_gamma_sq = 4.0;
    r1.norm_third = 3.0;
    r1.min_mode = -0.5;
    r1.tail_fraction = 0.25;
    r1.energy_budget_residual = 0.0;
    diagnostics_record r2 = r1;
    r2.t = 0.5;
    r2.h_value = 4.25;
    r2.riccati_value = 2.125;

    io::write_timeseries_csv(path.string(), {r1, r2});
    const std::string text = slurp(path);

    const std::string header =
        "t,energy,enstrophy,norm_gamma_sq,norm_third,h_value,riccati_value,"
        "min_mode,tail_fraction,energy_budget_residual";
    REQUIRE(text.rfind(header + "\n", 0) == 0);

    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);  // header
    std::getline(lines, line);
    // optionals absent: two adjacent empty cells
    CHECK(line.find(",,,") != std::string::npos);
    CHECK(line.rfind("0,1,2,4,3,", 0) == 0);
    std::getline(lines, line);
    CHECK(line.find("4.25,2.125") != std::string::npos);
    fs::remove(path);
}

TEST_CASE("amplitude files accept comments and reject junk") {
    const auto dir = scratch_dir();
    const auto good = dir / "amps_good.txt";
    spit(good, "# leading comment\n1.5\n\n  -2.25 # trailing comment\n0\n");
    const auto u = io::load_amplitudes(good.string());
    CHECK(u == std::vector<double>{1.5, -2.25, 0.0});

    const auto bad = dir / "amps_bad.txt";
    spit(bad, "1.0\nnot-a-number\n");
    CHECK_THROWS_AS((void)io::load_amplitudes(bad.string()), parse_error);
    CHECK_THROWS_AS((void)io::load_amplitudes((dir / "missing.txt").string()),
                    parse_error);
    fs::remove(good);
    fs::remove(bad);
}

TEST_CASE("parameter hash is stable, sensitive, and 16 hex digits") {
    experiment_plan a;
    a.kind = experiment_kind::simulate;
    const std::string h1 = io::param_hash(a);
    const std::string h2 = io::param_hash(a);
    CHECK(h1 == h2);
    CHECK(h1.size() == 16);
    CHECK(h1.find_first_not_of("0123456789abcdef") == std::string::npos);

    experiment_plan b = a;
    b.params.lambda = 2.5;
    CHECK(io::param_hash(b) != h1);
    experiment_plan c = a;
    c.seed = 99;
    CHECK(io::param_hash(c) != h1);
}

TEST_CASE("kind names match the subcommands") {
    CHECK(std::string(io::kind_name(experiment_kind::simulate)) == "simulate");
    CHECK(std::string(io::kind_name(experiment_kind::blowup)) == "blowup");
    CHECK(std::string(io::kind_name(experiment_kind::regularity)) ==
          "regularity");
    CHECK(std::string(io::kind_name(experiment_kind::attractor)) ==
          "attractor");
    CHECK(std::string(io::kind_name(experiment_kind::verify)) == "verify");
}

TEST_CASE("subcommand defaults depend on the study kind") {
    const auto sim = cli::parse_args({"simulate"});
    CHECK_FALSE(sim.constants_only);
    CHECK(sim.plan.kind == experiment_kind::simulate);
    CHECK(sim.plan.t_end == 1.0);
    CHECK(sim.plan.gamma == 0.1);
    CHECK(sim.plan.params.force.empty());  // unforced by default
    CHECK(sim.out_dir == "out-simulate");
    CHECK_FALSE(sim.out_given);

    const auto reg = cli::parse_args({"regularity"});
    CHECK(reg.plan.t_end == 100.0);
    CHECK(reg.plan.params.force_at(1) == 1.0);

    const auto att = cli::parse_args({"attractor", "--nu", "2"});
    CHECK(att.plan.t_end == 5.0);  // 10 / nu
    CHECK(att.plan.params.force_at(1) == 1.0);

    const auto blo = cli::parse_args({"blowup", "--alpha", "0.25"});
    CHECK(blo.plan.gamma == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(blo.plan.t_end == 1.0);
    CHECK(blo.plan.params.force.empty());

    const auto con = cli::parse_args({"constants"});
    CHECK(con.constants_only);

    const auto ver = cli::parse_args({"verify", "--modes", "12"});
    CHECK(ver.plan.kind == experiment_kind::verify);
    CHECK(ver.plan.params.n_modes == 12);
}

TEST_CASE("explicit flags beat config values beat defaults") {
    const auto dir = scratch_dir();
    const auto conf = dir / "run.conf";
    spit(conf, "lambda=3\nmodes=10\n");

    const auto from_config =
        cli::parse_args({"simulate", "--config", conf.string()});
    CHECK(from_config.plan.params.lambda == 3.0);
    CHECK(from_config.plan.params.n_modes == 10);

    const auto overridden = cli::parse_args(
        {"simulate", "--config", conf.string(), "--lambda", "4"});
    CHECK(overridden.plan.params.lambda == 4.0);
    CHECK(overridden.plan.params.n_modes == 10);  // still from the config

    const auto plain = cli::parse_args({"simulate"});
    CHECK(plain.plan.params.lambda == 2.0);
    fs::remove(conf);
}

TEST_CASE("rendered config reproduces the same plan") {
    const auto dir = scratch_dir();
    const auto conf = dir / "round.conf";
    const auto a = cli::parse_args({"blowup", "--lambda", "2.5", "--nu", "0.5",
                                    "--alpha", "0.2", "--gamma", "0.07",
                                    "--modes", "20", "--modes-list", "20,40",
                                    "--t-end", "0.75", "--rel-tol", "1e-9",
                                    "--seed", "42"});
    spit(conf, cli::render_config(a));
    const auto b = cli::parse_args({"blowup", "--config", conf.string()});

    CHECK(b.plan.params == a.plan.params);
    CHECK(b.plan.gamma == a.plan.gamma);
    CHECK(b.plan.t_end == a.plan.t_end);
    CHECK(b.plan.n_list == a.plan.n_list);
    CHECK(b.plan.seed == a.plan.seed);
    CHECK(b.plan.stepper.rel_tol == a.plan.stepper.rel_tol);
    CHECK(b.plan.stepper.abs_tol == a.plan.stepper.abs_tol);
    CHECK(b.out_dir == a.out_dir);
    fs::remove(conf);
}

TEST_CASE("usage problems surface as parse_error") {
    CHECK_THROWS_AS((void)cli::parse_args({}), parse_error);
    CHECK_THROWS_AS((void)cli::parse_args({"simulate", "--no-such-flag"}),
                    parse_error);
    CHECK_THROWS_AS((void)cli::parse_args({"frobnicate"}), parse_error);
    CHECK_THROWS_AS((void)cli::parse_args({"--help"}), parse_error);

    // out-of-range values pass parsing and are rejected by the run itself
    const char* bad_lambda[] = {"dyadic", "simulate", "--lambda", "0.5"};
    CHECK(cli::run(4, bad_lambda) == 2);
}

TEST_CASE("initial amplitudes are loaded into the plan") {
    const auto dir = scratch_dir();
    const auto init = dir / "init.txt";
    spit(init, "0.5\n0.25\n");
    const auto pr = cli::parse_args(
        {"simulate", "--modes", "8", "--init", init.string()});
    CHECK(pr.plan.init == std::vector<double>{0.5, 0.25});
    CHECK(pr.init_path == init.string());
    fs::remove(init);
}

TEST_CASE("the full binary entry point runs a study end to end") {
    const auto dir = scratch_dir() / "run_out";
    fs::remove_all(dir);
    const std::string out = dir.string();
    const char* argv[] = {"dyadic",  "simulate",   "--modes", "8",
                          "--t-end", "0.05",       "--out",   out.c_str(),
                          "--rel-tol", "1e-6"};
    CHECK(cli::run(10, argv) == 0);
    REQUIRE(fs::exists(dir / "timeseries.csv"));
    REQUIRE(fs::exists(dir / "summary.json"));
    REQUIRE(fs::exists(dir / "plan.json"));

    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("version") == io::version_string);
    CHECK(summary.at("ok") == true);
    CHECK(summary.at("plan").at("kind") == "simulate");
    CHECK(summary.at("param_hash").get<std::string>().size() == 16);
    const auto plan = nlohmann::json::parse(slurp(dir / "plan.json"));
    CHECK(plan.at("modes") == 8);
    CHECK(plan.at("kind") == "simulate");

    const char* bad[] = {"dyadic", "simulate", "--bogus"};
    CHECK(cli::run(3, bad) == 2);
    fs::remove_all(dir);
}
