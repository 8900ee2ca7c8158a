#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chase/cli.hpp"
#include "chase/report.hpp"

using namespace chase;

namespace {

HPolytoped box_poly(const Vector& lo, const Vector& hi) {
  const Index d = lo.size();
  Matrix a(2 * d, d);
  Vector b(2 * d);
  a.setZero();
  for (Index j = 0; j < d; ++j) {
    a(2 * j, j) = 1.0;
    b[2 * j] = hi[j];
    a(2 * j + 1, j) = -1.0;
    b[2 * j + 1] = -lo[j];
  }
  return HPolytoped(a, b);
}

RunConfig small_config(int samples, std::uint64_t seed) {
  RunConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.source = "test";
  return cfg;
}

RunReport run_hypercube(Index d, Index n, int samples, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.norm = NormTag::Euclidean;
  spec.family = HypercubeFacesSpec{d, n, false};
  auto src = make_source(spec);
  return run_experiment(*src, small_config(samples, seed));
}

struct CliOut {
  int code = -1;
  std::string out, err;
};

CliOut cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.emplace_back("chase");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : full) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliOut r;
  r.code = cli_main(int(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string write_origin_box(const std::string& path) {
  Instance inst(1, NormTag::Euclidean);
  Vector lo(1), hi(1);
  lo << -1.0;
  hi << 1.0;
  inst.push_back(Request(box_poly(lo, hi)));
  save_instance(inst, path);
  return path;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("ratio guard") {
    CHECK(guarded_ratio(0.0, 0.0) == 0.0);
    CHECK(guarded_ratio(2.0, 1.0) == doctest::Approx(2.0));
    CHECK(guarded_ratio(1.0, 0.0) == doctest::Approx(1e12));
  }

  TEST_CASE("run bookkeeping is internally consistent") {
    RunReport rep = run_hypercube(2, 3, 128, 5);
    REQUIRE(rep.trace.size() == 3);
    REQUIRE(rep.opt_after.size() == 3);
    double alg = 0.0;
    for (const StepResult& s : rep.trace) alg += s.movement + s.service;
    CHECK(rep.alg_total == doctest::Approx(alg));
    CHECK(rep.opt_total == doctest::Approx(rep.opt_after.back()));
    CHECK(rep.ratio == doctest::Approx(guarded_ratio(rep.alg_total, rep.opt_total)));
    CHECK(rep.estimator_error_budget > 0.0);
    CHECK(rep.opt_endpoint.size() == 2);
    CHECK(rep.served.size() == 3);
  }

  TEST_CASE("json report is deterministic and embeds a replayable instance") {
    RunReport a = run_hypercube(2, 3, 128, 7);
    RunReport b = run_hypercube(2, 3, 128, 7);
    const std::string ja = report_to_json(a);
    CHECK(ja == report_to_json(b));

    const auto doc = nlohmann::ordered_json::parse(ja);
    CHECK(doc.at("dim").get<int>() == 2);
    CHECK(doc.at("opt_endpoint").size() == 2);
    Instance back = parse_instance(doc.at("served").dump());
    REQUIRE(back.size() == a.served.size());
    CHECK(back.dim() == a.served.dim());
    CHECK(back.norm() == a.served.norm());
    for (Index i = 0; i < back.size(); ++i) {
      REQUIRE(back.request(i).is_body());
      const auto& p = back.request(i).body();
      const auto& q = a.served.request(i).body();
      CHECK((p.a().array() == q.a().array()).all());
      CHECK((p.b().array() == q.b().array()).all());
    }
  }

  TEST_CASE("csv report has the fixed header and one row per step") {
    RunReport rep = run_hypercube(2, 3, 64, 1);
    const std::string csv = report_to_csv(rep);
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "step,x_0,x_1,movement,service,cum_alg,cum_opt,fixup_distance");
    int rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      CHECK(std::count(line.begin(), line.end(), ',') == 7);
    }
    CHECK(rows == 3);
  }

  TEST_CASE("svg plot exists for d = 2 and is refused otherwise") {
    RunReport rep = run_hypercube(2, 3, 64, 2);
    const std::string svg = report_to_svg(rep);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);

    RunReport flat = run_hypercube(1, 2, 64, 2);
    CHECK_THROWS_AS(report_to_svg(flat), ValidationError);
  }

  TEST_CASE("growth scan on a line stays near ratio one") {
    GrowthReport rep = run_growth(1, {2, 4}, small_config(64, 3));
    REQUIRE(rep.cells.size() == 2);
    CHECK(rep.cells[0].n == 2);
    CHECK(rep.cells[1].n == 4);
    for (const GrowthCell& c : rep.cells) CHECK(c.ratio <= 1.2);
    const std::string j = growth_to_json(rep);
    CHECK(nlohmann::json::parse(j).at("slope").is_number());
  }

  TEST_CASE("growth scan validates its grid") {
    CHECK_THROWS_AS(run_growth(1, {}, small_config(64, 3)), ValidationError);
    CHECK_THROWS_AS(run_growth(1, {4, 4}, small_config(64, 3)), ValidationError);
    CHECK_THROWS_AS(run_growth(0, {2}, small_config(64, 3)), ValidationError);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("help exits cleanly") {
    const CliOut r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("Usage") != std::string::npos);
  }

  TEST_CASE("greedy on a body containing the origin reports zero over zero as zero") {
    const std::string path = write_origin_box("cli_origin_box.json");
    const CliOut r = cli({"run", "--instance", path, "--algo", "greedy"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("alg_total").get<double>() == 0.0);
    CHECK(doc.at("ratio").get<double>() == 0.0);
    std::remove(path.c_str());
  }

  TEST_CASE("identical flags produce byte-identical output") {
    const std::vector<std::string> args{"run",       "--gen",  "hypercube:d=2,N=3",
                                        "--samples", "64",     "--seed",
                                        "2",         "--algo", "steiner"};
    const CliOut a = cli(args);
    const CliOut b = cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);

    std::vector<std::string> csv = args;
    csv.emplace_back("--format");
    csv.emplace_back("csv");
    const CliOut c = cli(csv);
    REQUIRE(c.code == 0);
    CHECK(c.out.rfind("step,x_0,x_1,", 0) == 0);
  }

  TEST_CASE("validation problems exit with code 2") {
    CHECK(cli({"run"}).code == 2);
    CHECK(cli({"run", "--gen", "hypercube:d=2,N=2", "--instance", "x.json"}).code == 2);
    CHECK(cli({"run", "--gen", "hypercube:d=2,N=2", "--algo", "wat"}).code == 2);
    CHECK(cli({"run", "--gen", "hypercube:d=1,N=2", "--svg", "cli_scratch.svg"}).code == 2);
    CHECK(cli({"run", "--instance", "no_such_file.json"}).code == 2);
    CHECK(cli({"run", "--gen", "bogus:d=2"}).code == 2);
    CHECK(cli({"check", "--suite", "nosuch"}).code == 2);

    const std::string path = write_origin_box("cli_norm_box.json");
    CHECK(cli({"run", "--instance", path, "--norm", "linf"}).code == 2);
    CHECK(cli({"run", "--instance", path, "--norm", "l2", "--algo", "greedy"}).code == 0);
    std::remove(path.c_str());
  }

  TEST_CASE("check reports pass lines and honours fault injection") {
    const CliOut ok = cli({"check", "--suite", "derivative"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("PASS derivative") != std::string::npos);

    const CliOut bad = cli({"check", "--suite", "fenchel", "--perturb-conjugate", "0.1"});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("FAIL fenchel") != std::string::npos);
    CHECK(bad.err.find("fenchel") != std::string::npos);
  }

  TEST_CASE("growth subcommand emits parseable json") {
    const CliOut r = cli({"growth", "--d", "1", "--grid", "2,4", "--samples", "64",
                          "--seed", "3"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("d").get<int>() == 1);
    CHECK(doc.at("cells").size() == 2);
  }

  TEST_CASE("adaptive runs replay identically from the embedded instance") {
    const CliOut live = cli({"run", "--gen", "hypercube:d=2,N=4,adaptive=1", "--samples",
                             "64", "--seed", "7"});
    REQUIRE(live.code == 0);
    const auto doc = nlohmann::json::parse(live.out);

    const std::string path = "cli_replay_scratch.json";
    {
      std::ofstream out(path, std::ios::binary);
      out << doc.at("served").dump();
    }
    const CliOut again = cli({"run", "--instance", path, "--samples", "64", "--seed", "7"});
    REQUIRE(again.code == 0);
    const auto doc2 = nlohmann::json::parse(again.out);
    CHECK(doc.at("trace") == doc2.at("trace"));
    CHECK(doc.at("alg_total") == doc2.at("alg_total"));
    CHECK(doc.at("opt_total") == doc2.at("opt_total"));
    std::remove(path.c_str());
  }
}
