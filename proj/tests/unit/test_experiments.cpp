#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fsl/config.hpp"
#include "fsl/digest.hpp"
#include "fsl/error.hpp"
#include "fsl/experiments.hpp"

using namespace fsl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / "fsl_unit" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("flux specs") {
  CHECK(parse_flux("burgers").value(2.0) == doctest::Approx(2.0));
  CHECK(parse_flux("zero").is_zero());
  CHECK(parse_flux("linear:0.75").derivative(3.0) == doctest::Approx(0.75));
  auto cubic = parse_flux("poly:0,0,0,1");
  CHECK(cubic.value(2.0) == doctest::Approx(8.0));
  CHECK_THROWS_AS(parse_flux("poly:1,x"), Error);
  CHECK_THROWS_AS(parse_flux("nonsense"), Error);
}

TEST_CASE("sha256 digest") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  ExperimentParams a, b;
  CHECK(a.digest() == b.digest());
  b.seed += 1;
  CHECK(a.digest() != b.digest());
}

TEST_CASE("report verdicts and json round trip") {
  ExperimentReport r;
  r.id = "verify_example";
  r.add_check("ok", true, 1.0, 2.0);
  CHECK(r.finalize() == Verdict::pass);
  r.mark_inconclusive("floor");
  CHECK(r.finalize() == Verdict::inconclusive);
  r.add_check("bad", false, 3.0, kInf, "instance 7");
  CHECK(r.finalize() == Verdict::fail);
  r.add_series({"s", "t", "y", {1.0, 10.0}, {1.0, 0.1}});
  r.exponents.push_back({"slope", -1.0, 0.01, -1.0, 0.15, 10.0, 1e4});
  r.bounds.push_back({"x0=1", 0.5, 1.0, 1e-3});
  r.add_constant("C", 2.5);
  r.notes.push_back("note");
  auto back = ExperimentReport::from_json(nlohmann::json::parse(r.to_json().dump()));
  CHECK(back.verdict == Verdict::fail);
  CHECK(back.checks.size() == 2);
  CHECK(std::isinf(back.checks[1].limit));
  CHECK(back.checks[1].detail == "instance 7");
  CHECK(back.series[0].y[1] == 0.1);
  CHECK(back.exponents[0].window_hi == 1e4);
  CHECK(back.bounds[0].holds());
  CHECK(back.constant("C") == 2.5);
  CHECK_THROWS_AS(back.constant("missing"), Error);
  CHECK_THROWS_AS(ExperimentReport::from_json(nlohmann::json{{"schema", "other"}}), Error);
}

TEST_CASE("log-log slope fit") {
  std::vector<double> x, y;
  for (int k = 0; k <= 30; ++k) {
    x.push_back(std::pow(10.0, k / 10.0));
    y.push_back(3.0 * std::pow(x.back(), -0.5));
  }
  auto e = fit_log_slope(x, y, 10.0, 1000.0);
  CHECK(e.value == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(e.confidence < 1e-10);
  CHECK_THROWS_AS(fit_log_slope(x, y, 5000.0, 6000.0), Error);
}

TEST_CASE("parallel helpers keep order and rethrow") {
  std::vector<std::function<int()>> jobs;
  for (int k = 0; k < 20; ++k) jobs.push_back([k] { return k * k; });
  auto out = run_parallel<int>(jobs);
  for (int k = 0; k < 20; ++k) CHECK(out[k] == k * k);
  std::atomic<int> sum{0};
  parallel_for(100, [&](std::size_t i) { sum += static_cast<int>(i); });
  CHECK(sum == 4950);
  CHECK_THROWS_AS(parallel_for(4, [](std::size_t i) { if (i == 2) throw Error("boom"); }), Error);

  setenv("FSL_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("FSL_THREADS", "zero", 1);
  CHECK_THROWS_AS(worker_count(), Error);
  unsetenv("FSL_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("experiment registry") {
  CHECK(experiment_registry().size() >= 9);
  CHECK(find_experiment("alibaud").id == "verify_alibaud");
  CHECK(find_experiment("verify_alibaud").reference.find("Proposition 2.1") != std::string::npos);
  CHECK_THROWS_AS(find_experiment("bogus"), Error);
  for (const auto& info : experiment_registry()) {
    CHECK(!info.reference.empty());
    CHECK(static_cast<bool>(info.run));
  }
}

TEST_CASE("config defaults and validation") {
  auto c = parse_config("experiment = decay_rates\nflux = burgers\na = 1\n");
  CHECK(c.experiment == "verify_decay_rates");
  CHECK(c.params.points == 4096);
  CHECK(c.params.half_width == 128.5);
  CHECK(c.params.scheme.cfl == 0.4);

  auto cfl = message_of([] { parse_config("experiment = decay_rates\nCFL = 1.5\n"); });
  CHECK(cfl.find("CFL out of (0,1]") != std::string::npos);
  auto foo = message_of([] { parse_config("experiment = decay_rates\nfoo = 1\n"); });
  CHECK(foo.find("foo") != std::string::npos);
  auto syntax = message_of([] { parse_config("experiment = decay_rates\n[grid\n"); });
  CHECK(syntax.find("line 2") != std::string::npos);
  auto bad_n = message_of([] { parse_config("experiment = decay_rates\n[grid]\nN = 1000\n"); });
  CHECK(bad_n.find("power of two") != std::string::npos);
  auto wrong_section = message_of([] { parse_config("experiment = decay_rates\n[grid]\nCFL = 0.3\n"); });
  CHECK(wrong_section.find("[scheme]") != std::string::npos);
  CHECK_THROWS_AS(parse_config("flux = burgers\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = decay_rates\nh_table = /nonexistent/table.txt\n"), ConfigError);
}

TEST_CASE("resolved config reproduces the config") {
  auto c = parse_config(
      "experiment = smoothing_lemma\n[verifier]\nsmoothing_triples = inf:1:inf, 2:1:2\nnorms = 1:inf, 2:inf\n"
      "[scheme]\nCFL = 0.3\nnumerical_flux = llf\n");
  auto text = resolved_config(c);
  auto again = parse_config(text);
  CHECK(resolved_config(again) == text);
  CHECK(again.params.digest() == c.params.digest());
  CHECK(again.params.smoothing_triples.size() == 2);
  CHECK(again.params.scheme.flux == NumericalFlux::local_lax_friedrichs);
}

TEST_CASE("runs are content addressed and never overwritten") {
  auto dir = scratch_dir("runs");
  auto c = parse_config("experiment = linear_exactness\nN = 256\nX = 16\n");
  c.output = dir;
  auto first = execute(c);
  CHECK(!first.reused);
  CHECK(first.report.verdict == Verdict::pass);
  CHECK(exit_code(first.report.verdict) == 0);
  for (const char* name : {"resolved-config.ini", "report.json", "diagnostics.csv", "steps.csv", "snapshots/final.fsl"})
    CHECK(fs::exists(first.directory / name));
  auto stamp = fs::last_write_time(first.directory / "report.json");
  auto second = execute(c);
  CHECK(second.reused);
  CHECK(second.directory == first.directory);
  CHECK(fs::last_write_time(first.directory / "report.json") == stamp);
  CHECK(fs::exists(dir / "verify_linear_exactness-summary.csv"));

  auto reloaded = load_config(first.directory / "resolved-config.ini");
  reloaded.output = dir;
  CHECK(execute(reloaded).directory == first.directory);
}

TEST_CASE("under-resolved decay run is inconclusive") {
  auto c = parse_config("experiment = decay_rates\nN = 32\n");
  auto r = run_experiment(c.experiment, c.params);
  CHECK(r.verdict == Verdict::inconclusive);
  CHECK(exit_code(r.verdict) == 2);
}

TEST_CASE("profile of constant data is trivial") {
  auto c = parse_config("experiment = profile\na = 0\nmu = 0.3\nN = 256\nX = 16\n");
  auto r = run_experiment(c.experiment, c.params);
  CHECK(r.verdict == Verdict::pass);
  REQUIRE(r.find_check("constant data give the constant profile") != nullptr);
}

TEST_CASE("module errors carry the experiment id") {
  ExperimentParams p = find_experiment("tail").defaults;
  p.dim = 2;
  p.points = 64;
  auto msg = message_of([&] { run_experiment("tail", p); });
  CHECK(msg.rfind("verify_tail: ", 0) == 0);
}

TEST_CASE("fundamental solution with zero drift is the Poisson kernel") {
  ExperimentParams p = find_experiment("fundamental_bounds").defaults;
  p.flux = "zero";
  p.points = 1024;
  p.half_width = 32.0;
  auto r = run_experiment("fundamental_bounds", p);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.constant("C0") == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("smoothing verifier on a small suite") {
  ExperimentParams p = find_experiment("smoothing_lemma").defaults;
  p.samples = 4;
  p.smoothing_triples = {{kInf, 1.0, kInf}, {2.0, 2.0, 2.0}};
  auto r = run_experiment("smoothing_lemma", p);
  REQUIRE(r.find_check("Young bound (2,2,2)") != nullptr);
  CHECK(r.find_check("Young bound (2,2,2)")->passed);
  CHECK(r.find_check("smoothing exponent (inf,1,inf)")->passed);
}

TEST_CASE("pair contraction holds once the boundary inflow is removed") {
  ExperimentParams p = find_experiment("alibaud").defaults;
  p.samples = 10;
  p.points = 2048;
  p.coarse_points = 1024;
  auto r = run_experiment("alibaud", p);
  const auto* c = r.find_check("global L1 contraction of the pairs net of boundary inflow");
  REQUIRE(c != nullptr);
  CHECK(c->passed);
  CHECK(r.constant("mass through the box boundary") > 0.0);
}
