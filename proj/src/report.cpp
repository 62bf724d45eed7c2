#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "experiment_support.hpp"
#include "fsl/digest.hpp"
#include "fsl/error.hpp"
#include "fsl/norms.hpp"

namespace fsl {

using nlohmann::json;
using detail::number;
using detail::number_from;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "fail";
}

Verdict parse_verdict(const std::string& name) {
  if (name == "pass") return Verdict::pass;
  if (name == "fail") return Verdict::fail;
  if (name == "inconclusive") return Verdict::inconclusive;
  throw Error("unknown verdict '" + name + "'");
}

bool BoundInstance::holds() const { return lhs <= rhs * (1.0 + tolerance); }

double BoundInstance::ratio() const {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

void ExperimentReport::add_check(std::string name, bool passed, double measured, double limit, std::string detail) {
  checks.push_back({std::move(name), passed, measured, limit, std::move(detail)});
}

void ExperimentReport::mark_inconclusive(std::string reason) {
  if (!inconclusive) inconclusive_reason = std::move(reason);
  inconclusive = true;
}

const Check* ExperimentReport::find_check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

double ExperimentReport::constant(const std::string& name) const {
  for (const auto& [k, v] : constants)
    if (k == name) return v;
  throw Error("report " + id + " has no constant '" + name + "'");
}

Verdict ExperimentReport::finalize() {
  bool failed = std::any_of(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; });
  verdict = failed ? Verdict::fail : (inconclusive ? Verdict::inconclusive : Verdict::pass);
  return verdict;
}

json ExperimentReport::to_json() const {
  json j;
  j["schema"] = "report-v1";
  j["id"] = id;
  j["inputs_digest"] = inputs_digest;
  j["inputs"] = inputs;
  j["seed"] = seed;
  j["verdict"] = fsl::to_string(verdict);
  j["inconclusive_reason"] = inconclusive_reason;
  j["runtime_seconds"] = runtime_seconds;
  j["series"] = json::array();
  for (const auto& s : series) {
    json xs = json::array(), ys = json::array();
    for (double v : s.x) xs.push_back(number(v));
    for (double v : s.y) ys.push_back(number(v));
    j["series"].push_back({{"name", s.name}, {"x_label", s.x_label}, {"y_label", s.y_label}, {"x", xs}, {"y", ys}});
  }
  j["exponents"] = json::array();
  for (const auto& e : exponents)
    j["exponents"].push_back({{"name", e.name},
                              {"value", number(e.value)},
                              {"confidence", number(e.confidence)},
                              {"expected", number(e.expected)},
                              {"tolerance", number(e.tolerance)},
                              {"window", {number(e.window_lo), number(e.window_hi)}}});
  j["bounds"] = json::array();
  for (const auto& b : bounds)
    j["bounds"].push_back({{"label", b.label},
                           {"lhs", number(b.lhs)},
                           {"rhs", number(b.rhs)},
                           {"tolerance", number(b.tolerance)},
                           {"ratio", number(b.ratio())},
                           {"holds", b.holds()}});
  j["checks"] = json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"measured", number(c.measured)},
                           {"limit", number(c.limit)},
                           {"detail", c.detail}});
  j["constants"] = json::object();
  for (const auto& [k, v] : constants) j["constants"][k] = number(v);
  j["notes"] = notes;
  return j;
}

ExperimentReport ExperimentReport::from_json(const json& j) {
  if (j.value("schema", std::string{}) != "report-v1") throw Error("not a report-v1 document");
  ExperimentReport r;
  r.id = j.at("id").get<std::string>();
  r.inputs_digest = j.at("inputs_digest").get<std::string>();
  r.inputs = j.at("inputs");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.verdict = parse_verdict(j.at("verdict").get<std::string>());
  r.inconclusive_reason = j.at("inconclusive_reason").get<std::string>();
  r.inconclusive = r.verdict == Verdict::inconclusive;
  r.runtime_seconds = j.at("runtime_seconds").get<double>();
  for (const auto& s : j.at("series")) {
    Series out{s.at("name"), s.at("x_label"), s.at("y_label"), {}, {}};
    for (const auto& v : s.at("x")) out.x.push_back(number_from(v));
    for (const auto& v : s.at("y")) out.y.push_back(number_from(v));
    r.series.push_back(std::move(out));
  }
  for (const auto& e : j.at("exponents"))
    r.exponents.push_back({e.at("name"), number_from(e.at("value")), number_from(e.at("confidence")),
                           number_from(e.at("expected")), number_from(e.at("tolerance")),
                           number_from(e.at("window")[0]), number_from(e.at("window")[1])});
  for (const auto& b : j.at("bounds"))
    r.bounds.push_back({b.at("label"), number_from(b.at("lhs")), number_from(b.at("rhs")),
                        number_from(b.at("tolerance"))});
  for (const auto& c : j.at("checks"))
    r.checks.push_back({c.at("name"), c.at("passed").get<bool>(), number_from(c.at("measured")),
                        number_from(c.at("limit")), c.at("detail")});
  for (const auto& [k, v] : j.at("constants").items()) r.constants.emplace_back(k, number_from(v));
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

json ExperimentParams::to_json() const {
  json norm_list = json::array();
  for (const auto& [pp, qq] : norms) norm_list.push_back({number(pp), number(qq)});
  json triples = json::array();
  for (const auto& t : smoothing_triples) triples.push_back({number(t[0]), number(t[1]), number(t[2])});
  return {{"flux", flux},
          {"dim", dim},
          {"amplitude", amplitude},
          {"mean", mean},
          {"scale", scale},
          {"angular_table", angular_table},
          {"points", points},
          {"half_width", half_width},
          {"scheme",
           {{"flux", fsl::to_string(scheme.flux)},
            {"cfl", scheme.cfl},
            {"viscosity", scheme.viscosity},
            {"frame", scheme.frame == Frame::physical ? "physical" : "similarity"},
            {"order", scheme.order},
            {"second_order", scheme.second_order}}},
          {"perturbation", perturbation},
          {"perturbation_amplitude", perturbation_amplitude},
          {"perturbation_width", perturbation_width},
          {"tail_exponent", tail_exponent},
          {"norms", norm_list},
          {"t_start", t_start},
          {"t_end", t_end},
          {"fit_t_min", fit_t_min},
          {"fit_t_max", fit_t_max},
          {"slope_tolerance", slope_tolerance},
          {"seed", seed},
          {"samples", samples},
          {"profile_tolerance", profile_tolerance},
          {"profile_s_max", profile_s_max},
          {"coarse_points", coarse_points},
          {"smoothing_triples", triples},
          {"tail_window", {tail_r1, tail_r2}},
          {"tail_tolerance", tail_tolerance},
          {"runtime_limit", runtime_limit}};
}

std::string ExperimentParams::digest() const { return sha256_hex(to_json().dump()); }

FluxFunction make_flux(const ExperimentParams& p) { return parse_flux(p.flux, p.dim); }

FarFieldProfile make_far_field(const ExperimentParams& p, double scale) {
  if (p.dim == 1) return FarFieldProfile::jump(p.amplitude, p.mean, scale);
  if (p.dim != 2) throw Error("dimension must be 1 or 2");
  std::vector<double> table = p.angular_table;
  if (table.empty()) {
    table.resize(64);
    for (std::size_t j = 0; j < table.size(); ++j)
      table[j] = p.mean + p.amplitude * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / 64.0);
  }
  return FarFieldProfile::angular(std::move(table), scale);
}

Grid make_grid(const ExperimentParams& p) { return Grid(p.dim, p.half_width, p.points); }

FittedExponent fit_log_slope(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi) {
  if (x.size() != y.size()) throw Error("fit needs matching series");
  std::vector<double> lx, ly;
  const double slack = 1e-9;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo * (1.0 - slack) || x[i] > hi * (1.0 + slack)) continue;
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error("log-log fit needs positive values in the window");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const std::size_t n = lx.size();
  if (n < 3) throw Error("log-log fit needs at least three points in the window");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  FittedExponent fit;
  fit.value = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = ly[i] - my - fit.value * (lx[i] - mx);
    ss += r * r;
  }
  double se = std::sqrt(ss / static_cast<double>(n - 2) / sxx);
  boost::math::students_t dist(static_cast<double>(n - 2));
  fit.confidence = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  fit.window_lo = lo;
  fit.window_hi = hi;
  return fit;
}

namespace {

struct ProfileSlot {
  std::once_flag once;
  std::unique_ptr<SelfSimilarProfile> profile;
};

std::string profile_key(const ExperimentParams& p, const Grid& grid) {
  json key = {{"flux", p.flux},
              {"far", make_far_field(p, 1.0).table()},
              {"amplitude", p.amplitude},
              {"mean", p.mean},
              {"dim", grid.dim()},
              {"points", grid.points()},
              {"half_width", grid.half_width()},
              {"cfl", p.scheme.cfl},
              {"viscosity", p.scheme.viscosity},
              {"order", p.scheme.order},
              {"scheme_flux", fsl::to_string(p.scheme.flux)},
              {"second_order", p.scheme.second_order},
              {"tolerance", p.profile_tolerance},
              {"s_max", p.profile_s_max}};
  return key.dump();
}

}  // namespace

const SelfSimilarProfile& cached_profile(const ExperimentParams& p) { return cached_profile(p, make_grid(p)); }

const SelfSimilarProfile& cached_profile(const ExperimentParams& p, const Grid& grid) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<ProfileSlot>> cache;
  std::shared_ptr<ProfileSlot> slot;
  {
    std::lock_guard lock(mutex);
    auto& entry = cache[profile_key(p, grid)];
    if (!entry) entry = std::make_shared<ProfileSlot>();
    slot = entry;
  }
  std::call_once(slot->once, [&] {
    ProfileOptions options;
    options.tolerance = p.profile_tolerance;
    options.s_max = p.profile_s_max;
    slot->profile = std::make_unique<SelfSimilarProfile>(
        compute_profile(make_far_field(p, 1.0), make_flux(p), p.scheme, grid, options));
  });
  return *slot->profile;
}

unsigned worker_count() {
  if (const char* env = std::getenv("FSL_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw Error("FSL_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {
thread_local bool inside_pool = false;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const unsigned workers = inside_pool ? 1u : static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex error_mutex;
  auto work = [&] {
    inside_pool = true;
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first) first = std::current_exception();
      }
    }
    inside_pool = false;
  };
  std::vector<std::jthread> threads;
  for (unsigned w = 1; w < workers; ++w) threads.emplace_back(work);
  work();
  threads.clear();
  if (first) std::rethrow_exception(first);
}

}  // namespace fsl
