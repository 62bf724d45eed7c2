#include "fsl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "experiment_support.hpp"
#include "fsl/digest.hpp"
#include "fsl/snapshot.hpp"

namespace fsl {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

template <class Int>
std::string fmt_int(Int v) {
  return std::to_string(v);
}

struct Key {
  std::string section;
  std::string name;
  std::function<void(RunConfig&, const std::string&, const fs::path&)> set;
  std::function<std::string(const RunConfig&)> get;
};

double to_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(key + ": '" + text + "' is not a number");
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError(key + ": '" + text + "' is not a nonnegative integer");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": '" + text + "' is not a boolean");
}

std::vector<double> read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("h_table: cannot open '" + path.string() + "'");
  std::vector<double> out;
  std::string word;
  while (in >> word) out.push_back(to_double("h_table", word));
  if (out.empty()) throw ConfigError("h_table: '" + path.string() + "' holds no values");
  return out;
}

#define FSL_DOUBLE(sec, key, member)                                                                  \
  Key {                                                                                               \
    sec, key, [](RunConfig& c, const std::string& v, const fs::path&) { c.params.member = to_double(key, v); }, \
        [](const RunConfig& c) { return fmt(c.params.member); }                                       \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"run", "experiment", [](RunConfig& c, const std::string& v, const fs::path&) { c.experiment = trim(v); },
       [](const RunConfig& c) { return c.experiment; }},
      {"run", "seed",
       [](RunConfig& c, const std::string& v, const fs::path&) { c.params.seed = to_unsigned("seed", v); },
       [](const RunConfig& c) { return fmt_int(c.params.seed); }},
      {"run", "output",
       [](RunConfig& c, const std::string& v, const fs::path& base) {
         fs::path p = trim(v);
         c.output = fs::absolute(p.is_absolute() ? p : base / p).lexically_normal();
       },
       [](const RunConfig& c) { return c.output.string(); }},
      {"physics", "flux", [](RunConfig& c, const std::string& v, const fs::path&) { c.params.flux = trim(v); },
       [](const RunConfig& c) { return c.params.flux; }},
      {"physics", "n",
       [](RunConfig& c, const std::string& v, const fs::path&) {
         c.params.dim = static_cast<int>(to_unsigned("n", v));
       },
       [](const RunConfig& c) { return fmt_int(c.params.dim); }},
      FSL_DOUBLE("physics", "a", amplitude),
      FSL_DOUBLE("physics", "mu", mean),
      FSL_DOUBLE("physics", "tau", scale),
      {"physics", "h_table",
       [](RunConfig& c, const std::string& v, const fs::path& base) {
         fs::path p = trim(v);
         if (p.empty()) {
           c.h_table.clear();
           c.params.angular_table.clear();
           return;
         }
         p = p.is_absolute() ? p : base / p;
         if (!fs::exists(p)) throw ConfigError("h_table: '" + p.string() + "' does not exist");
         c.h_table = fs::absolute(p);
         c.params.angular_table = read_table(p);
       },
       [](const RunConfig& c) { return c.h_table.string(); }},
      {"perturbation", "perturbation",
       [](RunConfig& c, const std::string& v, const fs::path&) { c.params.perturbation = trim(v); },
       [](const RunConfig& c) { return c.params.perturbation; }},
      FSL_DOUBLE("perturbation", "perturbation_amplitude", perturbation_amplitude),
      FSL_DOUBLE("perturbation", "perturbation_width", perturbation_width),
      FSL_DOUBLE("perturbation", "tail_exponent", tail_exponent),
      {"grid", "N", [](RunConfig& c, const std::string& v, const fs::path&) { c.params.points = to_unsigned("N", v); },
       [](const RunConfig& c) { return fmt_int(c.params.points); }},
      FSL_DOUBLE("grid", "X", half_width),
      {"grid", "coarse_N",
       [](RunConfig& c, const std::string& v, const fs::path&) {
         c.params.coarse_points = to_unsigned("coarse_N", v);
       },
       [](const RunConfig& c) { return fmt_int(c.params.coarse()); }},
      {"scheme", "numerical_flux",
       [](RunConfig& c, const std::string& v, const fs::path&) {
         try {
           c.params.scheme.flux = parse_numerical_flux(trim(v));
         } catch (const Error& e) {
           throw ConfigError(std::string("numerical_flux: ") + e.what());
         }
       },
       [](const RunConfig& c) { return to_string(c.params.scheme.flux); }},
      FSL_DOUBLE("scheme", "CFL", scheme.cfl),
      FSL_DOUBLE("scheme", "eps", scheme.viscosity),
      FSL_DOUBLE("scheme", "order", scheme.order),
      {"scheme", "frame",
       [](RunConfig& c, const std::string& v, const fs::path&) {
         const std::string s = trim(v);
         if (s == "physical") c.params.scheme.frame = Frame::physical;
         else if (s == "similarity") c.params.scheme.frame = Frame::similarity;
         else throw ConfigError("frame: '" + s + "' is neither physical nor similarity");
       },
       [](const RunConfig& c) {
         return std::string(c.params.scheme.frame == Frame::physical ? "physical" : "similarity");
       }},
      {"scheme", "second_order",
       [](RunConfig& c, const std::string& v, const fs::path&) {
         c.params.scheme.second_order = to_bool("second_order", v);
       },
       [](const RunConfig& c) { return fmt(c.params.scheme.second_order); }},
      FSL_DOUBLE("time", "t_start", t_start),
      FSL_DOUBLE("time", "t_end", t_end),
      FSL_DOUBLE("time", "fit_t_min", fit_t_min),
      FSL_DOUBLE("time", "fit_t_max", fit_t_max),
      {"verifier", "norms",
       [](RunConfig& c, const std::string& v, const fs::path&) {
         c.params.norms.clear();
         for (const auto& item : split(v, ',')) {
           auto pq = split(item, ':');
           if (pq.size() != 2) throw ConfigError("norms: '" + item + "' is not p:q");
           c.params.norms.emplace_back(to_double("norms", pq[0]), to_double("norms", pq[1]));
         }
       },
       [](const RunConfig& c) {
         std::string s;
         for (const auto& [p, q] : c.params.norms) s += (s.empty() ? "" : ", ") + fmt(p) + ":" + fmt(q);
         return s;
       }},
      {"verifier", "smoothing_triples",
       [](RunConfig& c, const std::string& v, const fs::path&) {
         c.params.smoothing_triples.clear();
         for (const auto& item : split(v, ',')) {
           auto t = split(item, ':');
           if (t.size() != 3) throw ConfigError("smoothing_triples: '" + item + "' is not p:q1:q2");
           c.params.smoothing_triples.push_back({to_double("smoothing_triples", t[0]),
                                                 to_double("smoothing_triples", t[1]),
                                                 to_double("smoothing_triples", t[2])});
         }
       },
       [](const RunConfig& c) {
         std::string s;
         for (const auto& t : c.params.smoothing_triples)
           s += (s.empty() ? "" : ", ") + fmt(t[0]) + ":" + fmt(t[1]) + ":" + fmt(t[2]);
         return s;
       }},
      FSL_DOUBLE("verifier", "slope_tolerance", slope_tolerance),
      {"verifier", "samples",
       [](RunConfig& c, const std::string& v, const fs::path&) {
         c.params.samples = static_cast<int>(to_unsigned("samples", v));
       },
       [](const RunConfig& c) { return fmt_int(c.params.samples); }},
      FSL_DOUBLE("verifier", "profile_tolerance", profile_tolerance),
      FSL_DOUBLE("verifier", "profile_s_max", profile_s_max),
      FSL_DOUBLE("verifier", "tail_r1", tail_r1),
      FSL_DOUBLE("verifier", "tail_r2", tail_r2),
      FSL_DOUBLE("verifier", "tail_tolerance", tail_tolerance),
      FSL_DOUBLE("verifier", "runtime_limit", runtime_limit),
  };
  return table;
}

#undef FSL_DOUBLE

const Key* find_key(const std::string& name) {
  for (const auto& k : keys())
    if (k.name == name) return &k;
  return nullptr;
}

void check_range(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

void validate(const RunConfig& c) {
  const auto& p = c.params;
  try {
    p.scheme.validate();
  } catch (const CflError& e) {
    throw ConfigError(std::string("CFL: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(std::string("scheme: ") + e.what());
  }
  try {
    Grid(p.dim, p.half_width, p.points);
    Grid(p.dim, p.half_width, p.coarse());
  } catch (const Error& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  try {
    make_flux(p);
  } catch (const Error& e) {
    throw ConfigError(std::string("flux: ") + e.what());
  }
  check_range(p.scale >= 0.0, "tau", "must be nonnegative");
  check_range(p.t_start > 0.0, "t_start", "must be positive");
  check_range(p.t_end > 0.0, "t_end", "must be positive");
  check_range(p.fit_t_min > 0.0 && p.fit_t_max > p.fit_t_min, "fit_t_max", "needs 0 < fit_t_min < fit_t_max");
  check_range(p.perturbation_width > 0.0, "perturbation_width", "must be positive");
  check_range(p.tail_r1 > 0.0 && p.tail_r2 > p.tail_r1, "tail_r2", "needs 0 < tail_r1 < tail_r2");
  check_range(!p.norms.empty(), "norms", "needs at least one p:q pair");
  for (const auto& [pp, qq] : p.norms) check_range(pp >= 1.0 && qq >= pp, "norms", "needs 1 <= p <= q");
  for (const auto& t : p.smoothing_triples)
    check_range(t[0] >= 1.0 && t[1] >= 1.0 && t[2] >= t[1], "smoothing_triples", "needs p, q1 >= 1 and q1 <= q2");
  check_range(c.h_table.empty() || p.dim == 2, "h_table", "angular tables need n = 2");
  try {
    detail::perturbation_at(p, Point{0.0, 0.0});
  } catch (const Error& e) {
    throw ConfigError(std::string("perturbation: ") + e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  struct Entry {
    std::string key;
    std::string value;
  };
  std::vector<Entry> entries;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      entries.push_back({name, node.data()});
      continue;
    }
    bool known_section = false;
    for (const auto& k : keys()) known_section = known_section || k.section == name;
    if (!known_section) throw ConfigError("unknown section '" + name + "'");
    for (const auto& [key, leaf] : node) {
      const Key* k = find_key(key);
      if (!k) throw ConfigError("unknown key '" + key + "'");
      if (k->section != name) throw ConfigError("key '" + key + "' belongs to section [" + k->section + "]");
      entries.push_back({key, leaf.data()});
    }
  }

  std::string experiment;
  for (const auto& e : entries) {
    if (!find_key(e.key)) throw ConfigError("unknown key '" + e.key + "'");
    if (e.key == "experiment") experiment = trim(e.value);
  }
  if (experiment.empty()) throw ConfigError("missing key 'experiment'");
  RunConfig c;
  try {
    const auto& info = find_experiment(experiment);
    c.experiment = info.id;
    c.params = info.defaults;
    c.output = fs::absolute(base_dir / c.output).lexically_normal();
  } catch (const Error& e) {
    throw ConfigError(std::string("experiment: ") + e.what());
  }
  for (const auto& e : entries) {
    if (e.key == "experiment") continue;
    find_key(e.key)->set(c, e.value, base_dir);
  }
  c.params.coarse_points = c.params.coarse();
  validate(c);
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

std::string resolved_config(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      out << (section.empty() ? "" : "\n") << "[" << k.section << "]\n";
      section = k.section;
    }
    out << k.name << " = " << k.get(config) << "\n";
  }
  return out.str();
}

int exit_code(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass:
      return 0;
    case Verdict::inconclusive:
      return 2;
    case Verdict::fail:
      return 1;
  }
  return 1;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string slug(const std::string& name) {
  std::string s;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch))) s += static_cast<char>(std::tolower(ch));
    else if (!s.empty() && s.back() != '_') s += '_';
  }
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s.empty() ? "series" : s;
}

std::string checks_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "check,passed,measured,limit,detail\n";
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  for (const auto& c : r.checks)
    out << quote(c.name) << "," << (c.passed ? 1 : 0) << "," << fmt(c.measured) << "," << fmt(c.limit) << ","
        << quote(c.detail) << "\n";
  return out.str();
}

/// Experiment-family summary: one line per run directory.
void append_summary(const fs::path& output, const ExperimentReport& r, const fs::path& dir) {
  const fs::path path = output / (r.id + "-summary.csv");
  const bool fresh = !fs::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot append to " + path.string());
  if (fresh) out << "directory,inputs_digest,verdict,checks,failed,runtime_seconds\n";
  std::size_t failed = 0;
  for (const auto& c : r.checks) failed += c.passed ? 0 : 1;
  out << dir.filename().string() << "," << r.inputs_digest << "," << to_string(r.verdict) << "," << r.checks.size()
      << "," << failed << "," << fmt(r.runtime_seconds) << "\n";
}

}  // namespace

RunOutcome execute(const RunConfig& config) {
  const std::string resolved = resolved_config(config);
  RunConfig anonymous = config;
  anonymous.output.clear();
  anonymous.h_table.clear();
  const std::string key = resolved_config(anonymous) + config.params.digest();
  const fs::path dir = config.output / (config.experiment + "-" + sha256_hex(key).substr(0, 12));
  if (fs::exists(dir / "report.json")) {
    std::ifstream in(dir / "report.json");
    return {dir, ExperimentReport::from_json(nlohmann::json::parse(in)), true};
  }
  if (fs::exists(dir)) throw Error("run directory " + dir.string() + " exists without a report; remove it first");

  ExperimentReport report = run_experiment(config.experiment, config.params);

  fs::create_directories(config.output);
  const fs::path staging = config.output / (dir.filename().string() + ".partial");
  fs::remove_all(staging);
  fs::create_directories(staging / "snapshots");
  fs::create_directories(staging / "plot-data");
  write_text(staging / "resolved-config.ini", resolved);
  write_text(staging / "report.json", report.to_json().dump(2) + "\n");
  write_text(staging / "diagnostics.csv", checks_csv(report));
  if (!report.diagnostics_csv.empty()) write_text(staging / "steps.csv", report.diagnostics_csv);
  for (const auto& [name, field] : report.snapshots) write_snapshot(field, (staging / "snapshots" / (name + ".fsl")).string());
  std::map<std::string, int> used;
  for (const auto& s : report.series) {
    std::string base = slug(s.name);
    if (used[base]++) base += "_" + std::to_string(used[base]);
    std::ostringstream out;
    out << "# " << s.name << "\n# " << s.x_label << "\t" << s.y_label << "\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) out << fmt(s.x[i]) << "\t" << fmt(s.y[i]) << "\n";
    write_text(staging / "plot-data" / (base + ".dat"), out.str());
  }
  for (const auto& [name, text] : report.files) write_text(staging / name, text);
  fs::rename(staging, dir);
  append_summary(config.output, report, dir);
  return {dir, std::move(report), false};
}

}  // namespace fsl
