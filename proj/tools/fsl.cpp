#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "fsl/config.hpp"
#include "fsl/snapshot.hpp"

namespace {

int cmd_run(const std::string& path, const std::string& output) {
  auto config = fsl::load_config(path);
  if (!output.empty()) config.output = output;
  auto outcome = fsl::execute(config);
  const auto& r = outcome.report;
  std::cout << (outcome.reused ? "reused " : "wrote ") << outcome.directory.string() << "\n";
  for (const auto& c : r.checks) {
    std::cout << (c.passed ? "  PASS " : "  FAIL ") << c.name << ": measured " << c.measured << ", limit "
              << c.limit;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
  }
  if (r.verdict == fsl::Verdict::inconclusive) std::cout << "  inconclusive: " << r.inconclusive_reason << "\n";
  std::cout << r.id << ": " << fsl::to_string(r.verdict) << " in " << std::setprecision(3) << r.runtime_seconds
            << " s\n";
  return fsl::exit_code(r.verdict);
}

int cmd_list() {
  for (const auto& info : fsl::experiment_registry())
    std::cout << std::left << std::setw(32) << info.id << info.reference << "\n";
  return 0;
}

int cmd_describe(const std::string& id) {
  const auto& info = fsl::find_experiment(id);
  std::cout << info.id << "\n"
            << "  summary:  " << info.summary << "\n"
            << "  tests:    " << info.reference << "\n"
            << "  estimate: " << info.estimate << "\n"
            << "  inputs:   " << info.inputs << "\n"
            << "  outputs:  " << info.outputs << "\n"
            << "  defaults: " << info.defaults.to_json().dump() << "\n";
  return 0;
}

int cmd_snapshot_info(const std::string& path) {
  auto info = fsl::read_snapshot_info(path);
  std::cout << "file:       " << path << "\n"
            << "size:       " << info.file_size << " bytes\n"
            << "dimension:  " << info.dim << "\n"
            << "points:     " << info.points << " per axis\n"
            << "half_width: " << info.half_width << "\n"
            << "time:       " << info.time << "\n";
  if (!info.background) {
    std::cout << "background: none\n";
  } else if (info.background->dim() == 1) {
    std::cout << "background: jump a=" << info.background->amplitude() << " mu=" << info.background->mean()
              << " tau=" << info.background->scale() << "\n";
  } else {
    std::cout << "background: angular table of " << info.background->table().size()
              << " values, tau=" << info.background->scale() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the critical fractional conservation law with shock-like data"};
  app.require_subcommand(1);
  std::string config_path, output, id, snapshot;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "config file (key = value with sections)")->required();
  run->add_option("-o,--output", output, "override the output directory");
  auto* list = app.add_subcommand("list", "list experiments with the result each one tests");
  auto* describe = app.add_subcommand("describe", "print inputs, outputs and the estimate tested");
  describe->add_option("id", id, "experiment id")->required();
  auto* info = app.add_subcommand("snapshot-info", "print the header of a snapshot file");
  info->add_option("file", snapshot, "snapshot file")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, output);
    if (*list) return cmd_list();
    if (*describe) return cmd_describe(id);
    if (*info) return cmd_snapshot_info(snapshot);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
