#include "drcp/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kValidation = 2;
constexpr int kIterationCap = 3;

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void print_summary(const drcp::ExecutionResult& res, bool quiet) {
  print_warnings(res.warnings);
  if (quiet) return;
  if (res.report) {
    const auto& rep = *res.report;
    std::cout << "terminated after " << rep.iterations << " iterations (solvability "
              << rep.cut_counts.solvability << ", feasibility " << rep.cut_counts.feasibility << ", optimality "
              << rep.cut_counts.optimality << "), " << rep.total_slots << " DPG slots, " << rep.wall_seconds
              << " s\n";
    for (std::size_t i = 0; i < rep.final_candidates.size(); ++i) {
      std::cout << "  z_" << i + 1 << " = " << rep.final_candidates[i].transpose()
                << "  g_max = " << rep.final_residuals[i] << '\n';
    }
  }
  if (res.outcome) {
    const auto& out = *res.outcome;
    std::cout << "dpg " << (out.solved() ? "solved" : "unsolvable") << " (" << drcp::to_string(out.reason)
              << ") after " << out.slots_used << " slots\n";
  }
  for (const auto& f : res.files) std::cout << "  wrote " << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed cutting-surface consensus simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir;
  bool quiet = false;
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  app.add_flag("--quiet", quiet, "Only print warnings and errors");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run a JSON config");
  run_cmd->add_option("config", config_path, "Config file")->required();

  std::string preset;
  std::string preset_base;
  auto* preset_cmd = app.add_subcommand("preset", "Run a built-in experiment");
  preset_cmd->add_option("name", preset, "Preset name")->required()->check(CLI::IsMember(drcp::preset_names()));
  preset_cmd->add_option("--config", preset_base, "Config whose fields seed the preset");

  auto* validate_cmd = app.add_subcommand("validate", "Check a JSON config");
  validate_cmd->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  try {
    if (*validate_cmd) {
      const drcp::RunConfig cfg = drcp::load_config(config_path);
      print_warnings(drcp::validate_config(cfg));
      if (!quiet) std::cout << "ok\n";
      return kOk;
    }
    if (*run_cmd) {
      const drcp::RunConfig cfg = drcp::load_config(config_path);
      const auto res = drcp::execute(cfg, out_dir.empty() ? cfg.output_dir : out_dir, quiet);
      print_summary(res, quiet);
      return kOk;
    }
    drcp::RunConfig base;
    if (!preset_base.empty()) base = drcp::load_config(preset_base);
    const auto results = drcp::execute_preset(preset, base, out_dir.empty() ? base.output_dir + "/" + preset : out_dir, quiet);
    for (const auto& r : results) print_summary(r, quiet);
    return kOk;
  } catch (const drcp::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const drcp::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const drcp::IterationCapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIterationCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
