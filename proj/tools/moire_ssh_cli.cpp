// moire-ssh: runs sweep configurations from the command line.
//
//   moire-ssh cut --config configs/fig2c_w0_cut.json --out results/fig2c
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error,
// 3 finished with errored cells.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "moire_ssh/sweep.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct Args {
  std::string config;
  std::string out;
  std::string format;
  int workers = -1;
  bool keep_journal = false;
};

int run(moire_ssh::Task task, const Args& args) {
  using namespace moire_ssh;
  std::ifstream in(args.config, std::ios::binary);
  if (!in) {
    std::cerr << "moire-ssh: cannot read " << args.config << "\n";
    return kExitConfig;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  SweepConfig cfg;
  try {
    // The subcommand fills in a missing task; a conflicting one is an error.
    auto doc = nlohmann::json::parse(buf.str(), nullptr, false);
    if (doc.is_object() && !doc.contains("task")) doc["task"] = to_string(task);
    cfg = parse_config(doc.is_discarded() ? buf.str() : doc.dump());
  } catch (const ConfigError& e) {
    std::cerr << "moire-ssh: " << e.what() << "\n";
    return kExitConfig;
  }
  if (cfg.task != task) {
    std::cerr << "moire-ssh: config task '" << to_string(cfg.task) << "' does not match subcommand '"
              << to_string(task) << "'\n";
    return kExitConfig;
  }
  if (!args.out.empty()) cfg.prefix = args.out;
  if (args.format == "csv") cfg.format = OutputFormat::Csv;
  if (args.format == "json") cfg.format = OutputFormat::Json;

  RunOptions opts;
  opts.keep_journal = args.keep_journal;
  opts.workers = cfg.workers;
  if (const char* env = std::getenv("MOIRE_SSH_WORKERS"); env && *env) {
    char* end = nullptr;
    const long w = std::strtol(env, &end, 10);
    if (*end != '\0' || w < 0) {
      std::cerr << "moire-ssh: MOIRE_SSH_WORKERS must be a non-negative integer\n";
      return kExitConfig;
    }
    opts.workers = static_cast<int>(w);
  }
  if (args.workers >= 0) opts.workers = args.workers;

  try {
    const auto summary = run_sweep(cfg, opts);
    for (const auto& f : summary.files) std::cout << f.string() << "\n";
    if (summary.reused_cells > 0) {
      std::cerr << "moire-ssh: reused " << summary.reused_cells << " cells from the journal\n";
    }
    if (summary.partial()) {
      std::cerr << "moire-ssh: " << summary.failed_cells << " of " << summary.cells << " cells failed\n";
      return kExitPartial;
    }
  } catch (const std::exception& e) {
    std::cerr << "moire-ssh: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moire-modulated SSH chain: phase diagrams, scaling and entanglement"};
  app.require_subcommand(1);
  Args args;
  moire_ssh::Task chosen = moire_ssh::Task::Cut;

  const std::pair<moire_ssh::Task, const char*> commands[] = {
      {moire_ssh::Task::Cut, "one-parameter cut of winding numbers, gaps and entropy"},
      {moire_ssh::Task::PhaseDiagram, "two-parameter phase diagram"},
      {moire_ssh::Task::Boundary, "phase boundaries along m_o"},
      {moire_ssh::Task::ScalingStudy, "finite-size scaling report"},
      {moire_ssh::Task::Entanglement, "entanglement spectrum and entropy profile"},
      {moire_ssh::Task::Spectrum, "energy spectrum and zero-mode densities"},
  };
  for (const auto& [task, help] : commands) {
    auto* sub = app.add_subcommand(moire_ssh::to_string(task), help);
    sub->add_option("--config", args.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output path prefix (overrides the config)");
    sub->add_option("--workers", args.workers, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    sub->add_option("--format", args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--keep-journal", args.keep_journal, "keep the progress journal after success");
    sub->callback([&chosen, t = task] { chosen = t; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  return run(chosen, args);
}
