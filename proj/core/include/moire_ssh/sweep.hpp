#pragma once

// Parameter sweeps: JSON configuration, parallel grid execution with a
// resumable journal, and deterministic CSV / JSON output.
//
// Config schema: docs/config.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "moire_ssh/model.hpp"

namespace moire_ssh {

enum class Task { PhaseDiagram, Cut, Boundary, ScalingStudy, Entanglement, Spectrum };
enum class OutputFormat { Csv, Json };

const char* to_string(Task t) noexcept;
std::optional<Task> parse_task(std::string_view name);

struct AxisRange {
  double min;
  double max;
  int steps;

  double at(int i) const { return steps == 1 ? min : min + (max - min) * i / (steps - 1); }
};

/// One coupling: fixed value or swept range.
struct ParamSpec {
  double value = 0.0;
  std::optional<AxisRange> range;
};

struct Axis {
  std::string name;  // "epsilon", "j2" or "m_o"
  AxisRange range;
};

struct ModelGrid {
  ParamSpec epsilon;
  ParamSpec j2;
  ParamSpec m_o;
  int a1 = 3;
  int a2 = 7;
  int supercells = 32;

  /// Swept axes in canonical order epsilon, j2, m_o.
  std::vector<Axis> swept_axes() const;
  /// Parameters with the named axes set to the given values.
  ModelParams at(const std::vector<Axis>& axes, const std::vector<double>& values) const;
  ModelParams fixed() const;
};

struct Observables {
  bool nu_real = true;
  bool nu_k = true;
  bool gaps = true;
  bool entropy = true;
};

struct NumericOptions {
  int n_k = 0;  // 0 = 64 a12
  double zero_tol = 1e-6;
  double midgap_tol = 1e-3;
  double derivative_step = 1e-3;
  double boundary_tol = 1e-4;
  double scan_step = 0.01;
  std::vector<int> sizes{8, 16, 32, 64};
  std::vector<int> entropy_sizes{16, 32, 64, 128};
  int profile_supercells = 128;
  Boundary boundary = Boundary::Open;  // spectrum task
  std::optional<int> bipartition;      // entanglement task; default L/2
  bool overlay = false;                // phase-diagram boundary overlay
  Observables observables;
};

struct ScalingOptions {
  std::vector<double> transitions;  // approximate m_oc values to keep; empty = all
  bool self_test = false;
};

struct SweepConfig {
  Task task = Task::Cut;
  ModelGrid model;
  NumericOptions numeric;
  ScalingOptions scaling;
  std::string prefix = "out";
  OutputFormat format = OutputFormat::Csv;
  int workers = 0;
};

struct ConfigIssue {
  enum class Kind { Schema, Range };
  Kind kind;
  std::string path;
  std::string message;
};

/// Every violation found in a configuration, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Parses and validates a JSON configuration. Throws ConfigError.
SweepConfig parse_config(std::string_view text);

/// Canonical one-line JSON of the result-determining part of a config
/// (excludes worker count and output location).
std::string canonical_config(const SweepConfig& config);

/// Formatting used in every output file: 17 significant digits, '.'
/// decimal point, nan / inf spelled out.
std::string format_double(double x);

struct RunOptions {
  int workers = 0;
  bool keep_journal = false;
};

struct RunSummary {
  std::vector<std::filesystem::path> files;
  std::size_t cells = 0;
  std::size_t failed_cells = 0;  // cells with an error status
  std::size_t reused_cells = 0;  // cells restored from a journal
  bool partial() const noexcept { return failed_cells > 0; }
};

/// Runs `config.task` and writes its output file(s) under config.prefix.
RunSummary run_sweep(const SweepConfig& config, const RunOptions& options);

RunSummary run_cut(const SweepConfig& config, const RunOptions& options);
RunSummary run_phase_diagram(const SweepConfig& config, const RunOptions& options);
RunSummary run_boundary(const SweepConfig& config, const RunOptions& options);
RunSummary run_scaling_study(const SweepConfig& config, const RunOptions& options);
RunSummary run_entanglement(const SweepConfig& config, const RunOptions& options);
RunSummary run_spectrum(const SweepConfig& config, const RunOptions& options);

/// Per-cell observables of cut and phase-diagram sweeps. NaN marks a value
/// that was not requested or could not be computed; `status` is "ok",
/// "near-boundary", or '|'-joined error codes.
struct CellRecord {
  double nu_real;
  double nu_k;
  double delta_e1;
  double delta_e2;
  double entropy_half;
  int midgap_count;  // -1 when entropy was not computed
  std::string status;
};

CellRecord evaluate_cell(const ModelParams& params, const NumericOptions& numeric);

}  // namespace moire_ssh
