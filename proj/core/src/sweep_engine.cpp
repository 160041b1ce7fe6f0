#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "moire_ssh/eigen_lapack.hpp"
#include "moire_ssh/entanglement.hpp"
#include "moire_ssh/errors.hpp"
#include "moire_ssh/parallel.hpp"
#include "moire_ssh/scaling.hpp"
#include "moire_ssh/spectral.hpp"
#include "moire_ssh/sweep.hpp"
#include "moire_ssh/topology.hpp"
#include "sweep_io.hpp"

// Present when linked against OpenBLAS; cells already run in parallel, so
// nested BLAS threads only oversubscribe.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace moire_ssh {

using detail::Table;
using detail::TableCell;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Bisection width for transition points fed to the scaling pipelines.

void limit_blas_threads() {
  if (openblas_set_num_threads) openblas_set_num_threads(1);
}

bool is_failure(const std::string& status) { return status != "ok" && status != "near-boundary"; }

void add_status(std::string& status, const std::string& code) {
  if (status == "ok") {
    status = code;
  } else if (status.find(code) == std::string::npos) {
    status += "|" + code;
  }
}

std::string error_code(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return err->code();
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid-argument";
  return "error";
}

// Row-major grid over the swept axes, first axis outermost.
struct Grid {
  std::vector<Axis> axes;
  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= static_cast<std::size_t>(a.range.steps);
    return n;
  }
  std::vector<double> values(std::size_t index) const {
    std::vector<double> out(axes.size());
    for (std::size_t d = axes.size(); d-- > 0;) {
      const auto steps = static_cast<std::size_t>(axes[d].range.steps);
      out[d] = axes[d].range.at(static_cast<int>(index % steps));
      index /= steps;
    }
    return out;
  }
};

std::string stem(const SweepConfig& cfg, const char* suffix = "") { return cfg.prefix + suffix; }

// ---- journal ---------------------------------------------------------------

std::string record_line(std::size_t index, const CellRecord& r) {
  std::string line = std::to_string(index);
  for (const double x : {r.nu_real, r.nu_k, r.delta_e1, r.delta_e2, r.entropy_half}) {
    line += '\t';
    line += format_double(x);
  }
  line += '\t' + std::to_string(r.midgap_count) + '\t' + r.status + '\n';
  return line;
}

std::optional<std::pair<std::size_t, CellRecord>> parse_record(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  for (std::string tok; std::getline(ss, tok, '\t');) f.push_back(tok);
  if (f.size() != 8) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto index = std::stoull(f[0], &used);
    if (used != f[0].size()) return std::nullopt;
    double v[5];
    for (int i = 0; i < 5; ++i) {
      char* end = nullptr;
      v[i] = std::strtod(f[1 + i].c_str(), &end);
      if (end == f[1 + i].c_str() || *end != '\0') return std::nullopt;
    }
    const int midgap = std::stoi(f[6]);
    if (f[7].empty()) return std::nullopt;
    return std::pair{static_cast<std::size_t>(index), CellRecord{v[0], v[1], v[2], v[3], v[4], midgap, f[7]}};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Append-only log of finished cells keyed by a hash of the configuration.
// Lines without a trailing newline (torn writes) are ignored on reload.
class Journal {
 public:
  Journal(std::filesystem::path path, const std::string& config_json)
      : path_(std::move(path)), header_("# moire-ssh journal " + hash_hex(config_json)) {}

  std::map<std::size_t, CellRecord> load(std::size_t cells) const {
    std::map<std::size_t, CellRecord> out;
    std::ifstream in(path_, std::ios::binary);
    if (!in) return out;
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = text.find('\n');
    if (pos == std::string::npos || text.substr(0, pos) != header_) return out;
    ++pos;
    while (pos < text.size()) {
      const auto end = text.find('\n', pos);
      if (end == std::string::npos) break;
      if (auto rec = parse_record(text.substr(pos, end - pos)); rec && rec->first < cells) {
        out.insert_or_assign(rec->first, rec->second);
      }
      pos = end + 1;
    }
    return out;
  }

  // Rewrites the journal with the header and already-known records so a
  // stale or torn file never leaks into the new run.
  void open(const std::map<std::size_t, CellRecord>& known) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open journal " + path_.string());
    out_ << header_ << '\n';
    for (const auto& [i, r] : known) out_ << record_line(i, r);
    out_.flush();
  }

  void append(std::size_t index, const CellRecord& r) {
    const auto line = record_line(index, r);
    std::lock_guard lock(mutex_);
    out_ << line;
    out_.flush();
  }

  void finish(bool keep) {
    out_.close();
    if (!keep) std::filesystem::remove(path_);
  }

 private:
  static std::string hash_hex(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::fnv1a(text)));
    return buf;
  }

  std::filesystem::path path_;
  std::string header_;
  std::ofstream out_;
  std::mutex mutex_;
};

// ---- grid sweeps -----------------------------------------------------------

std::vector<CellRecord> evaluate_grid(const SweepConfig& cfg, const Grid& grid, const RunOptions& options,
                                      RunSummary& summary) {
  const auto cells = grid.size();
  const auto config_json = canonical_config(cfg);
  Journal journal(stem(cfg, ".journal"), config_json);
  auto known = journal.load(cells);
  journal.open(known);

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells; ++i) {
    if (!known.contains(i)) pending.push_back(i);
  }
  const auto fresh = parallel_map(pending.size(), options.workers, [&](std::size_t k) {
    const auto index = pending[k];
    auto rec = evaluate_cell(cfg.model.at(grid.axes, grid.values(index)), cfg.numeric);
    journal.append(index, rec);
    return rec;
  });

  std::vector<CellRecord> out(cells);
  for (const auto& [i, r] : known) out[i] = r;
  for (std::size_t k = 0; k < pending.size(); ++k) out[pending[k]] = fresh[k];
  journal.finish(options.keep_journal);

  summary.cells += cells;
  summary.reused_cells += known.size();
  for (const auto& r : out) summary.failed_cells += is_failure(r.status) ? 1 : 0;
  return out;
}

Table grid_table(const Grid& grid, const std::vector<CellRecord>& records) {
  Table t;
  for (const auto& a : grid.axes) t.columns.push_back(a.name);
  for (const char* c : {"nu_real", "nu_k", "delta_e1", "delta_e2", "entropy_half", "midgap_count", "status"}) {
    t.columns.emplace_back(c);
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::vector<TableCell> row;
    for (const double x : grid.values(i)) row.push_back(TableCell::num(x));
    const auto& r = records[i];
    for (const double x : {r.nu_real, r.nu_k, r.delta_e1, r.delta_e2, r.entropy_half}) {
      row.push_back(TableCell::num(x));
    }
    row.push_back(r.midgap_count >= 0 ? TableCell::integral(r.midgap_count) : TableCell::num(kNaN));
    row.push_back(TableCell::str(r.status));
    t.rows.push_back(std::move(row));
  }
  return t;
}

NumericBoundaryOptions boundary_options(const NumericOptions& n) { return {n.boundary_tol, n.scan_step, n.n_k}; }

// Transition rows along m_o for each value of the other axis (or the fixed
// point when there is none).
Table boundary_table(const SweepConfig& cfg, double tol, const RunOptions& options, RunSummary& summary) {
  const auto& m = cfg.model;
  const auto m_range = *m.m_o.range;
  std::optional<Axis> other;
  for (const auto& a : m.swept_axes()) {
    if (a.name != "m_o") other = a;
  }
  const std::string param = other ? other->name : "j2";
  const int count = other ? other->range.steps : 1;
  auto opts = boundary_options(cfg.numeric);
  opts.tol = tol;

  struct Outcome {
    double param;
    std::vector<BoundaryPoint> points;
    std::string status;
  };
  const auto outcomes = parallel_map(static_cast<std::size_t>(count), options.workers, [&](std::size_t i) {
    double eps = m.epsilon.value;
    double j2 = m.j2.value;
    double value = j2;
    if (other) {
      value = other->range.at(static_cast<int>(i));
      (other->name == "epsilon" ? eps : j2) = value;
    }
    Outcome o{value, {}, "ok"};
    try {
      o.points = numeric_boundary(eps, j2, m.a1, m.a2, {m_range.min, m_range.max}, opts);
    } catch (const std::exception& e) {
      o.status = error_code(e);
    }
    return o;
  });

  Table t;
  t.columns = {param, "m_o_critical", "nu_before", "nu_after", "status"};
  for (const auto& o : outcomes) {
    ++summary.cells;
    if (o.status != "ok") {
      ++summary.failed_cells;
      t.rows.push_back({TableCell::num(o.param), TableCell::num(kNaN), TableCell::num(kNaN), TableCell::num(kNaN),
                        TableCell::str(o.status)});
      continue;
    }
    for (const auto& p : o.points) {
      t.rows.push_back({TableCell::num(o.param), TableCell::num(p.m_o_critical), TableCell::integral(p.nu_before),
                        TableCell::integral(p.nu_after), TableCell::str("ok")});
    }
  }
  return t;
}

// ---- scaling ---------------------------------------------------------------

json points_json(const std::vector<ScalePoint>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back({p.x, p.y});
  return out;
}

json fit_json(const ScalingFit& fit, double value, double err, const std::vector<ScalePoint>& raw) {
  return {{"value", value},
          {"stderr", err},
          {"r_squared", fit.r_squared},
          {"slope", fit.slope},
          {"intercept", fit.intercept},
          {"raw", points_json(raw)},
          {"fitted", points_json(fit.points)}};
}

json exponent_json(const ScalingFit& fit, const std::vector<ScalePoint>& raw) {
  return fit_json(fit, exponent(fit), fit.stderr_slope, raw);
}

json charge_json(const ScalingFit& fit, const std::vector<ScalePoint>& raw) {
  return fit_json(fit, central_charge(fit), central_charge_stderr(fit), raw);
}

template <typename Fn>
void run_part(json& report, const char* name, bool& failed, Fn&& fn) {
  try {
    report[name] = fn();
  } catch (const std::exception& e) {
    report[name] = {{"error", error_code(e)}, {"message", e.what()}};
    failed = true;
  }
}

json self_test_report() {
  // Closed-form inputs: delta = 0.37 L^-1, Delta E2 = 2.5 L^-1, and CFT
  // entropies with c = 2.
  constexpr double c = 2.0;
  constexpr double c1 = 0.4;
  const std::vector<double> sizes{168, 336, 672, 1344};
  std::vector<ScalePoint> delta, gap, s_big_l, s_small_l;
  for (const double l : sizes) {
    delta.push_back({l, 0.37 / l});
    gap.push_back({l, 2.5 / l});
    s_big_l.push_back({l, c / 3.0 * std::log(l / std::numbers::pi) + c1});
  }
  constexpr int cells = 2688;
  for (int l = 336; l <= cells / 2; l += 168) {
    const double chord = cells / std::numbers::pi * std::sin(std::numbers::pi * l / cells);
    s_small_l.push_back({static_cast<double>(l), c / 3.0 * std::log(chord) + c1});
  }
  json t = {{"label", "synthetic"}};
  t["mu"] = exponent_json(power_law_exponent(delta), delta);
  t["z"] = exponent_json(gap_exponent(gap), gap);
  t["c_vs_L"] = charge_json(central_charge_vs_L(s_big_l), s_big_l);
  t["c_vs_l"] = charge_json(central_charge_vs_l(s_small_l, cells), s_small_l);
  return t;
}

}  // namespace

// ---- cells -------------------------------------------------------------------

CellRecord evaluate_cell(const ModelParams& params, const NumericOptions& numeric) {
  CellRecord r{kNaN, kNaN, kNaN, kNaN, kNaN, -1, "ok"};
  const auto& obs = numeric.observables;
  const int cells = params.cells();

  auto real_winding = [&]() {
    try {
      const auto h = build_hamiltonian(params, Boundary::Open);
      const auto lower = lapack::chiral_lowest(lapack::chiral_block(h.matrix));
      if (obs.gaps) {
        // Chiral partners: E_{L+1} = -E_L, E_{L+2} = -E_{L-1}.
        const double e_l = lower.values(cells - 1);
        const double e_lm1 = lower.values(cells - 2);
        r.delta_e1 = -2.0 * e_l;
        r.delta_e2 = -e_lm1 - e_l;
      }
      r.nu_real = real_space_winding_lowest(lower.values, lower.vectors).value;
    } catch (const std::exception& e) {
      add_status(r.status, error_code(e));
    }
  };
  if (obs.nu_real || obs.gaps) real_winding();

  if (obs.nu_k) {
    try {
      const int n_k = numeric.n_k > 0 ? numeric.n_k : default_k_points(params);
      if (const auto nu = momentum_winding_or_closure(params, n_k)) {
        r.nu_k = *nu;
      } else {
        add_status(r.status, "near-boundary");
        if (std::isnan(r.nu_real)) real_winding();
        r.nu_k = r.nu_real;
      }
    } catch (const std::exception& e) {
      add_status(r.status, error_code(e));
    }
  }
  if (!obs.nu_real) r.nu_real = kNaN;
  if (!obs.gaps) r.delta_e1 = r.delta_e2 = kNaN;

  if (obs.entropy) {
    try {
      const auto es = entanglement_spectrum(ground_state_correlation(params, Boundary::Periodic), cells / 2);
      r.entropy_half = es.entropy;
      r.midgap_count = midgap_degeneracy(es.zetas, numeric.midgap_tol);
    } catch (const std::exception& e) {
      add_status(r.status, error_code(e));
    }
  }
  return r;
}

// ---- runners -----------------------------------------------------------------

RunSummary run_cut(const SweepConfig& cfg, const RunOptions& options) {
  limit_blas_threads();
  RunSummary summary;
  const Grid grid{cfg.model.swept_axes()};
  if (grid.axes.size() != 1) throw std::invalid_argument("run_cut: needs exactly one swept axis");
  const auto records = evaluate_grid(cfg, grid, options, summary);
  summary.files.push_back(detail::write_table(stem(cfg), cfg.format, canonical_config(cfg), grid_table(grid, records)));
  return summary;
}

RunSummary run_phase_diagram(const SweepConfig& cfg, const RunOptions& options) {
  limit_blas_threads();
  RunSummary summary;
  const Grid grid{cfg.model.swept_axes()};
  if (grid.axes.size() != 2) throw std::invalid_argument("run_phase_diagram: needs two swept axes");
  const auto records = evaluate_grid(cfg, grid, options, summary);
  const auto config_json = canonical_config(cfg);
  summary.files.push_back(detail::write_table(stem(cfg), cfg.format, config_json, grid_table(grid, records)));
  if (cfg.numeric.overlay) {
    const auto table = boundary_table(cfg, cfg.numeric.boundary_tol, options, summary);
    summary.files.push_back(detail::write_table(stem(cfg, "_boundary"), cfg.format, config_json, table));
  }
  return summary;
}

RunSummary run_boundary(const SweepConfig& cfg, const RunOptions& options) {
  limit_blas_threads();
  RunSummary summary;
  if (!cfg.model.m_o.range) throw std::invalid_argument("run_boundary: needs an m_o range");
  const auto table = boundary_table(cfg, cfg.numeric.boundary_tol, options, summary);
  summary.files.push_back(detail::write_table(stem(cfg), cfg.format, canonical_config(cfg), table));
  return summary;
}

RunSummary run_scaling_study(const SweepConfig& cfg, const RunOptions& options) {
  limit_blas_threads();
  RunSummary summary;
  const auto& m = cfg.model;
  const auto& n = cfg.numeric;
  json report = {{"config", json::parse(canonical_config(cfg))}, {"transitions", json::array()}};

  if (cfg.scaling.self_test) {
    report["transitions"].push_back(self_test_report());
    ++summary.cells;
  } else {
    if (!m.m_o.range) throw std::invalid_argument("run_scaling_study: needs an m_o range");
    const auto found =
        critical_points(m.epsilon.value, m.j2.value, m.a1, m.a2, {m.m_o.range->min, m.m_o.range->max}, n.n_k,
                        n.scan_step);
    std::vector<BoundaryPoint> chosen;
    if (cfg.scaling.transitions.empty()) {
      chosen = found;
    } else {
      for (const double target : cfg.scaling.transitions) {
        const auto it = std::min_element(found.begin(), found.end(), [&](const auto& a, const auto& b) {
          return std::abs(a.m_o_critical - target) < std::abs(b.m_o_critical - target);
        });
        if (it == found.end()) {
          report["transitions"].push_back({{"requested", target}, {"error", "no-transition"}});
          ++summary.cells;
          ++summary.failed_cells;
        } else {
          chosen.push_back(*it);
        }
      }
    }

    const ModelParams tmpl = m.fixed();
    const int workers = resolve_workers(options.workers);
    for (const auto& bp : chosen) {
      const double m_oc = bp.m_o_critical;
      json t = {{"m_oc", m_oc}, {"nu_before", bp.nu_before}, {"nu_after", bp.nu_after}};
      bool failed = false;
      run_part(t, "mu", failed, [&] {
        const auto raw = pseudo_critical_offsets(tmpl, m_oc, n.sizes, {.workers = workers});
        return exponent_json(power_law_exponent(raw), raw);
      });
      run_part(t, "z", failed, [&] {
        const auto raw = critical_gaps(tmpl, m_oc, n.sizes, workers);
        return exponent_json(gap_exponent(raw), raw);
      });
      run_part(t, "c_vs_L", failed, [&] {
        const auto raw = half_chain_entropies(tmpl, m_oc, n.entropy_sizes, workers);
        return charge_json(central_charge_vs_L(raw), raw);
      });
      run_part(t, "c_vs_l", failed, [&] {
        const auto p = tmpl.with_supercells(n.profile_supercells).with_m_o(m_oc);
        const auto raw = entropy_vs_bipartition(p, default_bipartitions(p));
        return charge_json(central_charge_vs_l(raw, p.cells()), raw);
      });
      report["transitions"].push_back(std::move(t));
      ++summary.cells;
      summary.failed_cells += failed ? 1 : 0;
    }
  }

  const std::filesystem::path path = stem(cfg, ".json");
  detail::write_file_atomic(path, detail::dump_json(report) + "\n");
  summary.files.push_back(path);
  return summary;
}

RunSummary run_entanglement(const SweepConfig& cfg, const RunOptions& options) {
  limit_blas_threads();
  RunSummary summary;
  const ModelParams p = cfg.model.fixed();
  const int cells = p.cells();
  const int l_cut = cfg.numeric.bipartition.value_or(cells / 2);
  if (l_cut < 1 || l_cut >= cells) throw std::invalid_argument("run_entanglement: bipartition outside [1, L)");

  const auto c = ground_state_correlation(p, Boundary::Periodic);
  const auto es = entanglement_spectrum(c, l_cut);

  const auto entropies = parallel_map(static_cast<std::size_t>(cells - 1), options.workers, [&](std::size_t i) {
    return block_entropy(c, static_cast<int>(i) + 1);
  });
  Table profile;
  profile.columns = {"l", "entropy"};
  for (int l = 1; l < cells; ++l) {
    profile.rows.push_back({TableCell::integral(l), TableCell::num(entropies[static_cast<std::size_t>(l - 1)])});
  }

  Table spectrum;
  spectrum.columns = {"index", "zeta", "xi", "midgap"};
  for (std::size_t i = 0; i < es.zetas.size(); ++i) {
    const double z = es.zetas[i];
    spectrum.rows.push_back({TableCell::integral(static_cast<long long>(i)), TableCell::num(z),
                             TableCell::num(entanglement_energy(z)),
                             TableCell::integral(std::abs(z - 0.5) < cfg.numeric.midgap_tol ? 1 : 0)});
  }
  const auto config_json = canonical_config(cfg);
  summary.files.push_back(detail::write_table(stem(cfg), cfg.format, config_json, profile));
  summary.files.push_back(detail::write_table(stem(cfg, "_spectrum"), cfg.format, config_json, spectrum));
  summary.cells = 1;
  return summary;
}

RunSummary run_spectrum(const SweepConfig& cfg, const RunOptions& options) {
  limit_blas_threads();
  RunSummary summary;
  const Grid grid{cfg.model.swept_axes()};
  const auto boundary = cfg.numeric.boundary;

  struct Point {
    Eigen::VectorXd energies;
    std::string status;
  };
  const auto points = parallel_map(grid.size(), options.workers, [&](std::size_t i) {
    try {
      return Point{eigenvalues(build_hamiltonian(cfg.model.at(grid.axes, grid.values(i)), boundary)), "ok"};
    } catch (const std::exception& e) {
      return Point{{}, error_code(e)};
    }
  });

  Table t;
  for (const auto& a : grid.axes) t.columns.push_back(a.name);
  t.columns.insert(t.columns.end(), {"index", "energy"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    ++summary.cells;
    if (is_failure(points[i].status)) ++summary.failed_cells;
    const auto vals = grid.values(i);
    for (Eigen::Index k = 0; k < points[i].energies.size(); ++k) {
      std::vector<TableCell> row;
      for (const double x : vals) row.push_back(TableCell::num(x));
      row.push_back(TableCell::integral(k));
      row.push_back(TableCell::num(points[i].energies(k)));
      t.rows.push_back(std::move(row));
    }
  }
  const auto config_json = canonical_config(cfg);
  summary.files.push_back(detail::write_table(stem(cfg), cfg.format, config_json, t));

  if (grid.axes.empty()) {
    // Densities of the zero modes (edge-resolved), or of the two states
    // nearest zero when there are none.
    const auto spec = eigensolve(build_hamiltonian(cfg.model.fixed(), boundary));
    Table d;
    d.columns = {"mode", "energy", "left_weight", "cell", "density"};
    const auto modes = edge_resolved_zero_modes(spec, cfg.numeric.zero_tol);
    const int cells = spec.cells();
    auto emit = [&](long long mode, double energy, double left, const Eigen::VectorXd& state) {
      const auto rho = density_distribution(state);
      for (int j = 0; j < cells; ++j) {
        d.rows.push_back({TableCell::integral(mode), TableCell::num(energy), TableCell::num(left),
                          TableCell::integral(j + 1), TableCell::num(rho[static_cast<std::size_t>(j)])});
      }
    };
    if (modes.states.cols() > 0) {
      for (Eigen::Index k = 0; k < modes.states.cols(); ++k) {
        emit(k, modes.energies(k), modes.left_weight(k), modes.states.col(k));
      }
    } else {
      for (const int k : {cells - 1, cells}) {
        const Eigen::VectorXd s = spec.states.col(k);
        const double left = s.head(cells).squaredNorm();
        emit(k, spec.energies(k), left, s);
      }
    }
    summary.files.push_back(detail::write_table(stem(cfg, "_density"), cfg.format, config_json, d));
  }
  return summary;
}

RunSummary run_sweep(const SweepConfig& cfg, const RunOptions& options) {
  switch (cfg.task) {
    case Task::Cut:
      return run_cut(cfg, options);
    case Task::PhaseDiagram:
      return run_phase_diagram(cfg, options);
    case Task::Boundary:
      return run_boundary(cfg, options);
    case Task::ScalingStudy:
      return run_scaling_study(cfg, options);
    case Task::Entanglement:
      return run_entanglement(cfg, options);
    case Task::Spectrum:
      return run_spectrum(cfg, options);
  }
  throw std::invalid_argument("run_sweep: unknown task");
}

}  // namespace moire_ssh
