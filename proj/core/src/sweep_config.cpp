#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "moire_ssh/sweep.hpp"

namespace moire_ssh {

using nlohmann::json;

namespace {

constexpr std::pair<Task, const char*> kTaskNames[] = {
    {Task::PhaseDiagram, "phase-diagram"}, {Task::Cut, "cut"},
    {Task::Boundary, "boundary"},          {Task::ScalingStudy, "scaling"},
    {Task::Entanglement, "entanglement"},  {Task::Spectrum, "spectrum"},
};

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out = "invalid configuration:";
  for (const auto& i : issues) {
    out += "\n  ";
    out += i.kind == ConfigIssue::Kind::Schema ? "SchemaError" : "RangeError";
    out += " at '" + i.path + "': " + i.message;
  }
  return out;
}

// Collects issues while walking the document so that one pass reports all
// of them.
class Validator {
 public:
  void schema(std::string path, std::string message) {
    issues_.push_back({ConfigIssue::Kind::Schema, std::move(path), std::move(message)});
  }
  void range(std::string path, std::string message) {
    issues_.push_back({ConfigIssue::Kind::Range, std::move(path), std::move(message)});
  }
  bool ok() const { return issues_.empty(); }
  std::vector<ConfigIssue> take() { return std::move(issues_); }

  void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
      if (!known.contains(key)) schema(join(path, key), "unknown key");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  std::optional<double> number(const json& obj, const std::string& path, const char* key) {
    const auto& v = obj.at(key);
    const auto p = join(path, key);
    if (!v.is_number()) {
      schema(p, "expected a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      range(p, "must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<int> integer(const json& obj, const std::string& path, const char* key, int min_value) {
    const auto& v = obj.at(key);
    const auto p = join(path, key);
    if (!v.is_number_integer()) {
      schema(p, "expected an integer");
      return std::nullopt;
    }
    const auto x = v.get<long long>();
    if (x < min_value || x > 1'000'000'000) {
      range(p, "must be >= " + std::to_string(min_value));
      return std::nullopt;
    }
    return static_cast<int>(x);
  }

  std::optional<double> positive(const json& obj, const std::string& path, const char* key) {
    auto x = number(obj, path, key);
    if (x && !(*x > 0.0)) {
      range(join(path, key), "must be positive");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::vector<int>> sizes(const json& obj, const std::string& path, const char* key) {
    const auto& v = obj.at(key);
    const auto p = join(path, key);
    if (!v.is_array()) {
      schema(p, "expected an array of integers");
      return std::nullopt;
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto ip = p + "[" + std::to_string(i) + "]";
      if (!v[i].is_number_integer()) {
        schema(ip, "expected an integer");
        return std::nullopt;
      }
      const auto x = v[i].get<long long>();
      if (x < 1) {
        range(ip, "sizes must be positive");
        return std::nullopt;
      }
      if (!out.empty() && x <= out.back()) {
        range(p, "sizes must be strictly increasing");
        return std::nullopt;
      }
      out.push_back(static_cast<int>(x));
    }
    if (out.size() < 3) {
      range(p, "need at least 3 sizes");
      return std::nullopt;
    }
    return out;
  }

  void param(const json& model, const char* key, ParamSpec& out) {
    const auto p = join("model", key);
    if (!model.contains(key)) {
      schema(p, "missing");
      return;
    }
    const auto& v = model.at(key);
    if (v.is_number()) {
      if (auto x = number(model, "model", key)) out.value = *x;
      return;
    }
    if (!v.is_object()) {
      schema(p, "expected a number or {min, max, steps}");
      return;
    }
    check_keys(v, p, {"min", "max", "steps"});
    for (const char* k : {"min", "max", "steps"}) {
      if (!v.contains(k)) schema(join(p, k), "missing");
    }
    if (!v.contains("min") || !v.contains("max") || !v.contains("steps")) return;
    const auto lo = number(v, p, "min");
    const auto hi = number(v, p, "max");
    std::optional<int> steps;
    if (!v.at("steps").is_number_integer()) {
      schema(join(p, "steps"), "expected an integer");
    } else if (v.at("steps").get<long long>() < 2) {
      range(join(p, "steps"), std::string("swept axis '") + key + "' needs steps >= 2");
    } else {
      steps = static_cast<int>(std::min<long long>(v.at("steps").get<long long>(), 1'000'000'000));
    }
    if (lo && hi && !(*hi > *lo)) range(p, std::string("swept axis '") + key + "' needs max > min");
    if (lo && hi && steps && *hi > *lo) {
      out.value = *lo;
      out.range = AxisRange{*lo, *hi, *steps};
    }
  }

 private:
  std::vector<ConfigIssue> issues_;
};

json range_json(const ParamSpec& p) {
  if (!p.range) return p.value;
  return {{"min", p.range->min}, {"max", p.range->max}, {"steps", p.range->steps}};
}

}  // namespace

const char* to_string(Task t) noexcept {
  for (const auto& [task, name] : kTaskNames) {
    if (task == t) return name;
  }
  return "unknown";
}

std::optional<Task> parse_task(std::string_view name) {
  for (const auto& [task, n] : kTaskNames) {
    if (name == n) return task;
  }
  return std::nullopt;
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::vector<Axis> ModelGrid::swept_axes() const {
  std::vector<Axis> axes;
  if (epsilon.range) axes.push_back({"epsilon", *epsilon.range});
  if (j2.range) axes.push_back({"j2", *j2.range});
  if (m_o.range) axes.push_back({"m_o", *m_o.range});
  return axes;
}

ModelParams ModelGrid::fixed() const {
  return {epsilon.value, j2.value, m_o.value, a1, a2, supercells};
}

ModelParams ModelGrid::at(const std::vector<Axis>& axes, const std::vector<double>& values) const {
  ModelParams p = fixed();
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i].name == "epsilon") p = p.with_epsilon(values[i]);
    else if (axes[i].name == "j2") p = p.with_j2(values[i]);
    else p = p.with_m_o(values[i]);
  }
  return p;
}

SweepConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({{ConfigIssue::Kind::Schema, "", std::string("not valid JSON: ") + e.what()}});
  }
  if (!doc.is_object()) throw ConfigError({{ConfigIssue::Kind::Schema, "", "top level must be an object"}});

  Validator val;
  SweepConfig cfg;
  val.check_keys(doc, "", {"task", "model", "numeric", "scaling", "output", "workers"});

  if (!doc.contains("task")) {
    val.schema("task", "missing");
  } else if (!doc["task"].is_string() || !parse_task(doc["task"].get<std::string>())) {
    val.schema("task", "expected one of cut, phase-diagram, boundary, scaling, entanglement, spectrum");
  } else {
    cfg.task = *parse_task(doc["task"].get<std::string>());
  }
  const bool task_known = doc.contains("task") && doc["task"].is_string() &&
                          parse_task(doc["task"].get<std::string>()).has_value();

  if (!doc.contains("model") || !doc["model"].is_object()) {
    val.schema("model", "missing or not an object");
  } else {
    const auto& m = doc["model"];
    val.check_keys(m, "model", {"epsilon", "j2", "m_o", "a1", "a2", "A"});
    val.param(m, "epsilon", cfg.model.epsilon);
    val.param(m, "j2", cfg.model.j2);
    val.param(m, "m_o", cfg.model.m_o);
    if (m.contains("a1")) {
      if (auto x = val.integer(m, "model", "a1", 1)) cfg.model.a1 = *x;
    }
    if (m.contains("a2")) {
      if (auto x = val.integer(m, "model", "a2", 1)) cfg.model.a2 = *x;
    }
    if (m.contains("A")) {
      if (auto x = val.integer(m, "model", "A", 1)) cfg.model.supercells = *x;
    }
    if (2 * cfg.model.supercells * cfg.model.a1 * cfg.model.a2 < 6) {
      val.range("model.A", "chain needs at least 3 unit cells");
    }
  }

  if (doc.contains("numeric")) {
    const auto& n = doc["numeric"];
    if (!n.is_object()) {
      val.schema("numeric", "expected an object");
    } else {
      val.check_keys(n, "numeric",
                     {"n_k", "zero_tol", "midgap_tol", "derivative_step", "boundary_tol", "scan_step", "sizes",
                      "entropy_sizes", "profile_A", "boundary", "bipartition", "overlay", "observables"});
      auto& o = cfg.numeric;
      if (n.contains("n_k")) {
        if (auto x = val.integer(n, "numeric", "n_k", 0)) o.n_k = *x;
      }
      if (n.contains("zero_tol")) {
        if (auto x = val.positive(n, "numeric", "zero_tol")) o.zero_tol = *x;
      }
      if (n.contains("midgap_tol")) {
        if (auto x = val.positive(n, "numeric", "midgap_tol")) {
          if (*x >= 0.5) val.range("numeric.midgap_tol", "must be below 0.5");
          else o.midgap_tol = *x;
        }
      }
      if (n.contains("derivative_step")) {
        if (auto x = val.positive(n, "numeric", "derivative_step")) o.derivative_step = *x;
      }
      if (n.contains("boundary_tol")) {
        if (auto x = val.positive(n, "numeric", "boundary_tol")) o.boundary_tol = *x;
      }
      if (n.contains("scan_step")) {
        if (auto x = val.positive(n, "numeric", "scan_step")) o.scan_step = *x;
      }
      if (n.contains("sizes")) {
        if (auto x = val.sizes(n, "numeric", "sizes")) o.sizes = *x;
      }
      if (n.contains("entropy_sizes")) {
        if (auto x = val.sizes(n, "numeric", "entropy_sizes")) o.entropy_sizes = *x;
      }
      if (n.contains("profile_A")) {
        if (auto x = val.integer(n, "numeric", "profile_A", 1)) o.profile_supercells = *x;
      }
      if (n.contains("bipartition")) {
        if (auto x = val.integer(n, "numeric", "bipartition", 1)) o.bipartition = *x;
      }
      if (n.contains("boundary")) {
        const auto& b = n["boundary"];
        if (b == "open") o.boundary = Boundary::Open;
        else if (b == "periodic") o.boundary = Boundary::Periodic;
        else val.schema("numeric.boundary", "expected \"open\" or \"periodic\"");
      }
      if (n.contains("overlay")) {
        if (!n["overlay"].is_boolean()) val.schema("numeric.overlay", "expected a boolean");
        else o.overlay = n["overlay"].get<bool>();
      }
      if (n.contains("observables")) {
        const auto& obs = n["observables"];
        if (!obs.is_array()) {
          val.schema("numeric.observables", "expected an array of names");
        } else {
          o.observables = {false, false, false, false};
          for (std::size_t i = 0; i < obs.size(); ++i) {
            const auto p = "numeric.observables[" + std::to_string(i) + "]";
            if (obs[i] == "nu_real") o.observables.nu_real = true;
            else if (obs[i] == "nu_k") o.observables.nu_k = true;
            else if (obs[i] == "gaps") o.observables.gaps = true;
            else if (obs[i] == "entropy") o.observables.entropy = true;
            else val.schema(p, "expected one of nu_real, nu_k, gaps, entropy");
          }
        }
      }
    }
  } else if (task_known && cfg.task == Task::PhaseDiagram) {
    cfg.numeric.observables = {false, true, true, false};
  }
  if (task_known && cfg.task == Task::PhaseDiagram && doc.contains("numeric") && doc["numeric"].is_object() &&
      !doc["numeric"].contains("observables")) {
    cfg.numeric.observables = {false, true, true, false};
  }

  if (doc.contains("scaling")) {
    const auto& s = doc["scaling"];
    if (!s.is_object()) {
      val.schema("scaling", "expected an object");
    } else {
      val.check_keys(s, "scaling", {"transitions", "self_test"});
      if (s.contains("self_test")) {
        if (!s["self_test"].is_boolean()) val.schema("scaling.self_test", "expected a boolean");
        else cfg.scaling.self_test = s["self_test"].get<bool>();
      }
      if (s.contains("transitions")) {
        const auto& t = s["transitions"];
        if (!t.is_array()) {
          val.schema("scaling.transitions", "expected an array of numbers");
        } else {
          for (std::size_t i = 0; i < t.size(); ++i) {
            if (!t[i].is_number() || !std::isfinite(t[i].get<double>())) {
              val.schema("scaling.transitions[" + std::to_string(i) + "]", "expected a finite number");
            } else {
              cfg.scaling.transitions.push_back(t[i].get<double>());
            }
          }
        }
      }
    }
  }

  if (doc.contains("output")) {
    const auto& o = doc["output"];
    if (!o.is_object()) {
      val.schema("output", "expected an object");
    } else {
      val.check_keys(o, "output", {"prefix", "format"});
      if (o.contains("prefix")) {
        if (!o["prefix"].is_string() || o["prefix"].get<std::string>().empty()) {
          val.schema("output.prefix", "expected a non-empty string");
        } else {
          cfg.prefix = o["prefix"].get<std::string>();
        }
      }
      if (o.contains("format")) {
        if (o["format"] == "csv") cfg.format = OutputFormat::Csv;
        else if (o["format"] == "json") cfg.format = OutputFormat::Json;
        else val.schema("output.format", "expected \"csv\" or \"json\"");
      }
    }
  }

  if (doc.contains("workers")) {
    if (auto x = val.integer(doc, "", "workers", 0)) cfg.workers = *x;
  }

  // Cross-field rules.
  const auto axes = cfg.model.swept_axes();
  if (axes.size() > 2) val.schema("model", "at most two swept axes");
  if (task_known && axes.size() <= 2) {
    const bool m_o_swept = cfg.model.m_o.range.has_value();
    switch (cfg.task) {
      case Task::Cut:
        if (axes.size() != 1) val.schema("model", "cut needs exactly one swept axis");
        break;
      case Task::PhaseDiagram:
        if (axes.size() != 2) val.schema("model", "phase-diagram needs exactly two swept axes");
        if (cfg.numeric.overlay && !m_o_swept) val.schema("numeric.overlay", "overlay needs m_o as a swept axis");
        break;
      case Task::Boundary:
        if (!m_o_swept) val.schema("model.m_o", "boundary needs an m_o range to scan");
        break;
      case Task::ScalingStudy:
        if (!cfg.scaling.self_test && (!m_o_swept || axes.size() != 1)) {
          val.schema("model", "scaling needs an m_o range and fixed epsilon, j2");
        }
        break;
      case Task::Entanglement:
        if (!axes.empty()) val.schema("model", "entanglement takes fixed parameters");
        if (cfg.numeric.bipartition &&
            *cfg.numeric.bipartition >= cfg.model.supercells * cfg.model.a1 * cfg.model.a2) {
          val.range("numeric.bipartition", "must be below L");
        }
        break;
      case Task::Spectrum:
        if (axes.size() > 1) val.schema("model", "spectrum takes at most one swept axis");
        break;
    }
  }

  if (!val.ok()) throw ConfigError(val.take());
  return cfg;
}

std::string canonical_config(const SweepConfig& cfg) {
  const auto& n = cfg.numeric;
  json obs = json::array();
  if (n.observables.nu_real) obs.push_back("nu_real");
  if (n.observables.nu_k) obs.push_back("nu_k");
  if (n.observables.gaps) obs.push_back("gaps");
  if (n.observables.entropy) obs.push_back("entropy");
  json doc = {
      {"task", to_string(cfg.task)},
      {"model",
       {{"epsilon", range_json(cfg.model.epsilon)},
        {"j2", range_json(cfg.model.j2)},
        {"m_o", range_json(cfg.model.m_o)},
        {"a1", cfg.model.a1},
        {"a2", cfg.model.a2},
        {"A", cfg.model.supercells}}},
      {"numeric",
       {{"n_k", n.n_k},
        {"zero_tol", n.zero_tol},
        {"midgap_tol", n.midgap_tol},
        {"derivative_step", n.derivative_step},
        {"boundary_tol", n.boundary_tol},
        {"scan_step", n.scan_step},
        {"sizes", n.sizes},
        {"entropy_sizes", n.entropy_sizes},
        {"profile_A", n.profile_supercells},
        {"boundary", to_string(n.boundary)},
        {"overlay", n.overlay},
        {"observables", obs}}},
      {"scaling", {{"transitions", cfg.scaling.transitions}, {"self_test", cfg.scaling.self_test}}},
      {"format", cfg.format == OutputFormat::Csv ? "csv" : "json"},
  };
  if (n.bipartition) doc["numeric"]["bipartition"] = *n.bipartition;
  return doc.dump();
}

}  // namespace moire_ssh
