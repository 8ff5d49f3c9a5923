#include "gpuheat/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "gpuheat/errors.hpp"

namespace gpuheat::io {

using nlohmann::json;

namespace {

// Reads fields from one JSON object, remembering which keys were consumed so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path, std::vector<FieldError>& errors)
      : path_(std::move(path)), errors_(errors) {
    if (node.is_object()) {
      node_ = &node;
    } else {
      fail(path_, "must be an object");
    }
  }

  ~Section() {
    if (!node_) return;
    for (const auto& [key, value] : node_->items()) {
      if (!used_.count(key)) fail(field(key), "unknown key");
    }
  }

  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  const json* child(const std::string& key, bool required = true) {
    used_.insert(key);
    if (!node_) return nullptr;
    auto it = node_->find(key);
    if (it == node_->end()) {
      if (required) fail(field(key), "missing");
      return nullptr;
    }
    return &*it;
  }

  void number(const std::string& key, double& out, bool required = true) {
    if (const json* v = child(key, required)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(field(key), "must be a number");
      }
    }
  }

  void count(const std::string& key, std::uint64_t& out, bool required = true) {
    if (const json* v = child(key, required)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else if (v->is_number_float() && v->get<double>() >= 0.0 &&
                 v->get<double>() < 1.8446744073709552e19 &&
                 v->get<double>() == std::floor(v->get<double>())) {
        out = static_cast<std::uint64_t>(v->get<double>());
      } else {
        fail(field(key), "must be a non-negative integer");
      }
    }
  }

  void integer(const std::string& key, int& out, bool required = true) {
    if (const json* v = child(key, required)) {
      if (v->is_number_integer()) {
        out = v->get<int>();
      } else {
        fail(field(key), "must be an integer");
      }
    }
  }

  void boolean(const std::string& key, bool& out, bool required = true) {
    if (const json* v = child(key, required)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        fail(field(key), "must be true or false");
      }
    }
  }

  void text(const std::string& key, std::string& out, bool required = true) {
    if (const json* v = child(key, required)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        fail(field(key), "must be a string");
      }
    }
  }

  /// Runs `parse` on a string field, turning ConfigError into a field error.
  template <typename T, typename Parse>
  void enumerated(const std::string& key, T& out, Parse parse, bool required = true) {
    std::string raw;
    const std::size_t before = errors_.size();
    text(key, raw, required);
    if (errors_.size() != before || raw.empty()) return;
    try {
      out = parse(raw);
    } catch (const Error& e) {
      fail(field(key), e.what());
    }
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  void fail(std::string path, std::string message) {
    errors_.push_back({std::move(path), std::move(message)});
  }

 private:
  const json* node_ = nullptr;
  std::string path_;
  std::vector<FieldError>& errors_;
  std::set<std::string> used_;
};

thermal::ThermalNode parse_node(const json& node, const std::string& path,
                                std::vector<FieldError>& errors) {
  thermal::ThermalNode n;
  Section s(node, path, errors);
  s.text("id", n.id);
  s.number("heat_capacity_j_per_k", n.heat_capacity_j_per_k);
  double temperature_c = thermal::to_celsius(n.temperature_k);
  s.number("temperature_c", temperature_c);
  n.temperature_k = thermal::to_kelvin(temperature_c);
  s.number("emissive_area_m2", n.emissive_area_m2, false);
  s.number("emissivity", n.emissivity, false);
  s.number("absorptive_area_m2", n.absorptive_area_m2, false);
  s.number("absorptivity", n.absorptivity, false);
  s.number("internal_load_w", n.internal_load_w, false);
  return n;
}

template <typename Fn>
void each_element(Section& parent, const std::string& key, Fn fn) {
  const json* arr = parent.child(key);
  if (!arr) return;
  if (!arr->is_array()) {
    parent.fail(parent.field(key), "must be an array");
    return;
  }
  for (std::size_t i = 0; i < arr->size(); ++i) {
    fn((*arr)[i], key + "[" + std::to_string(i) + "]");
  }
}

}  // namespace

sim::Scenario parse_scenario(const json& doc) {
  std::vector<FieldError> errors;
  sim::Scenario sc;
  sc.nodes.clear();
  {
    Section root(doc, "", errors);
    if (const json* orbit = root.child("orbit")) {
      Section s(*orbit, "orbit", errors);
      s.number("period_s", sc.orbit.period_s);
      s.number("eclipse_fraction", sc.orbit.eclipse_fraction);
      s.number("phase_offset_s", sc.orbit.phase_offset_s, false);
    }
    if (const json* env = root.child("environment", false)) {
      Section s(*env, "environment", errors);
      s.number("solar_flux_w_per_m2", sc.environment.solar_flux_w_per_m2, false);
      s.number("sink_temperature_k", sc.environment.sink_temperature_k, false);
    }
    each_element(root, "nodes", [&](const json& n, const std::string& path) {
      sc.nodes.push_back(parse_node(n, path, errors));
    });
    if (const json* links = root.child("links", false)) {
      if (!links->is_array()) {
        errors.push_back({"links", "must be an array"});
      } else {
        for (std::size_t i = 0; i < links->size(); ++i) {
          thermal::ThermalLink l;
          Section s((*links)[i], "links[" + std::to_string(i) + "]", errors);
          s.text("node_a", l.node_a);
          s.text("node_b", l.node_b);
          s.number("conductance_w_per_k", l.conductance_w_per_k);
          sc.links.push_back(std::move(l));
        }
      }
    }
    if (const json* g = root.child("gpu")) {
      Section s(*g, "gpu", errors);
      s.number("tdp_w", sc.gpu.tdp_w);
      s.number("idle_power_w", sc.gpu.idle_power_w);
      s.number("leak_exp_b", sc.gpu.leak_exp_b);
      bool have_coeff = s.child("leak_coeff_k", false) != nullptr;
      if (have_coeff) {
        s.number("leak_coeff_k", sc.gpu.leak_coeff_k);
      } else if (sc.gpu.tdp_w > 0.0 && sc.gpu.leak_exp_b > 0.0) {
        sc.gpu.leak_coeff_k = gpu::calibrate_leak_coeff(sc.gpu.tdp_w, sc.gpu.leak_exp_b);
      }
      s.number("mem_power_fraction", sc.gpu.mem_power_fraction);
      s.number("exec_knee_c", sc.gpu.exec_knee_c, false);
      s.number("exec_slope_s_per_c", sc.gpu.exec_slope_s_per_c, false);
      s.number("mem_slope_s_per_c", sc.gpu.mem_slope_s_per_c, false);
      s.number("mem_ref_temp_c", sc.gpu.mem_ref_temp_c, false);
    }
    each_element(root, "jobs", [&](const json& j, const std::string& path) {
      workload::JobSpec spec;
      Section s(j, path, errors);
      s.text("id", spec.id);
      s.count("total_flops", spec.total_flops);
      s.count("total_mem_accesses", spec.total_mem_accesses);
      s.number("total_duration_s", spec.total_duration_s);
      s.number("fragment_duration_s", spec.fragment_duration_s);
      s.enumerated("dependency_mode", spec.mode, workload::parse_dependency_mode);
      s.integer("priority", spec.priority, false);
      sc.jobs.push_back(std::move(spec));
    });
    if (const json* p = root.child("policy")) {
      Section s(*p, "policy", errors);
      s.enumerated("id", sc.policy.id, sched::parse_policy);
      s.number("band_low_c", sc.policy.thermostat.band_low_c);
      s.number("band_high_c", sc.policy.thermostat.band_high_c);
      s.text("control_node", sc.policy.thermostat.control_node);
      s.number("exec_preference_threshold_c", sc.policy.thermostat.exec_preference_threshold_c);
      s.boolean("allow_sunlit_compute", sc.policy.allow_sunlit_compute, false);
    }
    if (const json* r = root.child("run")) {
      Section s(*r, "run", errors);
      s.number("dt_s", sc.dt_s);
      s.number("duration_s", sc.duration_s);
      s.number("heater_rated_w", sc.heater_rated_w);
      s.number("checkpoint_overhead_s", sc.checkpoint_overhead_s, false);
      s.count("seed", sc.seed, false);
    }
  }
  // Range checks run on whatever parsed; a field already reported as missing
  // or mistyped is not reported a second time.
  std::set<std::string> reported;
  for (const auto& e : errors) reported.insert(e.path);
  for (auto& e : sim::validation_errors(sc)) {
    if (!reported.count(e.path)) errors.push_back(std::move(e));
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return sc;
}

sim::Scenario parse_scenario(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::vector<FieldError>{{"(document)", e.what()}});
  }
  return parse_scenario(doc);
}

sim::Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
  return parse_scenario(in);
}

json scenario_to_json(const sim::Scenario& sc) {
  json nodes = json::array();
  for (const auto& n : sc.nodes) {
    nodes.push_back({{"id", n.id},
                     {"heat_capacity_j_per_k", n.heat_capacity_j_per_k},
                     {"temperature_c", thermal::to_celsius(n.temperature_k)},
                     {"emissive_area_m2", n.emissive_area_m2},
                     {"emissivity", n.emissivity},
                     {"absorptive_area_m2", n.absorptive_area_m2},
                     {"absorptivity", n.absorptivity},
                     {"internal_load_w", n.internal_load_w}});
  }
  json links = json::array();
  for (const auto& l : sc.links) {
    links.push_back(
        {{"node_a", l.node_a}, {"node_b", l.node_b}, {"conductance_w_per_k", l.conductance_w_per_k}});
  }
  json jobs = json::array();
  for (const auto& j : sc.jobs) {
    jobs.push_back({{"id", j.id},
                    {"total_flops", j.total_flops},
                    {"total_mem_accesses", j.total_mem_accesses},
                    {"total_duration_s", j.total_duration_s},
                    {"fragment_duration_s", j.fragment_duration_s},
                    {"dependency_mode", std::string(workload::to_string(j.mode))},
                    {"priority", j.priority}});
  }
  const auto& g = sc.gpu;
  const auto& p = sc.policy;
  return {
      {"orbit",
       {{"period_s", sc.orbit.period_s},
        {"eclipse_fraction", sc.orbit.eclipse_fraction},
        {"phase_offset_s", sc.orbit.phase_offset_s}}},
      {"environment",
       {{"solar_flux_w_per_m2", sc.environment.solar_flux_w_per_m2},
        {"sink_temperature_k", sc.environment.sink_temperature_k}}},
      {"nodes", nodes},
      {"links", links},
      {"gpu",
       {{"tdp_w", g.tdp_w},
        {"idle_power_w", g.idle_power_w},
        {"leak_coeff_k", g.leak_coeff_k},
        {"leak_exp_b", g.leak_exp_b},
        {"mem_power_fraction", g.mem_power_fraction},
        {"exec_knee_c", g.exec_knee_c},
        {"exec_slope_s_per_c", g.exec_slope_s_per_c},
        {"mem_slope_s_per_c", g.mem_slope_s_per_c},
        {"mem_ref_temp_c", g.mem_ref_temp_c}}},
      {"jobs", jobs},
      {"policy",
       {{"id", std::string(sched::to_string(p.id))},
        {"band_low_c", p.thermostat.band_low_c},
        {"band_high_c", p.thermostat.band_high_c},
        {"control_node", p.thermostat.control_node},
        {"exec_preference_threshold_c", p.thermostat.exec_preference_threshold_c},
        {"allow_sunlit_compute", p.allow_sunlit_compute}}},
      {"run",
       {{"dt_s", sc.dt_s},
        {"duration_s", sc.duration_s},
        {"heater_rated_w", sc.heater_rated_w},
        {"checkpoint_overhead_s", sc.checkpoint_overhead_s},
        {"seed", sc.seed}}},
  };
}

json summary_to_json(const sim::Summary& s) {
  json nodes = json::object();
  for (const auto& n : s.nodes) nodes[n.id] = {{"peak_c", n.peak_c}, {"min_c", n.min_c}};
  return {
      {"policy", std::string(sched::to_string(s.policy))},
      {"ticks", s.ticks},
      {"fragments_completed", s.fragments_completed},
      {"jobs_completed", s.jobs_completed},
      {"total_flops", s.total_flops},
      {"gpu_energy_j", s.gpu_energy_j},
      {"heater_energy_j", s.heater_energy_j},
      {"baseline_heater_energy_j", s.baseline_heater_energy_j},
      {"heater_energy_saved_j", s.heater_energy_saved_j},
      {"preemptions", s.preemptions},
      {"lost_compute_s", s.lost_compute_s},
      {"band_violation_fraction", s.band_violation_fraction},
      {"scored_eclipse_ticks", s.scored_eclipse_ticks},
      {"temperatures_c", nodes},
      {"stability_warnings", s.stability_warnings},
      {"first_unstable_time_s",
       s.first_unstable_time_s ? json(*s.first_unstable_time_s) : json(nullptr)},
  };
}

json comparison_to_json(const sim::Comparison& c) {
  json rows = json::array();
  for (const auto& r : c.rows) {
    rows.push_back({{"summary", summary_to_json(r.summary)},
                    {"heater_energy_saved_j", r.heater_energy_saved_j},
                    {"flops_gained", r.flops_gained}});
  }
  return {{"never_run", summary_to_json(c.never_run)}, {"policies", rows}};
}

}  // namespace gpuheat::io
