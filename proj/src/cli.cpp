#include "gpuheat/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gpuheat/errors.hpp"
#include "gpuheat/hardware_catalog.hpp"
#include "gpuheat/scenario_io.hpp"
#include "gpuheat/simulator.hpp"
#include "gpuheat/trace_csv.hpp"

namespace gpuheat::cli {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

int cmd_simulate(const std::string& scenario_path, const std::string& trace_path,
                 const std::string& summary_path, std::ostream& out) {
  const sim::Scenario scenario = io::load_scenario(scenario_path);

  std::ofstream trace_file(trace_path, std::ios::binary | std::ios::trunc);
  if (!trace_file) throw ConfigError("cannot write trace file '" + trace_path + "'");
  sim::CsvTraceWriter writer(trace_file);
  const sim::Summary summary = sim::run_simulation(scenario, {&writer, nullptr, true});
  trace_file.close();
  if (!trace_file) throw ConfigError("error while writing '" + trace_path + "'");

  std::ofstream summary_file(summary_path, std::ios::binary | std::ios::trunc);
  if (!summary_file) throw ConfigError("cannot write summary file '" + summary_path + "'");
  summary_file << io::summary_to_json(summary).dump(2) << '\n';

  out << "band violation " << fmt("%.2f", summary.band_violation_fraction * 100.0) << " %, "
      << "flops " << fmt("%.4g", summary.total_flops) << ", "
      << "heater energy saved " << fmt("%.1f", summary.heater_energy_saved_j) << " J\n";
  return kOk;
}

int cmd_compare(const std::string& scenario_path, const std::vector<std::string>& names,
                const std::string& json_path, std::ostream& out) {
  const sim::Scenario scenario = io::load_scenario(scenario_path);
  std::vector<sched::PolicyId> policies;
  for (const auto& n : names) policies.push_back(sched::parse_policy(n));
  const sim::Comparison cmp = sim::compare_policies(scenario, policies);

  char line[256];
  std::snprintf(line, sizeof line, "%-12s %12s %14s %14s %12s %10s %12s %12s\n", "policy",
                "violation_%", "gpu_energy_j", "heater_j", "saved_j", "preempts", "flops",
                "gpu_peak_c");
  out << line;
  for (const auto& row : cmp.rows) {
    const auto& s = row.summary;
    std::snprintf(line, sizeof line, "%-12s %12.2f %14.1f %14.1f %12.1f %10zu %12.4g %12.2f\n",
                  std::string(sched::to_string(s.policy)).c_str(),
                  s.band_violation_fraction * 100.0, s.gpu_energy_j, s.heater_energy_j,
                  row.heater_energy_saved_j, s.preemptions, s.total_flops,
                  s.node(sim::kGpuNode).peak_c);
    out << line;
  }
  if (!json_path.empty()) {
    std::ofstream f(json_path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + json_path + "'");
    f << io::comparison_to_json(cmp).dump(2) << '\n';
  }
  return kOk;
}

int cmd_classify(std::uint64_t flops, std::uint64_t accesses, std::ostream& out) {
  out << gpu::to_string(gpu::classify_workload(flops, accesses)) << '\n';
  return kOk;
}

int cmd_hardware(const std::string& catalog_path, int stack_count, double gap_factor,
                 std::ostream& out) {
  std::vector<catalog::ProductSpec> products;
  if (catalog_path.empty()) {
    products = catalog::builtin_catalog();
  } else {
    std::ifstream in(catalog_path);
    if (!in) throw CatalogError("cannot open catalog '" + catalog_path + "'");
    products = catalog::load_catalog(in);
  }

  char line[256];
  std::snprintf(line, sizeof line, "%-30s %-7s %9s %8s %10s %8s %8s\n", "product", "kind",
                "price_$", "power_w", "size_cm3", "$/W", "cm3/W");
  out << line;
  for (const auto& p : products) {
    std::snprintf(line, sizeof line, "%-30s %-7s %9.2f %8.1f %10.3f %8s %8s\n", p.name.c_str(),
                  std::string(catalog::to_string(p.kind)).c_str(), p.price_usd, p.power_w,
                  p.size_cm3, catalog::format_price_efficiency(catalog::price_efficiency(p)).c_str(),
                  catalog::format_size_efficiency(catalog::size_efficiency(p)).c_str());
    out << line;
  }

  using catalog::Metric;
  using catalog::ProductKind;
  const auto& gpu_price = catalog::best_by(products, Metric::Price, ProductKind::Gpu);
  const auto& heater_price = catalog::best_by(products, Metric::Price, ProductKind::Heater);
  const auto& gpu_size = catalog::best_by(products, Metric::Size, ProductKind::Gpu);
  const auto& heater_size = catalog::best_by(products, Metric::Size, ProductKind::Heater);
  out << "\nmost price-efficient gpu:    " << gpu_price.name << " ("
      << catalog::format_price_efficiency(catalog::price_efficiency(gpu_price)) << " $/W)\n"
      << "most price-efficient heater: " << heater_price.name << " ("
      << catalog::format_price_efficiency(catalog::price_efficiency(heater_price)) << " $/W)\n"
      << "most size-efficient gpu:     " << gpu_size.name << " ("
      << catalog::format_size_efficiency(catalog::size_efficiency(gpu_size)) << " cm3/W)\n"
      << "most size-efficient heater:  " << heater_size.name << " ("
      << catalog::format_size_efficiency(catalog::size_efficiency(heater_size)) << " cm3/W)\n";
  const double ratio = catalog::cost_ratio(gpu_price, heater_price);
  out << "cost ratio (gpu/heater, $/W): " << fmt("%.4f", ratio) << " (~1/"
      << fmt("%.0f", 1.0 / ratio) << ")\n";

  if (stack_count > 0) {
    const double volume = catalog::stacked_heater_volume(heater_size, stack_count, gap_factor);
    out << "stacked " << stack_count << " x " << heater_size.name << " (gap factor "
        << fmt("%g", gap_factor) << "): " << fmt("%g", volume) << " cm3 for "
        << fmt("%g", heater_size.power_w * stack_count) << " W\n";
  }
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate GPU-based eclipse heating of a small satellite."};
  app.name("gpuheat");
  app.require_subcommand(1);

  std::string scenario_path, trace_path = "trace.csv", summary_path = "summary.json";
  auto* simulate = app.add_subcommand("simulate", "Run one scenario; write trace CSV and summary");
  simulate->add_option("scenario", scenario_path, "Scenario file")->required();
  simulate->add_option("--trace", trace_path, "Trace CSV output path")->capture_default_str();
  simulate->add_option("--summary", summary_path, "Summary document output path")
      ->capture_default_str();

  std::vector<std::string> policies{"thermostat", "always_run", "never_run"};
  std::string compare_json;
  auto* compare = app.add_subcommand("compare", "Run several policies on the same scenario");
  compare->add_option("scenario", scenario_path, "Scenario file")->required();
  compare->add_option("--policies", policies, "Policies to compare")
      ->delimiter(',')
      ->capture_default_str();
  compare->add_option("--json", compare_json, "Also write the comparison as JSON");

  std::uint64_t flops = 0, accesses = 0;
  auto* classify = app.add_subcommand("classify", "Classify work by FLOPs per memory access");
  classify->add_option("--flops", flops, "Floating-point operations")->required();
  classify->add_option("--accesses", accesses, "Memory accesses")->required();

  std::string catalog_path;
  int stack_count = 0;
  double gap_factor = 1.0;
  auto* hardware = app.add_subcommand("hardware", "Price and size efficiency of GPUs vs heaters");
  hardware->add_option("--catalog", catalog_path, "Catalog CSV (default: built-in table)");
  hardware->add_option("--stack-count", stack_count,
                       "Also report the volume of this many stacked size-efficient heaters");
  hardware->add_option("--gap-factor", gap_factor, "Spacing multiplier for stacked heaters")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(scenario_path, trace_path, summary_path, out);
    if (*compare) return cmd_compare(scenario_path, policies, compare_json, out);
    if (*classify) return cmd_classify(flops, accesses, out);
    if (*hardware) return cmd_hardware(catalog_path, stack_count, gap_factor, out);
  } catch (const ValidationError& e) {
    for (const auto& f : e.errors()) err << "error: " << f.path << ": " << f.message << '\n';
    return kInvalidInput;
  } catch (const NumericalError& e) {
    err << "numerical abort at t=" << e.time_s() << " s: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kUsage;
}

}  // namespace gpuheat::cli
