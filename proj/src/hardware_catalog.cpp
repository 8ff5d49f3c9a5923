#include "gpuheat/hardware_catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gpuheat/errors.hpp"

namespace gpuheat::catalog {

namespace {

constexpr std::string_view kHeader = "name,kind,price_usd,power_w,size_cm3";

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw CatalogError("cannot format catalog value");
  return std::string(buf, end);
}

double parse_number(std::string_view text, std::size_t line, std::string_view field) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw CatalogError("catalog line " + std::to_string(line) + ": bad " + std::string(field) +
                       " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string_view to_string(ProductKind kind) { return kind == ProductKind::Gpu ? "gpu" : "heater"; }

ProductKind parse_kind(std::string_view text) {
  if (text == "gpu") return ProductKind::Gpu;
  if (text == "heater") return ProductKind::Heater;
  throw CatalogError("product kind must be \"gpu\" or \"heater\", got \"" + std::string(text) + "\"");
}

std::vector<ProductSpec> builtin_catalog() {
  return {
      {"MSI GTX 980 GAMING 4G", ProductKind::Gpu, 389.0, 165.0, 1406.16},
      {"MSI GTX 950 GAMING 2G", ProductKind::Gpu, 299.0, 90.0, 1368.63},
      {"maxsun RX 550 4GB", ProductKind::Gpu, 84.0, 35.0, 731.675},
      {"ASRock Intel ARC A380 6GB", ProductKind::Gpu, 110.0, 75.0, 1062.936},
      {"Omega Polyimide Heater Kit", ProductKind::Heater, 62.89, 5.0, 0.164},
      {"Minco Polyimide Thermofoil", ProductKind::Heater, 106.0, 7.5, 0.098},
  };
}

void validate_product(const ProductSpec& p) {
  if (p.name.empty()) throw CatalogError("product with empty name");
  if (p.name.find_first_of(",\n\r") != std::string::npos) {
    throw CatalogError("product name '" + p.name + "' contains a comma or newline");
  }
  if (!(p.price_usd > 0.0 && p.power_w > 0.0 && p.size_cm3 > 0.0) ||
      !std::isfinite(p.price_usd + p.power_w + p.size_cm3)) {
    throw CatalogError("product '" + p.name + "': price, power and size must be positive");
  }
}

double price_efficiency(const ProductSpec& p) { return p.price_usd / p.power_w; }

double size_efficiency(const ProductSpec& p) { return p.size_cm3 / p.power_w; }

double efficiency(const ProductSpec& p, Metric metric) {
  return metric == Metric::Price ? price_efficiency(p) : size_efficiency(p);
}

const ProductSpec& best_by(const std::vector<ProductSpec>& catalog, Metric metric, ProductKind kind) {
  const ProductSpec* best = nullptr;
  for (const auto& p : catalog) {
    if (p.kind != kind) continue;
    if (!best) {
      best = &p;
      continue;
    }
    const double a = efficiency(p, metric);
    const double b = efficiency(*best, metric);
    if (a < b || (a == b && p.name < best->name)) best = &p;
  }
  if (!best) throw CatalogError("catalog has no product of kind " + std::string(to_string(kind)));
  return *best;
}

double cost_ratio(const ProductSpec& gpu, const ProductSpec& heater) {
  return price_efficiency(gpu) / price_efficiency(heater);
}

double stacked_heater_volume(const ProductSpec& heater, int count, double gap_factor) {
  if (heater.kind != ProductKind::Heater) {
    throw DomainError("stacked_heater_volume applies to heaters, not '" + heater.name + "'");
  }
  if (count < 1) throw ConfigError("stacked_heater_volume: count must be >= 1");
  if (!(gap_factor >= 1.0)) throw ConfigError("stacked_heater_volume: gap_factor must be >= 1");
  return static_cast<double>(count) * heater.size_cm3 * gap_factor;
}

std::string format_price_efficiency(double usd_per_w) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", usd_per_w);
  return buf;
}

std::string format_size_efficiency(double cm3_per_w) {
  if (cm3_per_w == 0.0) return "0";
  const int magnitude = static_cast<int>(std::floor(std::log10(std::abs(cm3_per_w))));
  const double scale = std::pow(10.0, 1 - magnitude);
  const double rounded = std::round(cm3_per_w * scale) / scale;
  // Re-derive places from the rounded value so 9.96 -> "10", not "10.0".
  const int rounded_mag = static_cast<int>(std::floor(std::log10(std::abs(rounded))));
  const int places = std::max(0, 1 - rounded_mag);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, rounded);
  return buf;
}

std::vector<ProductSpec> load_catalog(std::istream& in) {
  std::vector<ProductSpec> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kHeader) {
        throw CatalogError("catalog header must be '" + std::string(kHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != 5) {
      throw CatalogError("catalog line " + std::to_string(line_no) + ": expected 5 fields");
    }
    ProductSpec p;
    p.name = std::string(cells[0]);
    p.kind = parse_kind(cells[1]);
    p.price_usd = parse_number(cells[2], line_no, "price_usd");
    p.power_w = parse_number(cells[3], line_no, "power_w");
    p.size_cm3 = parse_number(cells[4], line_no, "size_cm3");
    validate_product(p);
    out.push_back(std::move(p));
  }
  if (!header_seen) throw CatalogError("catalog is empty");
  return out;
}

void save_catalog(std::ostream& out, const std::vector<ProductSpec>& catalog) {
  out << kHeader << '\n';
  for (const auto& p : catalog) {
    validate_product(p);
    out << p.name << ',' << to_string(p.kind) << ',' << shortest(p.price_usd) << ','
        << shortest(p.power_w) << ',' << shortest(p.size_cm3) << '\n';
  }
}

}  // namespace gpuheat::catalog
