#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace gpuheat::catalog {

enum class ProductKind { Gpu, Heater };

std::string_view to_string(ProductKind kind);
ProductKind parse_kind(std::string_view text);

struct ProductSpec {
  std::string name;
  ProductKind kind = ProductKind::Gpu;
  double price_usd = 0.0;
  double power_w = 0.0;
  double size_cm3 = 0.0;

  bool operator==(const ProductSpec&) const = default;
};

enum class Metric { Price, Size };

/// Four GPUs and two polyimide heaters with their list price, rated power and
/// volume.
std::vector<ProductSpec> builtin_catalog();

/// Dollars per watt.
double price_efficiency(const ProductSpec& p);
/// Cubic centimetres per watt.
double size_efficiency(const ProductSpec& p);
double efficiency(const ProductSpec& p, Metric metric);

/// Product of `kind` with the lowest value of `metric`; ties go to the
/// lexicographically smaller name. Throws CatalogError if no product matches.
const ProductSpec& best_by(const std::vector<ProductSpec>& catalog, Metric metric, ProductKind kind);

/// price_efficiency(gpu) / price_efficiency(heater).
double cost_ratio(const ProductSpec& gpu, const ProductSpec& heater);

/// Volume taken by `count` heaters stacked with `gap_factor` times their own
/// volume reserved for each (gap_factor >= 1). DomainError for a GPU,
/// ConfigError for a bad count or gap factor.
double stacked_heater_volume(const ProductSpec& heater, int count, double gap_factor);

/// Display rounding: dollars per watt to two decimals.
std::string format_price_efficiency(double usd_per_w);
/// Display rounding: cm^3 per watt to two significant figures.
std::string format_size_efficiency(double cm3_per_w);

/// CSV with header `name,kind,price_usd,power_w,size_cm3`. Numbers are written
/// in shortest round-trip form, so save(load(x)) reproduces x byte for byte
/// for files this function wrote.
std::vector<ProductSpec> load_catalog(std::istream& in);
void save_catalog(std::ostream& out, const std::vector<ProductSpec>& catalog);

/// Throws CatalogError on a non-positive field or empty name.
void validate_product(const ProductSpec& p);

}  // namespace gpuheat::catalog
