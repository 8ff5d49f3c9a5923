#include "gpuheat/trace_csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace gpuheat::sim {

std::string format_fixed6(double value) {
  if (value == 0.0 || !std::isfinite(value)) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    return "0.00000";
  }
  char sci[32];
  const auto sci_end =
      std::to_chars(sci, sci + sizeof sci, value, std::chars_format::scientific, 5).ptr;
  // The exponent after rounding to six digits decides the decimal places.
  const char* e = std::find(sci, sci_end, 'e');
  int exponent = 0;
  std::from_chars(e + (e[1] == '+' ? 2 : 1), sci_end, exponent);
  char out[400];
  if (exponent <= 5) {
    const auto end =
        std::to_chars(out, out + sizeof out, value, std::chars_format::fixed, 5 - exponent).ptr;
    return std::string(out, end);
  }
  // Too large for six digits before the point: keep the rounded mantissa
  // digits and pad with zeros.
  std::string digits;
  for (const char* p = sci; p != e; ++p) {
    if (*p >= '0' && *p <= '9') digits.push_back(*p);
  }
  std::string text = value < 0 ? "-" : "";
  text += digits;
  text.append(static_cast<std::size_t>(exponent - 5), '0');
  return text;
}

std::string to_csv_row(const TraceRecord& r) {
  std::string row;
  row.reserve(160);
  auto field = [&row](std::string_view s) {
    row.append(s);
    row.push_back(',');
  };
  field(format_fixed6(r.time_s));
  field(thermal::to_string(r.phase));
  field(format_fixed6(r.temp_gpu_c));
  field(format_fixed6(r.temp_body_c));
  field(format_fixed6(r.gpu_power_w));
  field(format_fixed6(r.heater_power_w));
  field(sched::to_string(r.decision));
  field(r.reason);
  field(r.job_id);
  field(r.fragment_index ? std::to_string(*r.fragment_index) : std::string());
  field(format_fixed6(r.fragment_elapsed_s));
  field(format_fixed6(r.cumulative_flops));
  field(format_fixed6(r.cumulative_lost_s));
  row.append(r.band_violation ? "1" : "0");
  return row;
}

CsvTraceWriter::CsvTraceWriter(std::ostream& out) : out_(out) { out_ << kTraceHeader << '\n'; }

void CsvTraceWriter::write(const TraceRecord& record) { out_ << to_csv_row(record) << '\n'; }

}  // namespace gpuheat::sim
