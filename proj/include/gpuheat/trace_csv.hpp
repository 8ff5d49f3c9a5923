#pragma once

#include <ostream>
#include <string>
#include <string_view>

#include "gpuheat/simulator.hpp"

namespace gpuheat::sim {

inline constexpr std::string_view kTraceHeader =
    "time_s,phase,temp_gpu_c,temp_body_c,gpu_power_w,heater_power_w,decision,reason,job_id,"
    "fragment_index,fragment_elapsed_s,cumulative_flops,cumulative_lost_s,band_violation";

/// `value` rounded to six significant digits and printed without an exponent,
/// e.g. 0.0123457, 54000.0, 1234570000. Independent of the global locale.
std::string format_fixed6(double value);

std::string to_csv_row(const TraceRecord& record);

/// Writes the header on construction and one row per record.
class CsvTraceWriter final : public TraceSink {
 public:
  explicit CsvTraceWriter(std::ostream& out);
  void write(const TraceRecord& record) override;

 private:
  std::ostream& out_;
};

}  // namespace gpuheat::sim
