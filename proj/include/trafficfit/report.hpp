#pragma once

// Per-trace report pipeline behind the `report` command, plus the input and
// timescale helpers the other CLI commands share.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trafficfit/ingest.hpp"
#include "trafficfit/serialize.hpp"

namespace trafficfit {

inline constexpr std::string_view kToolkitVersion = "0.3.0";
inline constexpr int kReportSchemaVersion = 1;

/// "5ms", "100ms", "1s", "0.5s", "250us" or a bare number of seconds.
/// Throws Error(Parse) on malformed input; no range check.
Timescale parse_timescale(std::string_view text);
/// Shortest exact label: "5ms", "1s", "1500ms", "250us".
std::string timescale_label(Timescale t);

inline constexpr Timescale kMinCliTimescale = std::chrono::milliseconds(1);
inline constexpr Timescale kMaxCliTimescale = std::chrono::seconds(60);

/// A loaded trace: raw packets, or a volume series with its sidecar.
struct TraceInput {
  std::string id;
  std::string file_name;
  std::variant<std::vector<PacketRecord>, VolumeSeries> data;

  bool is_packets() const { return data.index() == 0; }
};

/// Volume series with a `.json` sidecar are read as such, anything else as
/// packet CSV. The trace id is the file stem.
TraceInput load_trace(const std::filesystem::path& path);

/// Expands directories to their *.csv files and sorts by path.
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::filesystem::path>& inputs);

/// Series of the input at timescale T. Packets are aggregated directly; a
/// volume series is re-binned and only to whole multiples of its own timescale.
VolumeSeries series_at(const TraceInput& input, Timescale timescale,
                       std::optional<std::uint64_t> start = std::nullopt,
                       std::optional<std::uint64_t> end = std::nullopt);

struct ReportConfig {
  std::vector<Timescale> timescales;
  std::vector<double> eps;
  std::size_t n_boot = 1000;
  std::uint64_t seed = 0;
  std::optional<double> capacity_bytes_per_s;
  double window_seconds = 10.0;
  std::optional<double> duration_seconds;
  double zero_threshold = kDefaultZeroThreshold;
  double saturation_threshold = kDefaultSaturationThreshold;
};

ReportConfig default_report_config();

/// Seed for one trace, stable under adding or removing other traces.
std::uint64_t trace_seed(std::uint64_t seed, std::string_view trace_id);

/// Full pipeline for one trace. Never throws for statistical failures: those
/// become sections with status "error" and entries in "failures".
Json build_report(const TraceInput& input, const ReportConfig& config);

std::vector<std::string> report_failures(const Json& report);

// Tables derived only from report JSON.
std::string plotdata_csv(const Json& report);
std::string summary_csv(const std::vector<Json>& reports);
std::string billing_scatter_csv(const std::vector<Json>& reports);
Json billing_nrmse_json(const std::vector<Json>& reports);

/// Decimal text of a JSON number exactly as the report JSON prints it;
/// empty for NaN/inf.
std::string format_number(double x);

}  // namespace trafficfit
