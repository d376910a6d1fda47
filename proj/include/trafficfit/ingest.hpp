#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trafficfit {

using Timescale = std::chrono::nanoseconds;

/// Seconds as a double, for formulas expressed per second.
inline double seconds(Timescale t) {
  return std::chrono::duration<double>(t).count();
}

struct PacketRecord {
  std::uint64_t timestamp_ns = 0;
  std::uint64_t bytes = 0;

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

/// Traffic volume per fixed-width bin: bin i covers
/// [start_ns + i*T, start_ns + (i+1)*T).
struct VolumeSeries {
  Timescale timescale{};
  std::uint64_t start_ns = 0;
  std::vector<std::uint64_t> volumes;

  std::size_t size() const { return volumes.size(); }
  std::uint64_t total_bytes() const;
  std::vector<double> as_doubles() const;
};

struct AnomalyScreen {
  double frac_zero = 0.0;
  double frac_saturated = 0.0;
  bool flagged = false;
};

inline constexpr double kDefaultZeroThreshold = 0.05;
inline constexpr double kDefaultSaturationThreshold = 0.05;

/// Parses `timestamp_ns,bytes` lines (LF or CRLF). A first line whose first
/// field is non-numeric is treated as a header. Throws ParseError.
std::vector<PacketRecord> parse_packet_csv(std::string_view text);
std::vector<PacketRecord> parse_packet_csv(std::istream& in);

/// Credits each packet to the bin containing its timestamp.
///
/// Without `start` the series begins at the earliest timestamp rounded down to
/// a multiple of T. Without `end` it runs through the bin holding the latest
/// packet. With an exclusive `end`, only whole bins before it are kept and the
/// trailing partial bin is dropped. Packets outside the covered window are
/// ignored.
VolumeSeries aggregate(std::span<const PacketRecord> records, Timescale timescale,
                       std::optional<std::uint64_t> start = std::nullopt,
                       std::optional<std::uint64_t> end = std::nullopt);

/// Sums `factor` adjacent bins; a trailing incomplete group is dropped.
VolumeSeries rebin(const VolumeSeries& series, std::size_t factor);

AnomalyScreen anomaly_screen(const VolumeSeries& series, double capacity_bytes_per_bin,
                             double zero_threshold = kDefaultZeroThreshold,
                             double saturation_threshold = kDefaultSaturationThreshold);

// Volume-series files: `bin_index,bytes` CSV plus a JSON sidecar carrying
// {timescale_t_seconds, start_ns, n}.
std::string volume_csv(const VolumeSeries& series);
std::string volume_metadata_json(const VolumeSeries& series);
VolumeSeries parse_volume_csv(std::string_view csv, std::string_view metadata_json);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);
void write_volume_series(const VolumeSeries& series, const std::filesystem::path& csv_path);
VolumeSeries read_volume_series(const std::filesystem::path& csv_path);

}  // namespace trafficfit
