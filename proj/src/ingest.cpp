#include "trafficfit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "trafficfit/error.hpp"
#include "trafficfit/kernels.hpp"

namespace trafficfit {
namespace {

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool parse_u64(std::string_view field, std::uint64_t& out) {
  if (field.empty()) return false;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool looks_numeric(std::string_view field) {
  return !field.empty() && std::all_of(field.begin(), field.end(),
                                       [](char c) { return c >= '0' && c <= '9'; });
}

// Calls fn(line_number, line) for each line, CR stripped.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    fn(++line_no, strip_cr(line));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::uint64_t VolumeSeries::total_bytes() const {
  std::uint64_t total = 0;
  for (auto v : volumes) total += v;
  return total;
}

std::vector<double> VolumeSeries::as_doubles() const {
  return {volumes.begin(), volumes.end()};
}

std::vector<PacketRecord> parse_packet_csv(std::string_view text) {
  std::vector<PacketRecord> records;
  bool first_content_line = true;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    const auto comma = line.find(',');
    const auto ts_field = line.substr(0, comma);
    if (first_content_line) {
      first_content_line = false;
      if (!looks_numeric(ts_field)) return;  // header
    }
    if (comma == std::string_view::npos) throw ParseError(line_no, "expected timestamp_ns,bytes");
    const auto size_field = line.substr(comma + 1);
    PacketRecord r;
    if (!parse_u64(ts_field, r.timestamp_ns)) {
      throw ParseError(line_no, "malformed timestamp '" + std::string(ts_field) + "'");
    }
    if (!parse_u64(size_field, r.bytes)) {
      throw ParseError(line_no, "malformed size '" + std::string(size_field) + "'");
    }
    if (r.bytes == 0) throw ParseError(line_no, "packet size must be at least 1 byte");
    records.push_back(r);
  });
  return records;
}

std::vector<PacketRecord> parse_packet_csv(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_packet_csv(buf.str());
}

VolumeSeries aggregate(std::span<const PacketRecord> records, Timescale timescale,
                       std::optional<std::uint64_t> start, std::optional<std::uint64_t> end) {
  if (records.empty()) fail(ErrorCode::NoData, "no data");
  if (timescale.count() <= 0) fail(ErrorCode::Precondition, "timescale must be positive");
  const auto width = static_cast<std::uint64_t>(timescale.count());

  const auto [min_it, max_it] = std::minmax_element(
      records.begin(), records.end(),
      [](const PacketRecord& a, const PacketRecord& b) { return a.timestamp_ns < b.timestamp_ns; });
  const std::uint64_t origin = start.value_or(min_it->timestamp_ns / width * width);

  std::uint64_t bins = 0;
  if (end) {
    if (*end <= origin) fail(ErrorCode::Precondition, "end must be after start");
    bins = (*end - origin) / width;
  } else if (max_it->timestamp_ns >= origin) {
    bins = (max_it->timestamp_ns - origin) / width + 1;
  }
  if (bins == 0) fail(ErrorCode::NoData, "no data: window holds no complete bin");

  VolumeSeries series{timescale, origin, std::vector<std::uint64_t>(bins, 0)};
  for (const auto& r : records) {
    if (r.timestamp_ns < origin) continue;
    const std::uint64_t bin = (r.timestamp_ns - origin) / width;
    if (bin < bins) series.volumes[bin] += r.bytes;
  }
  return series;
}

VolumeSeries rebin(const VolumeSeries& series, std::size_t factor) {
  if (factor == 0) fail(ErrorCode::Precondition, "rebin factor must be positive");
  const std::size_t groups = series.size() / factor;
  if (groups == 0) fail(ErrorCode::NoData, "no data: series shorter than one rebinned bin");
  VolumeSeries out{series.timescale * static_cast<long>(factor), series.start_ns,
                   std::vector<std::uint64_t>(groups, 0)};
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t j = 0; j < factor; ++j) out.volumes[g] += series.volumes[g * factor + j];
  }
  return out;
}

AnomalyScreen anomaly_screen(const VolumeSeries& series, double capacity_bytes_per_bin,
                             double zero_threshold, double saturation_threshold) {
  if (series.volumes.empty()) fail(ErrorCode::NoData, "no data");
  if (!(capacity_bytes_per_bin > 0.0)) fail(ErrorCode::Precondition, "capacity must be positive");
  if (!(zero_threshold > 0.0 && zero_threshold < 1.0) ||
      !(saturation_threshold > 0.0 && saturation_threshold < 1.0)) {
    fail(ErrorCode::Precondition, "anomaly thresholds must lie in (0, 1)");
  }
  const auto n = static_cast<double>(series.size());
  const std::size_t nonzero = kernels::count_at_least(std::span(series.volumes), 1);
  // Integer volumes: v >= c  <=>  v >= ceil(c).
  const double ceil_cap = std::ceil(capacity_bytes_per_bin);
  const std::size_t saturated =
      ceil_cap >= 0x1.0p64 ? 0
                           : kernels::count_at_least(std::span(series.volumes),
                                                     static_cast<std::uint64_t>(ceil_cap));
  AnomalyScreen screen;
  screen.frac_zero = static_cast<double>(series.size() - nonzero) / n;
  screen.frac_saturated = static_cast<double>(saturated) / n;
  screen.flagged = screen.frac_zero >= zero_threshold || screen.frac_saturated >= saturation_threshold;
  return screen;
}

std::string volume_csv(const VolumeSeries& series) {
  std::string out = "bin_index,bytes\n";
  out.reserve(out.size() + series.size() * 16);
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(series.volumes[i]);
    out += '\n';
  }
  return out;
}

std::string volume_metadata_json(const VolumeSeries& series) {
  nlohmann::ordered_json meta;
  meta["timescale_t_seconds"] = seconds(series.timescale);
  meta["start_ns"] = series.start_ns;
  meta["n"] = series.size();
  return meta.dump(2) + "\n";
}

VolumeSeries parse_volume_csv(std::string_view csv, std::string_view metadata_json) {
  VolumeSeries series;
  std::size_t expected = 0;
  try {
    const auto meta = nlohmann::json::parse(metadata_json);
    const double t = meta.at("timescale_t_seconds").get<double>();
    if (!(t > 0.0)) fail(ErrorCode::Parse, "timescale_t_seconds must be positive");
    series.timescale = Timescale(std::llround(t * 1e9));
    series.start_ns = meta.at("start_ns").get<std::uint64_t>();
    expected = meta.at("n").get<std::size_t>();
    series.volumes.reserve(expected);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("volume metadata: ") + e.what());
  }

  bool first_content_line = true;
  for_each_line(csv, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    const auto comma = line.find(',');
    const auto idx_field = line.substr(0, comma);
    if (first_content_line) {
      first_content_line = false;
      if (!looks_numeric(idx_field)) return;
    }
    if (comma == std::string_view::npos) throw ParseError(line_no, "expected bin_index,bytes");
    std::uint64_t idx = 0;
    std::uint64_t bytes = 0;
    if (!parse_u64(idx_field, idx) || idx != series.volumes.size()) {
      throw ParseError(line_no, "bin_index out of sequence");
    }
    if (!parse_u64(line.substr(comma + 1), bytes)) throw ParseError(line_no, "malformed bytes");
    series.volumes.push_back(bytes);
  });
  if (series.volumes.size() != expected) {
    fail(ErrorCode::Parse, "volume CSV has " + std::to_string(series.volumes.size()) +
                               " rows but metadata says n=" + std::to_string(expected));
  }
  if (series.volumes.empty()) fail(ErrorCode::NoData, "no data");
  return series;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_volume_series(const VolumeSeries& series, const std::filesystem::path& csv_path) {
  std::ofstream csv(csv_path, std::ios::binary);
  std::ofstream meta(sidecar_path(csv_path), std::ios::binary);
  if (!csv || !meta) fail(ErrorCode::Io, "cannot write " + csv_path.string());
  csv << volume_csv(series);
  meta << volume_metadata_json(series);
}

VolumeSeries read_volume_series(const std::filesystem::path& csv_path) {
  return parse_volume_csv(read_file(csv_path), read_file(sidecar_path(csv_path)));
}

}  // namespace trafficfit
