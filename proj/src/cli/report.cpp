#include "trafficfit/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "trafficfit/billing.hpp"
#include "trafficfit/corrgof.hpp"
#include "trafficfit/error.hpp"
#include "trafficfit/fitcompare.hpp"
#include "trafficfit/provisioning.hpp"
#include "trafficfit/rng.hpp"
#include "trafficfit/stationarity.hpp"

namespace trafficfit {
namespace fs = std::filesystem;

Timescale parse_timescale(std::string_view text) {
  std::size_t unit_at = 0;
  while (unit_at < text.size() &&
         (std::isdigit(static_cast<unsigned char>(text[unit_at])) || text[unit_at] == '.')) {
    ++unit_at;
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + unit_at, value);
  if (unit_at == 0 || ec != std::errc() || ptr != text.data() + unit_at) {
    fail(ErrorCode::Parse, "malformed timescale '" + std::string(text) + "'");
  }
  const std::string_view unit = text.substr(unit_at);
  double ns_per_unit = 0.0;
  if (unit.empty() || unit == "s") {
    ns_per_unit = 1e9;
  } else if (unit == "ms") {
    ns_per_unit = 1e6;
  } else if (unit == "us") {
    ns_per_unit = 1e3;
  } else if (unit == "ns") {
    ns_per_unit = 1.0;
  } else {
    fail(ErrorCode::Parse, "unknown timescale unit in '" + std::string(text) + "'");
  }
  const double ns = value * ns_per_unit;
  if (!(ns >= 1.0) || ns > 1e15) fail(ErrorCode::Parse, "timescale out of range: " + std::string(text));
  return Timescale(std::llround(ns));
}

std::string timescale_label(Timescale t) {
  const auto ns = t.count();
  if (ns % 1'000'000'000 == 0) return std::to_string(ns / 1'000'000'000) + "s";
  if (ns % 1'000'000 == 0) return std::to_string(ns / 1'000'000) + "ms";
  if (ns % 1'000 == 0) return std::to_string(ns / 1'000) + "us";
  return std::to_string(ns) + "ns";
}

std::string format_number(double x) {
  if (!std::isfinite(x)) return {};
  return Json(x).dump();
}

TraceInput load_trace(const fs::path& path) {
  if (!fs::is_regular_file(path)) fail(ErrorCode::Io, "cannot read " + path.string());
  TraceInput input;
  input.id = path.stem().string();
  input.file_name = path.filename().string();
  if (fs::exists(sidecar_path(path))) {
    input.data = read_volume_series(path);
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
    auto records = parse_packet_csv(in);
    if (records.empty()) fail(ErrorCode::NoData, "no data in " + path.string());
    input.data = std::move(records);
  }
  return input;
}

std::vector<fs::path> expand_inputs(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> out;
  for (const auto& p : inputs) {
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") out.push_back(entry.path());
      }
    } else {
      out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

VolumeSeries series_at(const TraceInput& input, Timescale timescale,
                       std::optional<std::uint64_t> start, std::optional<std::uint64_t> end) {
  if (const auto* records = std::get_if<std::vector<PacketRecord>>(&input.data)) {
    return aggregate(*records, timescale, start, end);
  }
  const auto& series = std::get<VolumeSeries>(input.data);
  const auto base = series.timescale.count();
  if (timescale.count() % base != 0) {
    fail(ErrorCode::Precondition, "input is binned at " + timescale_label(series.timescale) +
                                      "; " + timescale_label(timescale) + " is not a multiple of it");
  }
  const auto factor = static_cast<std::size_t>(timescale.count() / base);
  return factor == 1 ? series : rebin(series, factor);
}

ReportConfig default_report_config() {
  using namespace std::chrono_literals;
  ReportConfig c;
  c.timescales = {5ms, 100ms, 500ms, 1s, 5s};
  c.eps = {0.5, 0.1, 0.05, 0.01};
  return c;
}

std::uint64_t trace_seed(std::uint64_t seed, std::string_view trace_id) {
  // FNV-1a; std::hash is not stable across standard libraries.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : trace_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(seed, h);
}

namespace {

Json ok_section(const Json& payload = Json::object()) {
  Json j{{"status", "ok"}};
  for (const auto& [k, v] : payload.items()) j[k] = v;
  return j;
}

Json skipped_section(const std::string& reason) {
  return Json{{"status", "skipped"}, {"reason", reason}};
}

Json error_section(const std::string& reason) {
  return Json{{"status", "error"}, {"reason", reason}};
}

bool is_ok(const Json& section) {
  return section.is_object() && section.value("status", "") == "ok";
}

// Runs `body`, turning library errors into an error section and a failure entry.
template <class F>
Json guarded(std::vector<std::string>& failures, const std::string& where, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    failures.push_back(where + ": " + e.what());
    return error_section(e.what());
  }
}

Json config_json(const ReportConfig& c) {
  Json timescales = Json::array();
  for (auto t : c.timescales) timescales.push_back(seconds(t));
  Json j;
  j["timescales_t"] = timescales;
  j["eps"] = c.eps;
  j["n_boot"] = c.n_boot;
  j["seed"] = c.seed;
  j["capacity_bytes_per_s"] = c.capacity_bytes_per_s ? Json(*c.capacity_bytes_per_s) : Json(nullptr);
  j["window_seconds"] = c.window_seconds;
  j["duration_seconds"] = c.duration_seconds ? Json(*c.duration_seconds) : Json(nullptr);
  j["anomaly_thresholds"] = Json{{"zero", c.zero_threshold}, {"saturated", c.saturation_threshold}};
  return j;
}

Json anomaly_json(const VolumeSeries& series, const ReportConfig& c) {
  const double per_bin = c.capacity_bytes_per_s
                             ? *c.capacity_bytes_per_s * seconds(series.timescale)
                             : std::numeric_limits<double>::infinity();
  const AnomalyScreen screen =
      anomaly_screen(series, per_bin, c.zero_threshold, c.saturation_threshold);
  Json j = to_json(screen);
  j["capacity_bytes_per_bin"] = std::isfinite(per_bin) ? Json(per_bin) : Json(nullptr);
  return ok_section(j);
}

constexpr Family kProvisioningFamilies[] = {Family::LogNormal, Family::Weibull, Family::Gaussian,
                                            Family::Exponential};

struct TimescaleOutcome {
  Json entry;
  std::optional<double> lognormal_gamma;
};

TimescaleOutcome timescale_entry(const TraceInput& input, Timescale t,
                                 std::optional<std::uint64_t> start,
                                 std::optional<std::uint64_t> end, const ReportConfig& c,
                                 std::uint64_t seed, std::vector<std::string>& failures) {
  const std::string where = timescale_label(t);
  TimescaleOutcome out;
  Json& e = out.entry;
  e["timescale_t"] = seconds(t);
  e["label"] = where;

  VolumeSeries series;
  try {
    series = series_at(input, t, start, end);
  } catch (const Error& err) {
    // Timescales the input cannot provide are skipped, not failed.
    e["status"] = "skipped";
    e["reason"] = err.what();
    return out;
  }
  e["status"] = "ok";
  e["n_bins"] = series.size();
  const std::vector<double> samples = series.as_doubles();

  e["anomaly"] = guarded(failures, where + "/anomaly", [&] { return anomaly_json(series, c); });

  FittedModels fits;
  Json fits_json = Json::object();
  for (Family f : kAllFamilies) {
    const std::string name(to_string(f));
    fits_json[name] = guarded(failures, where + "/fit/" + name, [&] {
      auto [it, inserted] = fits.insert_or_assign(f, fit(f, samples));
      return ok_section(to_json(it->second));
    });
  }
  e["fits"] = fits_json;

  const bool can_adjudicate = fits.count(Family::LogNormal) && fits.count(Family::Exponential) &&
                              fits.count(Family::Weibull) && fits.count(Family::PowerLaw);
  if (!can_adjudicate) {
    e["adjudication"] = skipped_section("a required fit failed");
  } else {
    e["adjudication"] = guarded(failures, where + "/adjudication", [&] {
      AdjudicationOptions opts;
      opts.n_boot = c.n_boot;
      opts.seed = derive_seed(seed, static_cast<std::uint64_t>(t.count()));
      return ok_section(to_json(adjudicate(samples, fits, opts)));
    });
  }

  Json gammas = Json::object();
  for (Family f : kAllFamilies) {
    const std::string name(to_string(f));
    const auto it = fits.find(f);
    if (it == fits.end()) {
      gammas[name] = skipped_section("fit failed");
      continue;
    }
    gammas[name] = guarded(failures, where + "/gamma/" + name, [&] {
      const GammaResult g = gamma(samples, it->second, t);
      if (f == Family::LogNormal) out.lognormal_gamma = g.gamma;
      return ok_section(Json{{"gamma", g.gamma}, {"strong_fit", g.strong_fit}});
    });
  }
  e["gamma"] = gammas;

  e["stationarity"] = guarded(failures, where + "/stationarity",
                              [&] { return ok_section(to_json(classify(samples))); });

  Json results = Json::array();
  Json skipped = Json::array();
  std::vector<CapacityMethod> methods{MeentMethod{}};
  for (Family f : kProvisioningFamilies) {
    if (fits.count(f)) {
      methods.push_back(ModelQuantileMethod{f});
    } else {
      skipped.push_back(Json{{"method", to_string(f)}, {"reason", "fit failed"}});
    }
  }
  e["provisioning"] = guarded(failures, where + "/provisioning", [&] {
    for (double eps : c.eps) {
      for (const auto& r : evaluate(series, eps, methods)) results.push_back(to_json(r));
    }
    Json payload{{"results", results}};
    if (!skipped.empty()) payload["skipped_methods"] = skipped;
    return ok_section(payload);
  });
  return out;
}

Json billing_json(const TraceInput& input, std::optional<std::uint64_t> start,
                  std::optional<std::uint64_t> end, const ReportConfig& c) {
  const double w = c.window_seconds;
  const auto window = Timescale(std::llround(w * 1e9));
  VolumeSeries series;
  try {
    series = series_at(input, window, start, end);
  } catch (const Error& err) {
    return skipped_section(err.what());
  }
  const BillingWindows windows = make_windows(series, w, input.id);
  if (windows.window_volumes.size() < kMinBillingWindows) {
    return skipped_section("only " + std::to_string(windows.window_volumes.size()) +
                           " billing windows; need 20");
  }
  BillingPrediction p;
  p.trace_id = input.id;
  p.actual_p95 = empirical_p95(windows);
  for (Family f : kBillingFamilies) {
    p.predicted_p95[f] = predicted_p95(fit(f, windows.window_volumes).model, w);
  }
  Json j = to_json(p);
  j.erase("trace_id");
  Json payload{{"window_seconds", w}, {"n_windows", windows.window_volumes.size()}};
  for (const auto& [k, v] : j.items()) payload[k] = v;
  return ok_section(payload);
}

}  // namespace

Json build_report(const TraceInput& input, const ReportConfig& c) {
  std::vector<std::string> failures;
  const std::uint64_t seed = trace_seed(c.seed, input.id);

  // One origin for every timescale so bins nest across timescales.
  std::optional<std::uint64_t> start;
  std::optional<std::uint64_t> end;
  if (const auto* records = std::get_if<std::vector<PacketRecord>>(&input.data)) {
    const auto coarsest = std::max_element(c.timescales.begin(), c.timescales.end());
    const auto width = static_cast<std::uint64_t>(coarsest == c.timescales.end()
                                                      ? 1
                                                      : coarsest->count());
    std::uint64_t first = records->front().timestamp_ns;
    for (const auto& r : *records) first = std::min(first, r.timestamp_ns);
    start = first / width * width;
    if (c.duration_seconds) {
      end = *start + static_cast<std::uint64_t>(std::llround(*c.duration_seconds * 1e9));
    }
  }

  Json report;
  report["schema_version"] = kReportSchemaVersion;
  report["toolkit_version"] = kToolkitVersion;
  report["trace_id"] = input.id;
  report["config"] = config_json(c);
  Json in{{"file", input.file_name}, {"kind", input.is_packets() ? "packets" : "volumes"}};
  if (input.is_packets()) {
    in["records"] = std::get<std::vector<PacketRecord>>(input.data).size();
    in["start_ns"] = *start;
  } else {
    const auto& s = std::get<VolumeSeries>(input.data);
    in["timescale_t"] = seconds(s.timescale);
    in["start_ns"] = s.start_ns;
    in["n_bins"] = s.size();
  }
  report["input"] = in;

  std::vector<Timescale> order = c.timescales;
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  Json entries = Json::array();
  std::map<Timescale, double> lognormal_gammas;
  for (Timescale t : order) {
    auto outcome = timescale_entry(input, t, start, end, c, seed, failures);
    if (outcome.lognormal_gamma) lognormal_gammas[t] = *outcome.lognormal_gamma;
    entries.push_back(std::move(outcome.entry));
  }

  // Trace-level screen at the finest timescale the input provides.
  report["anomaly"] = skipped_section("no timescale could be derived from the input");
  for (const auto& e : entries) {
    if (e.at("status") == "ok" && e.contains("anomaly")) {
      Json a = e.at("anomaly");
      if (is_ok(a)) {
        Json screened{{"status", "ok"}, {"timescale_t", e.at("timescale_t")}};
        for (const auto& [k, v] : a.items()) {
          if (k != "status") screened[k] = v;
        }
        a = screened;
      }
      report["anomaly"] = a;
      break;
    }
  }
  report["timescales"] = entries;

  std::vector<double> study;
  std::string missing;
  for (StudyTimescale st : kStudyTimescales) {
    const auto it = lognormal_gammas.find(duration(st));
    if (it == lognormal_gammas.end()) {
      missing += (missing.empty() ? "" : ", ") + std::string(label(st));
    } else {
      study.push_back(it->second);
    }
  }
  if (!missing.empty()) {
    report["variation"] = skipped_section("no log-normal gamma at " + missing);
  } else {
    Json g = Json::object();
    for (std::size_t i = 0; i < kStudyTimescales.size(); ++i) {
      g[std::string(label(kStudyTimescales[i]))] = study[i];
    }
    report["variation"] =
        ok_section(Json{{"family", "lognormal"}, {"upsilon", upsilon(study)}, {"gammas", g}});
  }

  report["billing"] = guarded(failures, "billing", [&] { return billing_json(input, start, end, c); });
  report["failures"] = failures;
  return report;
}

std::vector<std::string> report_failures(const Json& report) {
  return report.at("failures").get<std::vector<std::string>>();
}

namespace {

std::string csv_num(const Json& v) {
  if (v.is_number()) return v.dump();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  return {};
}

void row(std::string& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out += ',';
    out += f;
    first = false;
  }
  out += '\n';
}

}  // namespace

std::string plotdata_csv(const Json& report) {
  std::string out = "trace_id,panel,series,timescale_t,x,y\n";
  const std::string id = report.at("trace_id").get<std::string>();
  for (const auto& e : report.at("timescales")) {
    if (e.at("status") != "ok") continue;
    const std::string t = csv_num(e.at("timescale_t"));
    for (const auto& [family, g] : e.at("gamma").items()) {
      if (is_ok(g)) row(out, {id, "gamma", family, t, t, csv_num(g.at("gamma"))});
    }
    if (is_ok(e.at("adjudication"))) {
      for (const auto& [alt, cmp] : e.at("adjudication").at("comparisons").items()) {
        row(out, {id, "llr", alt, t, t, csv_num(cmp.at("r_norm"))});
      }
    }
    if (is_ok(e.at("provisioning"))) {
      for (const auto& r : e.at("provisioning").at("results")) {
        const std::string method = r.at("method").get<std::string>();
        const std::string target = csv_num(r.at("target_eps"));
        row(out, {id, "eps_hat", method, t, target, csv_num(r.at("eps_hat"))});
        row(out, {id, "capacity", method, t, target, csv_num(r.at("capacity_bytes_per_s"))});
      }
    }
  }
  const Json& billing = report.at("billing");
  if (is_ok(billing)) {
    const std::string actual = csv_num(billing.at("actual_p95"));
    for (const auto& [family, v] : billing.at("predicted_p95").items()) {
      row(out, {id, "billing", family, "", actual, csv_num(v)});
    }
  }
  return out;
}

std::string summary_csv(const std::vector<Json>& reports) {
  std::string out =
      "trace_id,timescale_t,target_eps,method,capacity_bytes_per_s,capacity_mbps,eps_hat,"
      "lognormal_gamma,"
      "gof_p_value,gof_accepted,classification,anomaly_flagged,trace_failures\n";
  for (const auto& r : reports) {
    const std::string id = r.at("trace_id").get<std::string>();
    const std::string flagged =
        is_ok(r.at("anomaly")) ? csv_num(r.at("anomaly").at("flagged")) : std::string();
    const std::string n_failures = std::to_string(r.at("failures").size());
    bool any = false;
    for (const auto& e : r.at("timescales")) {
      if (e.at("status") != "ok" || !is_ok(e.at("provisioning"))) continue;
      const std::string t = csv_num(e.at("timescale_t"));
      const Json& g = e.at("gamma").at("lognormal");
      const std::string gamma = is_ok(g) ? csv_num(g.at("gamma")) : std::string();
      const Json& adj = e.at("adjudication");
      const std::string gof_p = is_ok(adj) ? csv_num(adj.at("gof").at("p_value")) : std::string();
      const std::string gof_acc = is_ok(adj) ? csv_num(adj.at("gof").at("accepted")) : std::string();
      const Json& st = e.at("stationarity");
      const std::string cls = is_ok(st) ? csv_num(st.at("classification")) : std::string();
      for (const auto& p : e.at("provisioning").at("results")) {
        const double capacity = p.at("capacity_bytes_per_s").get<double>();
        row(out, {id, t, csv_num(p.at("target_eps")), csv_num(p.at("method")),
                  csv_num(p.at("capacity_bytes_per_s")), format_number(capacity * 8.0 / 1e6),
                  csv_num(p.at("eps_hat")), gamma, gof_p, gof_acc, cls, flagged, n_failures});
        any = true;
      }
    }
    // Traces with nothing to provision still get a row so failures stay visible.
    if (!any) row(out, {id, "", "", "", "", "", "", "", "", "", "", flagged, n_failures});
  }
  return out;
}

std::string billing_scatter_csv(const std::vector<Json>& reports) {
  std::string out = "trace_id,actual_p95,lognormal_p95,weibull_p95,gaussian_p95\n";
  for (const auto& r : reports) {
    const Json& b = r.at("billing");
    if (!is_ok(b)) continue;
    const Json& p = b.at("predicted_p95");
    row(out, {r.at("trace_id").get<std::string>(), csv_num(b.at("actual_p95")),
              csv_num(p.at("lognormal")), csv_num(p.at("weibull")), csv_num(p.at("gaussian"))});
  }
  return out;
}

Json billing_nrmse_json(const std::vector<Json>& reports) {
  std::vector<double> actual;
  std::map<Family, std::vector<double>> predicted;
  for (const auto& r : reports) {
    const Json& b = r.at("billing");
    if (!is_ok(b)) continue;
    actual.push_back(b.at("actual_p95").get<double>());
    for (Family f : kBillingFamilies) {
      predicted[f].push_back(b.at("predicted_p95").at(std::string(to_string(f))).get<double>());
    }
  }
  if (actual.empty()) return Json(nullptr);
  std::map<Family, double> table;
  for (Family f : kBillingFamilies) table[f] = nrmse(actual, predicted[f]);
  return nrmse_table_json(table);
}

}  // namespace trafficfit
