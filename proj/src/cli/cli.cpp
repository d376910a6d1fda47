#include "trafficfit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "trafficfit/billing.hpp"
#include "trafficfit/corrgof.hpp"
#include "trafficfit/error.hpp"
#include "trafficfit/fitcompare.hpp"
#include "trafficfit/provisioning.hpp"
#include "trafficfit/report.hpp"
#include "trafficfit/rng.hpp"
#include "trafficfit/stationarity.hpp"
#include "trafficfit/synth.hpp"

namespace trafficfit::cli {
namespace {
namespace fs = std::filesystem;

// Bad flags, bad flag combinations, unreadable inputs: exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> inputs;
  std::vector<std::string> timescales;
  std::vector<double> eps;
  std::size_t n_boot = kDefaultBootstrapReplicates;
  std::uint64_t seed = 0;
  std::optional<double> capacity;
  double window_seconds = 10.0;
  std::optional<double> duration;
  std::string out;
  std::string format = "json";
  unsigned workers = 1;

  std::vector<std::string> families;
  std::vector<std::string> alternatives;
  std::vector<std::string> methods;

  // synth
  std::string kind = "lognormal";
  std::size_t n = 9000;
  std::optional<double> mu, sigma, rate, p_low, p_high, step_sigma, floor;
  std::string segments;
};

Timescale checked_timescale(const std::string& text) {
  Timescale t;
  try {
    t = parse_timescale(text);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (t < kMinCliTimescale || t > kMaxCliTimescale) {
    throw ConfigError("timescale " + text + " outside [1ms, 60s]");
  }
  return t;
}

std::optional<Timescale> single_timescale(const Options& o) {
  if (o.timescales.empty()) return std::nullopt;
  if (o.timescales.size() > 1) throw ConfigError("this command takes a single --timescale");
  return checked_timescale(o.timescales.front());
}

std::vector<double> checked_eps(const Options& o) {
  std::vector<double> eps = o.eps.empty() ? default_report_config().eps : o.eps;
  for (double e : eps) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("--eps must lie in (0, 1), got " + format_number(e));
  }
  return eps;
}

void check_n_boot(const Options& o) {
  if (o.n_boot < kMinBootstrapReplicates) throw ConfigError("--n-boot must be at least 100");
}

Family checked_family(const std::string& name) {
  const auto f = family_from_string(name);
  if (!f) throw ConfigError("unknown family '" + name + "'");
  return *f;
}

TraceInput load(const fs::path& path) {
  try {
    return load_trace(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

TraceInput single_input(const Options& o) {
  const auto paths = expand_inputs({o.inputs.begin(), o.inputs.end()});
  if (paths.size() != 1) throw ConfigError("this command takes exactly one --input file");
  return load(paths.front());
}

// Series for the single-series commands: packets need an explicit timescale.
VolumeSeries input_series(const TraceInput& input, const Options& o) {
  const auto t = single_timescale(o);
  if (!t) {
    if (input.is_packets()) throw ConfigError("--timescale is required for packet input");
    return std::get<VolumeSeries>(input.data);
  }
  std::optional<std::uint64_t> end;
  if (o.duration && input.is_packets()) {
    const auto& records = std::get<std::vector<PacketRecord>>(input.data);
    std::uint64_t first = records.front().timestamp_ns;
    for (const auto& r : records) first = std::min(first, r.timestamp_ns);
    const auto width = static_cast<std::uint64_t>(t->count());
    end = first / width * width + static_cast<std::uint64_t>(std::llround(*o.duration * 1e9));
  }
  try {
    return series_at(input, *t, std::nullopt, end);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

void check_format(const Options& o) {
  if (o.format != "json" && o.format != "csv") throw ConfigError("--format must be json or csv");
}

void emit(const std::string& text, const Options& o, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + o.out);
  f << text;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_line(std::initializer_list<std::string> fields) {
  std::string s;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) s += ',';
    s += f;
    first = false;
  }
  return s + "\n";
}

Json series_json(const VolumeSeries& s) {
  return Json{{"timescale_t_seconds", seconds(s.timescale)},
              {"start_ns", s.start_ns},
              {"n", s.size()},
              {"volumes", s.volumes}};
}

void emit_series(const VolumeSeries& s, const Options& o, std::ostream& out) {
  if (o.format == "json") {
    emit(dump(series_json(s)), o, out);
  } else if (o.out.empty()) {
    out << volume_csv(s);
  } else {
    write_volume_series(s, o.out);
  }
}

int cmd_aggregate(const Options& o, std::ostream& out) {
  check_format(o);
  if (o.timescales.empty()) throw ConfigError("aggregate needs --timescale");
  const TraceInput input = single_input(o);
  emit_series(input_series(input, o), o, out);
  return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
  check_format(o);
  std::vector<Family> families;
  for (const auto& f : o.families) families.push_back(checked_family(f));
  if (families.empty()) families.assign(std::begin(kAllFamilies), std::end(kAllFamilies));
  const TraceInput input = single_input(o);
  const VolumeSeries series = input_series(input, o);
  const auto samples = series.as_doubles();

  int status = kExitOk;
  Json fits = Json::array();
  std::string csv = "family,status,mu,sigma,k,lambda,rate,alpha,xmin,loglik,n\n";
  for (Family f : families) {
    const std::string name(to_string(f));
    try {
      const DistFit d = fit(f, samples);
      const Json j = to_json(d);
      fits.push_back(j);
      const Json& p = j.at("params");
      const auto param = [&p](const char* key) {
        return p.contains(key) ? format_number(p.at(key).get<double>()) : std::string();
      };
      csv += csv_line({name, "ok", param("mu"), param("sigma"), param("k"), param("lambda"),
                       param("rate"), param("alpha"), d.xmin ? format_number(*d.xmin) : "",
                       format_number(d.loglik), std::to_string(d.n)});
    } catch (const Error& e) {
      err << "trafficfit: " << input.id << ": " << name << ": " << e.what() << "\n";
      fits.push_back(Json{{"family", name}, {"status", "error"}, {"reason", e.what()}});
      csv += csv_line({name, "error", "", "", "", "", "", "", "", "", ""});
      status = kExitTraceFailure;
    }
  }
  if (o.format == "json") {
    emit(dump(Json{{"trace_id", input.id}, {"timescale_t", seconds(series.timescale)}, {"fits", fits}}),
         o, out);
  } else {
    emit(csv, o, out);
  }
  return status;
}

int cmd_compare(const Options& o, std::ostream& out) {
  check_format(o);
  check_n_boot(o);
  std::vector<Family> alternatives;
  for (const auto& a : o.alternatives) {
    const Family f = checked_family(a);
    if (f == Family::LogNormal || f == Family::Gaussian) {
      throw ConfigError("--alternative must be exponential, weibull or power_law");
    }
    alternatives.push_back(f);
  }
  const TraceInput input = single_input(o);
  const VolumeSeries series = input_series(input, o);
  const auto samples = series.as_doubles();
  const std::uint64_t seed = trace_seed(o.seed, input.id);

  Json result;
  if (alternatives.empty()) {
    AdjudicationOptions opts;
    opts.n_boot = o.n_boot;
    opts.seed = derive_seed(seed, static_cast<std::uint64_t>(series.timescale.count()));
    result = to_json(adjudicate(samples, opts));
  } else {
    Json comparisons = Json::object();
    for (Family f : alternatives) comparisons[std::string(to_string(f))] = to_json(llr_compare(samples, f));
    result["comparisons"] = comparisons;
  }

  if (o.format == "json") {
    emit(dump(result), o, out);
    return kExitOk;
  }
  std::string csv = "alternative,r_norm,p_value,verdict,raw_llr,sigma_llr,n\n";
  for (const auto& [alt, c] : result.at("comparisons").items()) {
    csv += csv_line({alt, c.at("r_norm").dump(), c.at("p_value").dump(),
                     c.at("verdict").get<std::string>(), c.at("raw_llr").dump(),
                     c.at("sigma_llr").dump(), c.at("n").dump()});
  }
  if (result.contains("gof")) {
    const Json& g = result.at("gof");
    csv += "\ngof_ks_stat,gof_p_value,gof_n_boot,gof_accepted\n";
    csv += csv_line({g.at("ks_stat").dump(), g.at("p_value").dump(), g.at("n_boot").dump(),
                     g.at("accepted").dump()});
  }
  emit(csv, o, out);
  return kExitOk;
}

int cmd_gamma(const Options& o, std::ostream& out) {
  check_format(o);
  std::vector<Family> families;
  for (const auto& f : o.families) families.push_back(checked_family(f));
  if (families.empty()) families.push_back(Family::LogNormal);
  const TraceInput input = single_input(o);

  std::vector<Timescale> timescales;
  for (const auto& t : o.timescales) timescales.push_back(checked_timescale(t));
  if (timescales.empty()) {
    if (input.is_packets()) {
      for (StudyTimescale st : kStudyTimescales) timescales.push_back(duration(st));
    } else {
      timescales.push_back(std::get<VolumeSeries>(input.data).timescale);
    }
  }
  std::sort(timescales.begin(), timescales.end());
  timescales.erase(std::unique(timescales.begin(), timescales.end()), timescales.end());

  std::optional<std::uint64_t> start;
  if (input.is_packets()) {
    const auto& records = std::get<std::vector<PacketRecord>>(input.data);
    std::uint64_t first = records.front().timestamp_ns;
    for (const auto& r : records) first = std::min(first, r.timestamp_ns);
    const auto width = static_cast<std::uint64_t>(timescales.back().count());
    start = first / width * width;
  }

  Json results = Json::array();
  std::map<Family, std::map<Timescale, double>> by_family;
  std::string csv = "family,timescale_t,gamma,strong_fit\n";
  for (Timescale t : timescales) {
    VolumeSeries series;
    try {
      series = series_at(input, t, start);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    const auto samples = series.as_doubles();
    for (Family f : families) {
      const GammaResult g = gamma(samples, f, t);
      results.push_back(to_json(g));
      by_family[f][t] = g.gamma;
      csv += csv_line({std::string(to_string(f)), format_number(seconds(t)), format_number(g.gamma),
                       g.strong_fit ? "true" : "false"});
    }
  }

  Json doc{{"trace_id", input.id}, {"results", results}};
  Json variation = Json::object();
  for (Family f : families) {
    const auto& m = by_family[f];
    GammaVariation v;
    std::vector<double> values;
    for (StudyTimescale st : kStudyTimescales) {
      const auto it = m.find(duration(st));
      if (it == m.end()) break;
      v.gammas[st] = it->second;
      values.push_back(it->second);
    }
    if (values.size() == kStudyTimescales.size()) {
      v.upsilon = upsilon(values);
      variation[std::string(to_string(f))] = to_json(v);
    }
  }
  if (!variation.empty()) doc["variation"] = variation;
  emit(o.format == "json" ? dump(doc) : csv, o, out);
  return kExitOk;
}

int cmd_stationarity(const Options& o, std::ostream& out) {
  check_format(o);
  const TraceInput input = single_input(o);
  const VolumeSeries series = input_series(input, o);
  const StationarityReport r = classify(series.as_doubles());
  if (o.format == "json") {
    emit(dump(to_json(r)), o, out);
    return kExitOk;
  }
  std::string csv = "test,stat,p,lags,verdict,p_clamped\n";
  const std::pair<const char*, const UnitRootTestResult*> rows[] = {
      {"adf", &r.adf}, {"pp", &r.pp}, {"kpss", &r.kpss}, {"kpss_diff", &r.kpss_diff}};
  for (const auto& [name, t] : rows) {
    csv += csv_line({name, format_number(t->statistic), format_number(t->p_value),
                     std::to_string(t->lags_or_bandwidth), std::string(to_string(t->verdict)),
                     t->p_clamped ? "true" : "false"});
  }
  csv += "\nclassification\n" + std::string(to_string(r.classification)) + "\n";
  emit(csv, o, out);
  return kExitOk;
}

int cmd_provision(const Options& o, std::ostream& out) {
  check_format(o);
  const auto eps = checked_eps(o);
  std::vector<CapacityMethod> methods;
  for (const auto& m : o.methods) {
    if (m == "meent") {
      methods.push_back(MeentMethod{});
    } else {
      methods.push_back(ModelQuantileMethod{checked_family(m)});
    }
  }
  if (methods.empty()) methods = {MeentMethod{}, ModelQuantileMethod{Family::LogNormal}};
  const TraceInput input = single_input(o);
  const VolumeSeries series = input_series(input, o);

  Json results = Json::array();
  std::string csv = "method,target_eps,capacity_bytes_per_s,capacity_mbps,eps_hat\n";
  for (double e : eps) {
    for (const auto& r : evaluate(series, e, methods)) {
      results.push_back(to_json(r));
      csv += csv_line({method_label(r), format_number(r.target_eps), format_number(r.capacity),
                       format_number(r.capacity * 8.0 / 1e6), format_number(r.eps_hat)});
    }
  }
  emit(o.format == "json"
           ? dump(Json{{"trace_id", input.id}, {"timescale_t", seconds(series.timescale)},
                       {"results", results}})
           : csv,
       o, out);
  return kExitOk;
}

int cmd_bill(const Options& o, std::ostream& out, std::ostream& err) {
  check_format(o);
  if (!(o.window_seconds > 0.0)) throw ConfigError("--window-seconds must be positive");
  const auto paths = expand_inputs({o.inputs.begin(), o.inputs.end()});
  if (paths.empty()) throw ConfigError("bill needs at least one --input");
  const auto window = Timescale(std::llround(o.window_seconds * 1e9));

  std::vector<NamedSeries> traces;
  std::vector<BillingFailure> load_failures;
  for (const auto& p : paths) {
    const TraceInput input = load(p);
    try {
      traces.push_back({input.id, series_at(input, window)});
    } catch (const Error& e) {
      load_failures.push_back({input.id, e.what()});
    }
  }
  BillingStudy study = billing_study(traces, o.window_seconds);
  study.failures.insert(study.failures.begin(), load_failures.begin(), load_failures.end());
  std::sort(study.failures.begin(), study.failures.end(),
            [](const auto& a, const auto& b) { return a.trace_id < b.trace_id; });

  std::string scatter = "trace_id,actual_p95,lognormal_p95,weibull_p95,gaussian_p95\n";
  Json predictions = Json::array();
  for (const auto& p : study.predictions) {
    predictions.push_back(to_json(p));
    scatter += csv_line({p.trace_id, format_number(p.actual_p95),
                         format_number(p.predicted_p95.at(Family::LogNormal)),
                         format_number(p.predicted_p95.at(Family::Weibull)),
                         format_number(p.predicted_p95.at(Family::Gaussian))});
  }
  Json failures = Json::array();
  for (const auto& f : study.failures) {
    failures.push_back(Json{{"trace_id", f.trace_id}, {"reason", f.reason}});
    err << "trafficfit: " << f.trace_id << ": " << f.reason << "\n";
  }
  const Json nrmse =
      study.predictions.empty() ? Json(nullptr) : nrmse_table_json(study.nrmse);
  const Json doc{{"window_seconds", o.window_seconds},
                 {"nrmse", nrmse},
                 {"predictions", predictions},
                 {"failures", failures}};

  if (!o.out.empty() && fs::is_directory(o.out)) {
    write_file(fs::path(o.out) / "billing_scatter.csv", scatter);
    write_file(fs::path(o.out) / "billing_nrmse.json", dump(doc));
  } else {
    emit(o.format == "json" ? dump(doc) : scatter, o, out);
  }
  return study.failures.empty() ? kExitOk : kExitTraceFailure;
}

std::vector<RegimeSegment> parse_segments(const std::string& text) {
  std::vector<RegimeSegment> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    RegimeSegment s;
    char c1 = 0;
    char c2 = 0;
    std::istringstream is(item);
    if (!(is >> s.mu >> c1 >> s.sigma >> c2 >> s.bins) || c1 != ':' || c2 != ':' || !is.eof()) {
      throw ConfigError("malformed --segments entry '" + item + "' (want mu:sigma:bins)");
    }
    out.push_back(s);
  }
  if (out.empty()) throw ConfigError("--segments is empty");
  return out;
}

int cmd_synth(const Options& o, std::ostream& out) {
  check_format(o);
  const auto kind = synth_kind_from_string(o.kind);
  if (!kind) throw ConfigError("unknown --kind '" + o.kind + "'");
  SynthSpec spec;
  spec.n = o.n;
  spec.seed = o.seed;
  if (const auto t = single_timescale(o)) spec.timescale = *t;
  switch (*kind) {
    case SynthKind::LogNormalIID: {
      LogNormalIIDParams p;
      p.mu = o.mu.value_or(p.mu);
      p.sigma = o.sigma.value_or(p.sigma);
      spec.params = p;
      break;
    }
    case SynthKind::GaussianIID: {
      GaussianIIDParams p;
      p.mu = o.mu.value_or(p.mu);
      p.sigma = o.sigma.value_or(p.sigma);
      spec.params = p;
      break;
    }
    case SynthKind::ExponentialIID:
      spec.params = ExponentialIIDParams{o.rate.value_or(ExponentialIIDParams{}.rate)};
      break;
    case SynthKind::BimodalAnomaly: {
      BimodalAnomalyParams p;
      p.p_low = o.p_low.value_or(p.p_low);
      p.p_high = o.p_high.value_or(p.p_high);
      if (o.capacity) p.capacity = *o.capacity * seconds(spec.timescale);
      p.mu = o.mu.value_or(p.mu);
      p.sigma = o.sigma.value_or(p.sigma);
      spec.params = p;
      break;
    }
    case SynthKind::RandomWalk: {
      RandomWalkParams p;
      p.step_sigma = o.step_sigma.value_or(p.step_sigma);
      p.floor = o.floor.value_or(p.floor);
      spec.params = p;
      break;
    }
    case SynthKind::RegimeSchedule: {
      if (o.segments.empty()) throw ConfigError("--kind regime needs --segments");
      RegimeScheduleParams p{parse_segments(o.segments)};
      std::size_t total = 0;
      for (const auto& s : p.segments) total += s.bins;
      spec.n = total;
      spec.params = std::move(p);
      break;
    }
  }
  VolumeSeries series;
  try {
    series = generate(spec);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  emit_series(series, o, out);
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& err) {
  check_n_boot(o);
  if (o.out.empty()) throw ConfigError("report needs --out DIR");
  if (!(o.window_seconds > 0.0)) throw ConfigError("--window-seconds must be positive");
  if (o.workers == 0) throw ConfigError("--workers must be at least 1");
  if (o.duration && !(*o.duration > 0.0)) throw ConfigError("--duration must be positive");
  if (o.capacity && !(*o.capacity > 0.0)) throw ConfigError("--capacity must be positive");

  ReportConfig config = default_report_config();
  if (!o.timescales.empty()) {
    config.timescales.clear();
    for (const auto& t : o.timescales) config.timescales.push_back(checked_timescale(t));
  }
  config.eps = checked_eps(o);
  config.n_boot = o.n_boot;
  config.seed = o.seed;
  config.capacity_bytes_per_s = o.capacity;
  config.window_seconds = o.window_seconds;
  config.duration_seconds = o.duration;

  const auto paths = expand_inputs({o.inputs.begin(), o.inputs.end()});
  if (paths.empty()) throw ConfigError("report needs at least one --input");
  std::vector<TraceInput> inputs;
  std::set<std::string> ids;
  for (const auto& p : paths) {
    inputs.push_back(load(p));
    if (!ids.insert(inputs.back().id).second) {
      throw ConfigError("duplicate trace id '" + inputs.back().id + "'");
    }
  }
  std::sort(inputs.begin(), inputs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (!fs::is_directory(o.out)) throw ConfigError("cannot create output directory " + o.out);

  // Reports land in fixed slots, so output order never depends on scheduling.
  std::vector<Json> reports(inputs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      reports[i] = build_report(inputs[i], config);
    }
  };
  const unsigned n_threads = std::min<std::size_t>(o.workers, inputs.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool any_failure = false;
  const fs::path dir(o.out);
  for (const auto& r : reports) {
    const std::string id = r.at("trace_id").get<std::string>();
    write_file(dir / (id + ".report.json"), dump(r));
    write_file(dir / (id + ".plotdata.csv"), plotdata_csv(r));
    for (const auto& f : report_failures(r)) {
      err << "trafficfit: " << id << ": " << f << "\n";
      any_failure = true;
    }
  }
  write_file(dir / "summary.csv", summary_csv(reports));
  write_file(dir / "billing_scatter.csv", billing_scatter_csv(reports));
  write_file(dir / "billing_nrmse.json", dump(billing_nrmse_json(reports)));
  return any_failure ? kExitTraceFailure : kExitOk;
}

void add_input(CLI::App* sub, Options& o, bool many) {
  auto* opt = sub->add_option("--input,-i", o.inputs, many ? "Trace files or directories" : "Trace file");
  opt->required();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traffic volume modelling toolkit"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(1);
  Options o;

  const auto timescale = [&o](CLI::App* s, bool many) {
    s->add_option("--timescale,-t", o.timescales,
                  many ? "Aggregation timescales, e.g. 5ms 100ms 1s" : "Aggregation timescale");
  };
  const auto common = [&o](CLI::App* s) {
    s->add_option("--out,-o", o.out, "Output path");
    s->add_option("--format", o.format, "json or csv");
    s->add_option("--duration", o.duration, "Trace length in seconds (drops the trailing partial bin)");
  };

  auto* aggregate_cmd = app.add_subcommand("aggregate", "Bin packet records into a volume series");
  add_input(aggregate_cmd, o, false);
  timescale(aggregate_cmd, false);
  common(aggregate_cmd);

  auto* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood fits");
  add_input(fit_cmd, o, false);
  timescale(fit_cmd, false);
  common(fit_cmd);
  fit_cmd->add_option("--family", o.families, "lognormal gaussian weibull exponential power_law");

  auto* compare_cmd = app.add_subcommand("compare", "Bootstrap GoF and likelihood-ratio tests");
  add_input(compare_cmd, o, false);
  timescale(compare_cmd, false);
  common(compare_cmd);
  compare_cmd->add_option("--alternative", o.alternatives, "exponential weibull power_law");
  compare_cmd->add_option("--n-boot", o.n_boot, "Bootstrap replicates (>= 100)");
  compare_cmd->add_option("--seed", o.seed);

  auto* gamma_cmd = app.add_subcommand("gamma", "Correlation-coefficient goodness of fit");
  add_input(gamma_cmd, o, false);
  timescale(gamma_cmd, true);
  common(gamma_cmd);
  gamma_cmd->add_option("--family", o.families);

  auto* stat_cmd = app.add_subcommand("stationarity", "ADF, PP and KPSS unit-root tests");
  add_input(stat_cmd, o, false);
  timescale(stat_cmd, false);
  common(stat_cmd);

  auto* provision_cmd = app.add_subcommand("provision", "Link capacity for target exceedance");
  add_input(provision_cmd, o, false);
  timescale(provision_cmd, false);
  common(provision_cmd);
  provision_cmd->add_option("--eps", o.eps, "Target exceedance probabilities");
  provision_cmd->add_option("--method", o.methods, "meent or a family name");

  auto* bill_cmd = app.add_subcommand("bill", "95th-percentile billing predictions");
  add_input(bill_cmd, o, true);
  common(bill_cmd);
  bill_cmd->add_option("--window-seconds", o.window_seconds, "Billing window length");

  auto* synth_cmd = app.add_subcommand("synth", "Seeded synthetic volume series");
  timescale(synth_cmd, false);
  common(synth_cmd);
  synth_cmd->add_option("--kind", o.kind, "lognormal gaussian exponential bimodal random_walk regime");
  synth_cmd->add_option("--n", o.n, "Number of bins");
  synth_cmd->add_option("--seed", o.seed);
  synth_cmd->add_option("--mu", o.mu);
  synth_cmd->add_option("--sigma", o.sigma);
  synth_cmd->add_option("--rate", o.rate);
  synth_cmd->add_option("--p-low", o.p_low);
  synth_cmd->add_option("--p-high", o.p_high);
  synth_cmd->add_option("--capacity", o.capacity, "Link capacity, bytes per second");
  synth_cmd->add_option("--step-sigma", o.step_sigma);
  synth_cmd->add_option("--floor", o.floor);
  synth_cmd->add_option("--segments", o.segments, "mu:sigma:bins,... for --kind regime");

  auto* report_cmd = app.add_subcommand("report", "Full per-trace pipeline");
  add_input(report_cmd, o, true);
  timescale(report_cmd, true);
  report_cmd->add_option("--out,-o", o.out, "Output directory")->required();
  report_cmd->add_option("--duration", o.duration);
  report_cmd->add_option("--eps", o.eps);
  report_cmd->add_option("--n-boot", o.n_boot);
  report_cmd->add_option("--seed", o.seed);
  report_cmd->add_option("--capacity", o.capacity, "Link capacity, bytes per second");
  report_cmd->add_option("--window-seconds", o.window_seconds);
  report_cmd->add_option("--workers", o.workers);

  std::vector<std::string> argv{"trafficfit"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<const char*> raw;
  for (const auto& a : argv) raw.push_back(a.c_str());

  // Empty until parsed: aggregate and synth default to CSV, the rest to JSON.
  o.format = "";
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help, --version
    err << "trafficfit: " << e.what() << "\n";
    return kExitConfigError;
  }
  if (o.format.empty()) o.format = (*aggregate_cmd || *synth_cmd) ? "csv" : "json";

  try {
    if (*aggregate_cmd) return cmd_aggregate(o, out);
    if (*fit_cmd) return cmd_fit(o, out, err);
    if (*compare_cmd) return cmd_compare(o, out);
    if (*gamma_cmd) return cmd_gamma(o, out);
    if (*stat_cmd) return cmd_stationarity(o, out);
    if (*provision_cmd) return cmd_provision(o, out);
    if (*bill_cmd) return cmd_bill(o, out, err);
    if (*synth_cmd) return cmd_synth(o, out);
    if (*report_cmd) return cmd_report(o, err);
  } catch (const ConfigError& e) {
    err << "trafficfit: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    err << "trafficfit: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitTraceFailure;
  }
  return kExitConfigError;
}

}  // namespace trafficfit::cli
