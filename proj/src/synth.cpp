#include "trafficfit/synth.hpp"

#include <algorithm>
#include <cmath>

#include "trafficfit/error.hpp"
#include "trafficfit/rng.hpp"

namespace trafficfit {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t to_bytes(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 0x1.0p63) return std::uint64_t{1} << 63;
  return static_cast<std::uint64_t>(std::llround(v));
}

void check(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::Precondition, what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string_view to_string(SynthKind k) noexcept {
  switch (k) {
    case SynthKind::LogNormalIID: return "lognormal";
    case SynthKind::GaussianIID: return "gaussian";
    case SynthKind::ExponentialIID: return "exponential";
    case SynthKind::BimodalAnomaly: return "bimodal";
    case SynthKind::RandomWalk: return "random_walk";
    case SynthKind::RegimeSchedule: return "regime";
  }
  return "unknown";
}

std::optional<SynthKind> synth_kind_from_string(std::string_view name) noexcept {
  for (auto k : {SynthKind::LogNormalIID, SynthKind::GaussianIID, SynthKind::ExponentialIID,
                 SynthKind::BimodalAnomaly, SynthKind::RandomWalk, SynthKind::RegimeSchedule}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

VolumeSeries generate(const SynthSpec& spec) {
  check(spec.n >= 1, "synthetic series needs n >= 1");
  check(spec.timescale.count() > 0, "timescale must be positive");
  VolumeSeries series{spec.timescale, 0, std::vector<std::uint64_t>(spec.n, 0)};
  auto& out = series.volumes;
  Rng rng(spec.seed);

  std::visit(
      overloaded{
          [&](const LogNormalIIDParams& p) {
            check(std::isfinite(p.mu) && positive(p.sigma), "invalid log-normal parameters");
            for (auto& v : out) v = to_bytes(std::exp(p.mu + p.sigma * rng.normal()));
          },
          [&](const GaussianIIDParams& p) {
            check(std::isfinite(p.mu) && positive(p.sigma), "invalid Gaussian parameters");
            // Truncated at zero; needs a non-vanishing chance of a positive draw.
            check(p.mu > -6.0 * p.sigma, "Gaussian mean too far below zero to truncate");
            for (auto& v : out) {
              double x;
              do {
                x = p.mu + p.sigma * rng.normal();
              } while (x < 0.0);
              v = to_bytes(x);
            }
          },
          [&](const ExponentialIIDParams& p) {
            check(positive(p.rate), "invalid exponential rate");
            for (auto& v : out) v = to_bytes(-std::log(rng.uniform()) / p.rate);
          },
          [&](const BimodalAnomalyParams& p) {
            check(p.p_low >= 0.0 && p.p_high >= 0.0 && p.p_low + p.p_high <= 1.0,
                  "anomaly probabilities must be non-negative and sum to at most 1");
            check(positive(p.capacity) && p.capacity >= 1.0, "capacity must be at least one byte");
            check(std::isfinite(p.mu) && positive(p.sigma), "invalid log-normal parameters");
            const auto cap = to_bytes(p.capacity);
            const auto low_max = std::max<std::uint64_t>(1, cap / 1000);
            for (auto& v : out) {
              const double u = rng.uniform();
              if (u < p.p_low) {
                v = rng.uniform_int(1, low_max);
              } else if (u < p.p_low + p.p_high) {
                v = cap;
              } else {
                v = std::min(cap, to_bytes(std::exp(p.mu + p.sigma * rng.normal())));
              }
            }
          },
          [&](const RandomWalkParams& p) {
            check(positive(p.step_sigma) && std::isfinite(p.floor) && p.floor >= 0.0,
                  "invalid random-walk parameters");
            std::vector<double> walk(out.size());
            double level = 0.0;
            for (auto& w : walk) {
              level += p.step_sigma * rng.normal();
              w = level;
            }
            const double lowest = *std::min_element(walk.begin(), walk.end());
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = to_bytes(walk[i] - lowest + p.floor);
          },
          [&](const RegimeScheduleParams& p) {
            check(!p.segments.empty(), "regime schedule needs at least one segment");
            std::size_t total = 0;
            for (const auto& s : p.segments) {
              check(std::isfinite(s.mu) && positive(s.sigma) && s.bins > 0, "invalid regime segment");
              total += s.bins;
            }
            check(total == out.size(), "regime segment bins must sum to n");
            std::size_t i = 0;
            for (const auto& s : p.segments) {
              for (std::size_t j = 0; j < s.bins; ++j) {
                out[i++] = to_bytes(std::exp(s.mu + s.sigma * rng.normal()));
              }
            }
          },
      },
      spec.params);
  return series;
}

}  // namespace trafficfit
