#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "trafficfit/ingest.hpp"

namespace trafficfit {

enum class SynthKind { LogNormalIID, GaussianIID, ExponentialIID, BimodalAnomaly, RandomWalk,
                       RegimeSchedule };

std::string_view to_string(SynthKind k) noexcept;  // "lognormal", "gaussian", ...
std::optional<SynthKind> synth_kind_from_string(std::string_view name) noexcept;

struct LogNormalIIDParams {
  double mu = 13.815510557964274;  // ln 1e6
  double sigma = 0.8;
};

struct GaussianIIDParams {
  double mu = 1e6;
  double sigma = 2e5;
};

struct ExponentialIIDParams {
  double rate = 1e-6;  // per byte
};

/// Outage / saturation mixture: with probability p_low a near-zero bin
/// (uniform in [1, max(1, capacity/1000)] bytes), with probability p_high a bin
/// at exactly `capacity`, otherwise a log-normal bin clipped at capacity.
struct BimodalAnomalyParams {
  double p_low = 0.3;
  double p_high = 0.2;
  double capacity = 5e6;  // bytes per bin
  double mu = 13.815510557964274;
  double sigma = 0.8;
};

/// Cumulative sum of N(0, step_sigma) increments shifted so the minimum is `floor`.
struct RandomWalkParams {
  double step_sigma = 1e5;
  double floor = 1e6;
};

struct RegimeSegment {
  double mu = 0.0;
  double sigma = 1.0;
  std::size_t bins = 0;
};

/// Concatenated log-normal IID segments; segment bins must sum to n.
struct RegimeScheduleParams {
  std::vector<RegimeSegment> segments;
};

using SynthParams = std::variant<LogNormalIIDParams, GaussianIIDParams, ExponentialIIDParams,
                                 BimodalAnomalyParams, RandomWalkParams, RegimeScheduleParams>;

struct SynthSpec {
  SynthParams params;
  std::size_t n = 0;
  Timescale timescale = std::chrono::milliseconds(100);
  std::uint64_t seed = 0;

  SynthKind kind() const noexcept { return static_cast<SynthKind>(params.index()); }
};

/// Deterministic per seed; volumes are rounded to whole bytes.
VolumeSeries generate(const SynthSpec& spec);

}  // namespace trafficfit
