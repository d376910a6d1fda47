#include "trafficfit/stationarity.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "trafficfit/distributions.hpp"
#include "trafficfit/error.hpp"
#include "trafficfit/kernels.hpp"

namespace trafficfit {
namespace {

// MacKinnon (1994), constant-only regression, one I(1) series.
constexpr double kTauMax = 2.74;
constexpr double kTauMin = -18.83;
constexpr double kTauStar = -1.61;
constexpr std::array<double, 3> kSmallP = {2.1659, 1.4412, 0.038269};
constexpr std::array<double, 4> kLargeP = {1.7339, 0.93202, -0.12745, -0.010368};
constexpr double kDfPMin = 0.001;
constexpr double kDfPMax = 0.99;

// KPSS level case: statistic critical values and their upper-tail probabilities.
constexpr std::array<double, 4> kKpssCrit = {0.347, 0.463, 0.574, 0.739};
constexpr std::array<double, 4> kKpssP = {0.10, 0.05, 0.025, 0.01};

struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd resid;
  double ssr = 0.0;
  double inv_xtx_00 = 0.0;  // [(X'X)^-1]_{00}
};

OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::Index k = x.cols();
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const double scale = r.diagonal().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(std::abs(r(i, i)) > 1e-10 * scale)) {
      fail(ErrorCode::Precondition, "singular regression (constant or collinear series)");
    }
  }
  OlsFit f;
  f.beta = qr.solve(y);
  f.resid = y - x * f.beta;
  f.ssr = f.resid.squaredNorm();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  f.inv_xtx_00 = r_inv.row(0).squaredNorm();
  return f;
}

// Bartlett-kernel long-run variance of zero-mean residuals.
double newey_west_variance(std::span<const double> u, std::size_t bandwidth) {
  const std::size_t n = u.size();
  double s = kernels::sum_sq_dev(u, 0.0);
  for (std::size_t lag = 1; lag <= bandwidth && lag < n; ++lag) {
    double acc = 0.0;
    for (std::size_t t = lag; t < n; ++t) acc += u[t] * u[t - lag];
    s += 2.0 * (1.0 - static_cast<double>(lag) / static_cast<double>(bandwidth + 1)) * acc;
  }
  return s / static_cast<double>(n);
}

void require_length(std::span<const double> series) {
  if (series.size() < kMinUnitRootLength) {
    fail(ErrorCode::Precondition, "unit-root tests need at least 20 observations");
  }
  for (double v : series) {
    if (!std::isfinite(v)) fail(ErrorCode::Domain, "non-finite observation");
  }
}

void finish_dickey_fuller(UnitRootTestResult& r, double significance) {
  const double p = dickey_fuller_pvalue(r.statistic);
  r.p_value = std::clamp(p, kDfPMin, kDfPMax);
  r.p_clamped = p <= kDfPMin || p >= kDfPMax;
  r.verdict = r.p_value <= significance ? TestVerdict::Stationary : TestVerdict::Inconclusive;
}

}  // namespace

std::string_view to_string(UnitRootTest t) noexcept {
  switch (t) {
    case UnitRootTest::ADF: return "adf";
    case UnitRootTest::PP: return "pp";
    case UnitRootTest::KPSS: return "kpss";
  }
  return "unknown";
}

std::string_view to_string(TestVerdict v) noexcept {
  switch (v) {
    case TestVerdict::Stationary: return "stationary";
    case TestVerdict::NonStationary: return "non_stationary";
    case TestVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Stationary: return "stationary";
    case Classification::DifferenceStationary: return "difference_stationary";
    case Classification::NonStationary: return "non_stationary";
    case Classification::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::vector<double> difference(std::span<const double> series) {
  if (series.size() < 2) fail(ErrorCode::Precondition, "difference needs at least two values");
  std::vector<double> out(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) out[i] = series[i + 1] - series[i];
  return out;
}

std::size_t schwert_lags(std::size_t n) {
  return static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

std::size_t newey_west_bandwidth(std::size_t n) {
  return static_cast<std::size_t>(
      std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

double dickey_fuller_pvalue(double tau) {
  if (tau > kTauMax) return 1.0;
  if (tau < kTauMin) return 0.0;
  double poly = 0.0;
  if (tau <= kTauStar) {
    for (auto it = kSmallP.rbegin(); it != kSmallP.rend(); ++it) poly = poly * tau + *it;
  } else {
    for (auto it = kLargeP.rbegin(); it != kLargeP.rend(); ++it) poly = poly * tau + *it;
  }
  return normal_cdf(poly);
}

double kpss_pvalue(double statistic) {
  if (statistic <= kKpssCrit.front()) return kKpssP.front();
  if (statistic >= kKpssCrit.back()) return kKpssP.back();
  std::size_t i = 1;
  while (statistic > kKpssCrit[i]) ++i;
  const double t = (statistic - kKpssCrit[i - 1]) / (kKpssCrit[i] - kKpssCrit[i - 1]);
  return kKpssP[i - 1] + t * (kKpssP[i] - kKpssP[i - 1]);
}

UnitRootTestResult adf_test(std::span<const double> series, std::optional<std::size_t> max_lag,
                            double significance) {
  require_length(series);
  const std::size_t n = series.size();
  const std::size_t p = max_lag.value_or(schwert_lags(n));
  if (p + 2 > n / 2) fail(ErrorCode::Precondition, "series too short for the chosen ADF lag");

  const auto dy = difference(series);
  const std::size_t nobs = n - 1 - p;
  const std::size_t k = p + 2;
  Eigen::MatrixXd x(nobs, k);
  Eigen::VectorXd lhs(nobs);
  for (std::size_t r = 0; r < nobs; ++r) {
    const std::size_t t = p + r;
    lhs(r) = dy[t];
    x(r, 0) = series[t];
    for (std::size_t j = 1; j <= p; ++j) x(r, j) = dy[t - j];
    x(r, k - 1) = 1.0;
  }
  const OlsFit f = ols(x, lhs);
  const double s2 = f.ssr / static_cast<double>(nobs - k);
  if (!(s2 > 0.0)) fail(ErrorCode::Precondition, "ADF regression has zero residual variance");

  UnitRootTestResult r;
  r.test = UnitRootTest::ADF;
  r.lags_or_bandwidth = p;
  r.statistic = f.beta(0) / std::sqrt(s2 * f.inv_xtx_00);
  finish_dickey_fuller(r, significance);
  return r;
}

UnitRootTestResult pp_test(std::span<const double> series, double significance) {
  require_length(series);
  const std::size_t n = series.size();
  const std::size_t bw = newey_west_bandwidth(n);
  const std::size_t nobs = n - 1;
  constexpr std::size_t k = 2;
  Eigen::MatrixXd x(nobs, k);
  Eigen::VectorXd lhs(nobs);
  for (std::size_t t = 0; t < nobs; ++t) {
    lhs(t) = series[t + 1];
    x(t, 0) = series[t];
    x(t, 1) = 1.0;
  }
  const OlsFit f = ols(x, lhs);
  const auto nd = static_cast<double>(nobs);
  const double s2 = f.ssr / (nd - k);
  if (!(s2 > 0.0)) fail(ErrorCode::Precondition, "PP regression has zero residual variance");
  const std::vector<double> u(f.resid.data(), f.resid.data() + f.resid.size());
  const double lam2 = newey_west_variance(u, bw);
  if (!(lam2 > 0.0)) fail(ErrorCode::Precondition, "PP long-run variance is not positive");
  const double gamma0 = f.ssr / nd;
  const double se = std::sqrt(s2 * f.inv_xtx_00);
  const double rho = f.beta(0);

  UnitRootTestResult r;
  r.test = UnitRootTest::PP;
  r.lags_or_bandwidth = bw;
  r.statistic = std::sqrt(gamma0 / lam2) * ((rho - 1.0) / se) -
                0.5 * ((lam2 - gamma0) / std::sqrt(lam2)) * (nd * se / std::sqrt(s2));
  finish_dickey_fuller(r, significance);
  return r;
}

UnitRootTestResult kpss_test(std::span<const double> series, double significance) {
  require_length(series);
  const std::size_t n = series.size();
  const std::size_t bw = newey_west_bandwidth(n);
  const double m = kernels::mean(series);
  std::vector<double> e(n);
  double partial = 0.0;
  double eta = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    e[t] = series[t] - m;
    partial += e[t];
    eta += partial * partial;
  }
  const auto nd = static_cast<double>(n);
  eta /= nd * nd;
  const double lrv = newey_west_variance(e, bw);
  if (!(lrv > 0.0)) fail(ErrorCode::Precondition, "KPSS long-run variance is zero (constant series)");

  UnitRootTestResult r;
  r.test = UnitRootTest::KPSS;
  r.lags_or_bandwidth = bw;
  r.statistic = eta / lrv;
  r.p_value = kpss_pvalue(r.statistic);
  r.p_clamped = r.statistic <= kKpssCrit.front() || r.statistic >= kKpssCrit.back();
  r.verdict = r.p_value <= significance ? TestVerdict::NonStationary : TestVerdict::Inconclusive;
  return r;
}

StationarityReport classify(std::span<const double> series, const StationarityOptions& options) {
  if (series.size() < kMinUnitRootLength + 1) {
    fail(ErrorCode::Precondition, "classification needs at least 21 observations");
  }
  StationarityReport rep;
  rep.adf = adf_test(series, options.adf_max_lag, options.significance);
  rep.pp = pp_test(series, options.significance);
  rep.kpss = kpss_test(series, options.significance);
  const auto diffed = difference(series);
  rep.kpss_diff = kpss_test(diffed, options.significance);

  const bool adf_stationary = rep.adf.verdict == TestVerdict::Stationary;
  const bool kpss_rejects = rep.kpss.verdict == TestVerdict::NonStationary;
  if (adf_stationary && !kpss_rejects) {
    rep.classification = Classification::Stationary;
  } else if (adf_stationary && kpss_rejects &&
             rep.kpss_diff.verdict == TestVerdict::Inconclusive) {
    rep.classification = Classification::DifferenceStationary;
  } else if (!adf_stationary && kpss_rejects) {
    rep.classification = Classification::NonStationary;
  } else {
    rep.classification = Classification::Inconclusive;
  }
  return rep;
}

}  // namespace trafficfit
