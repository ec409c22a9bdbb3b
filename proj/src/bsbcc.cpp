#include "secrd/bsbcc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "secrd/info_math.hpp"

namespace secrd::bsbcc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double rhs_for_rate(const BsbccParams& params, double rate) {
  return 1.0 - binary_entropy(params.p1) + binary_entropy(params.p2) -
         rate * binary_entropy(params.p);
}

}  // namespace

void BsbccParams::validate() const {
  if (!(std::isfinite(p) && p > 0.0 && p <= 0.5))
    throw std::invalid_argument("BsbccParams: need 0 < p <= 0.5");
  if (!(std::isfinite(p1) && std::isfinite(p2) && 0.0 <= p1 && p1 < p2 &&
        p2 < 0.5))
    throw std::invalid_argument("BsbccParams: need 0 <= p1 < p2 < 0.5");
}

double rate_max(const BsbccParams& params) {
  params.validate();
  return (1.0 - binary_entropy(params.p1)) / binary_entropy(params.p);
}

double rate_kink(const BsbccParams& params) {
  params.validate();
  return (binary_entropy(params.p2) - binary_entropy(params.p1)) /
         binary_entropy(params.p);
}

double solve_gamma(const BsbccParams& params, double rate) {
  params.validate();
  if (!(rate > rate_kink(params) && rate <= rate_max(params)))
    throw InfeasibleRateError(
        "solve_gamma: rate must lie in (rate_kink, rate_max]");
  double rhs = rhs_for_rate(params, rate);
  auto g = [&](double gamma) {
    return binary_entropy(binary_convolution(gamma, params.p2)) - rhs;
  };
  // h(gamma * p2) rises monotonically from h(p2) to 1 on [0, 0.5], so the
  // bracket is guaranteed by the rate precondition.
  if (g(0.0) >= 0.0) return 0.0;
  if (g(0.5) <= 0.0) return 0.5;
  return bisect_root(g, 0.0, 0.5, 1e-12);
}

double alpha_prime(const BsbccParams& params, double gamma) {
  params.validate();
  if (!(std::isfinite(gamma) && gamma >= 0.0 && gamma <= 0.5))
    throw std::invalid_argument("alpha_prime: gamma must lie in [0, 0.5]");
  double num = binary_entropy(binary_convolution(gamma, params.p2)) -
               binary_entropy(binary_convolution(gamma, params.p1));
  double den = 1.0 - binary_entropy(binary_convolution(gamma, params.p1));
  if (den <= 0.0)
    throw DegenerateTimeSharingError(
        "alpha_prime: 0/0 time-sharing weight at gamma = 0.5");
  return num / den;
}

double secure_rate(const BsbccParams& params, double gamma) {
  params.validate();
  if (!(std::isfinite(gamma) && gamma >= 0.0 && gamma <= 0.5))
    throw std::invalid_argument("secure_rate: gamma must lie in [0, 0.5]");
  return binary_entropy(binary_convolution(gamma, params.p1)) -
         binary_entropy(binary_convolution(gamma, params.p2)) -
         binary_entropy(params.p1) + binary_entropy(params.p2);
}

double distortion_no_causal(const BsbccParams& params, double rate) {
  params.validate();
  if (!(std::isfinite(rate) && rate > 0.0))
    throw std::invalid_argument("distortion_no_causal: rate must be > 0");
  if (rate >= rate_max(params))
    throw InfeasibleRateError(
        "distortion_no_causal: rate at or above rate_max");
  return params.p;
}

double distortion_causal(const BsbccParams& params, double rate) {
  params.validate();
  if (!(std::isfinite(rate) && rate > 0.0))
    throw std::invalid_argument("distortion_causal: rate must be > 0");
  if (rate > rate_max(params))
    throw InfeasibleRateError("distortion_causal: rate above rate_max");
  if (rate <= rate_kink(params)) return params.p;
  double gamma = solve_gamma(params, rate);
  double alpha = alpha_prime(params, gamma);
  double p_max = std::max(params.p, 1.0 - params.p);
  double d = d_cap(secure_rate(params, gamma) / rate, p_max);
  return alpha * params.p + (1.0 - alpha) * d;
}

std::vector<CurvePoint> curve(const BsbccParams& params,
                              const std::vector<double>& rate_grid) {
  params.validate();
  double r_kink = rate_kink(params);
  double r_max = rate_max(params);
  std::vector<CurvePoint> points;
  points.reserve(rate_grid.size());
  for (double rate : rate_grid) {
    if (!(std::isfinite(rate) && rate > 0.0))
      throw std::invalid_argument("curve: rates must be > 0");
    CurvePoint pt{};
    pt.rate = rate;
    pt.gamma = kNan;
    pt.alpha = kNan;
    if (rate < r_max) {
      pt.d_no_causal = params.p;
      pt.no_causal_regime = Regime::kPlateau;
    } else {
      pt.d_no_causal = kNan;
      pt.no_causal_regime = Regime::kInfeasible;
    }
    if (rate <= r_kink) {
      pt.d_causal = params.p;
      pt.causal_regime = Regime::kPlateau;
    } else if (rate <= r_max) {
      double gamma = solve_gamma(params, rate);
      pt.gamma = gamma;
      pt.alpha = alpha_prime(params, gamma);
      double p_max = std::max(params.p, 1.0 - params.p);
      double d = d_cap(secure_rate(params, gamma) / rate, p_max);
      pt.d_causal = pt.alpha * params.p + (1.0 - pt.alpha) * d;
      pt.causal_regime = Regime::kTradeoff;
    } else {
      pt.d_causal = kNan;
      pt.causal_regime = Regime::kInfeasible;
    }
    points.push_back(pt);
  }
  return points;
}

}  // namespace secrd::bsbcc
