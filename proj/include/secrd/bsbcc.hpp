#pragma once

#include <stdexcept>
#include <vector>

// Rate-distortion secrecy boundaries for the binary symmetric broadcast
// channel: Bernoulli(p) source, main-channel crossover p1, eavesdropper
// crossover p2, Hamming distortion. Rates are source symbols per channel use.

namespace secrd::bsbcc {

// Rate demanded beyond the achievable boundary.
class InfeasibleRateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Time-sharing weight is 0/0 at gamma = 0.5.
class DegenerateTimeSharingError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct BsbccParams {
  double p;   // source bias, 0 < p <= 0.5
  double p1;  // main channel crossover, 0 <= p1 < p2
  double p2;  // eavesdropper crossover, p1 < p2 < 0.5

  void validate() const;
};

// (1 - h(p1)) / h(p): largest rate with any secrecy guarantee.
double rate_max(const BsbccParams& params);

// (h(p2) - h(p1)) / h(p): rate where the causal plateau ends.
double rate_kink(const BsbccParams& params);

// Root gamma in [0, 0.5] of h(gamma * p2) = 1 - h(p1) + h(p2) - rate * h(p),
// bisected to bracket width 1e-12. Requires rate in (rate_kink, rate_max].
double solve_gamma(const BsbccParams& params, double rate);

// (h(gamma * p2) - h(gamma * p1)) / (1 - h(gamma * p1)); throws
// DegenerateTimeSharingError at gamma = 0.5 where this is 0/0.
double alpha_prime(const BsbccParams& params, double gamma);

// Secure channel rate h(gamma * p1) - h(gamma * p2) - h(p1) + h(p2), in bits
// per channel use; 0 at gamma = 0 and increasing to h(p2) - h(p1).
double secure_rate(const BsbccParams& params, double gamma);

// Eve's minimum expected distortion without causal disclosure: p for
// rate < rate_max, otherwise throws InfeasibleRateError.
double distortion_no_causal(const BsbccParams& params, double rate);

// Eve's distortion with causal disclosure: p on (0, rate_kink], then
// alpha' * p + (1 - alpha') * d_cap(secure_rate / rate, max(p, 1-p)) up to
// rate_max; throws InfeasibleRateError past rate_max.
double distortion_causal(const BsbccParams& params, double rate);

enum class Regime { kPlateau, kTradeoff, kInfeasible };

struct CurvePoint {
  double rate;
  double d_no_causal;  // NaN when infeasible
  Regime no_causal_regime;
  double d_causal;  // NaN when infeasible
  double gamma;     // NaN outside the tradeoff regime
  double alpha;     // NaN outside the tradeoff regime
  Regime causal_regime;
};

// Evaluates both boundaries over the rate grid; infeasible rates yield
// labeled points rather than errors.
std::vector<CurvePoint> curve(const BsbccParams& params,
                              const std::vector<double>& rate_grid);

}  // namespace secrd::bsbcc
