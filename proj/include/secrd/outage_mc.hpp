#pragma once

#include <cstdint>

#include "secrd/mmf_model.hpp"

// Outage probability of a fixed operating point over random channel draws.
// A draw succeeds when some admissible input covariance simultaneously
// supports the confidential rate, the public rate, and the causal-disclosure
// threshold.

namespace secrd::mmf {

struct OutageQuery {
  double rs_prime;  // confidential bits per source symbol, in [0, H(S)]
  double rate;      // source symbols per channel use
  double alpha;     // required clamped alpha_bar, in [0, 1]
  std::uint64_t trials;
  std::uint64_t seed;
};

struct OutageEstimate {
  double p_out;
  double std_err;  // binomial sqrt(p(1-p)/n)
  std::uint64_t trials_used;
  std::uint64_t failures;
};

// Feasibility for one channel draw. The diagonal family is searched exactly
// through its reachable (t, gamma) region; a projected-subgradient pass over
// general Hermitian K runs on near-miss draws and can only add successes.
bool trial_success(const MmfParams& params,
                   const ChannelRealization& realization,
                   const OutageQuery& query, double source_entropy);

// Trial i draws its channel from an rng stream keyed by (query.seed, i), so
// the estimate is bit-identical for any thread count.
OutageEstimate estimate_outage(const MmfParams& params,
                               const OutageQuery& query, double source_entropy,
                               int threads = 1);

}  // namespace secrd::mmf
