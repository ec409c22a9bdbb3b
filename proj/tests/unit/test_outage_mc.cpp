#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "secrd/info_math.hpp"
#include "secrd/mmf_model.hpp"
#include "secrd/outage_mc.hpp"
#include "secrd/rng.hpp"

using doctest::Approx;
using secrd::SeededRng;
using secrd::mmf::ChannelRealization;
using secrd::mmf::MmfParams;
using secrd::mmf::OutageEstimate;
using secrd::mmf::OutageQuery;

namespace {

const MmfParams kRef{4, 20.0, 10.0, 20.0};
const double kEntropy = secrd::binary_entropy(0.3);

OutageEstimate run(double rs_prime, double rate, double alpha,
                   std::uint64_t trials, std::uint64_t seed,
                   int threads = 1) {
  OutageQuery q{rs_prime, rate, alpha, trials, seed};
  return secrd::mmf::estimate_outage(kRef, q, kEntropy, threads);
}

}  // namespace

TEST_SUITE("outage_mc") {

TEST_CASE("rates beyond the sum budget always fail") {
  // 31 * h(0.3) exceeds 4*log2(101), so no draw can carry both streams.
  OutageEstimate est = run(0.1, 31.0, 0.2, 200, 1);
  CHECK(est.p_out == 1.0);
  CHECK(est.std_err == 0.0);
  CHECK(est.failures == 200);
}

TEST_CASE("an undemanding query always succeeds") {
  OutageEstimate est = run(0.0, 0.01, 0.0, 200, 1);
  CHECK(est.p_out == 0.0);
  CHECK(est.std_err == 0.0);
  CHECK(est.failures == 0);
}

TEST_CASE("estimates are reproducible and trial-keyed") {
  OutageEstimate a = run(0.4, 24.0, 0.5, 100, 7);
  OutageEstimate b = run(0.4, 24.0, 0.5, 100, 7);
  CHECK(a.p_out == b.p_out);
  CHECK(a.failures == b.failures);

  // Re-derive the count by hand: trial i draws its channel from stream i.
  OutageQuery q{0.4, 24.0, 0.5, 100, 7};
  std::uint64_t failures = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    SeededRng rng(7, i);
    ChannelRealization ch = secrd::mmf::sample_realization(kRef, rng);
    if (!secrd::mmf::trial_success(kRef, ch, q, kEntropy)) ++failures;
  }
  CHECK(failures == a.failures);
}

TEST_CASE("thread count does not change the estimate") {
  OutageEstimate one = run(0.4, 24.0, 0.5, 500, 11, 1);
  OutageEstimate two = run(0.4, 24.0, 0.5, 500, 11, 2);
  OutageEstimate four = run(0.4, 24.0, 0.5, 500, 11, 4);
  CHECK(one.failures == two.failures);
  CHECK(one.failures == four.failures);
  CHECK(one.p_out == four.p_out);
}

TEST_CASE("standard error is the binomial formula") {
  OutageEstimate est = run(0.4, 24.0, 0.5, 400, 3);
  double p = est.p_out;
  CHECK(est.trials_used == 400);
  CHECK(p == Approx(est.failures / 400.0).epsilon(1e-15));
  CHECK(est.std_err == Approx(std::sqrt(p * (1.0 - p) / 400.0)).epsilon(1e-12));
}

TEST_CASE("reported error bars cover independent reruns") {
  const int reps = 100;
  double phat[reps];
  double se[reps];
  double mean = 0.0;
  for (int i = 0; i < reps; ++i) {
    OutageEstimate est = run(0.4, 24.0, 0.5, 400, 1000 + i);
    phat[i] = est.p_out;
    se[i] = est.std_err;
    mean += est.p_out;
  }
  mean /= reps;
  int covered = 0;
  for (int i = 0; i < reps; ++i) {
    if (std::abs(phat[i] - mean) <= 4.0 * std::max(se[i], 1e-3)) ++covered;
  }
  CHECK(covered >= 99);
}

TEST_CASE("shared seeds give coupled monotone estimates") {
  // Per draw, raising the rate or the disclosure demand only shrinks the
  // feasible set, so with common random numbers the estimates are ordered.
  OutageEstimate r20 = run(0.4, 20.0, 0.5, 300, 5);
  OutageEstimate r24 = run(0.4, 24.0, 0.5, 300, 5);
  OutageEstimate r28 = run(0.4, 28.0, 0.5, 300, 5);
  CHECK(r20.failures <= r24.failures);
  CHECK(r24.failures <= r28.failures);

  OutageEstimate a2 = run(0.4, 24.0, 0.2, 300, 5);
  OutageEstimate a6 = run(0.4, 24.0, 0.6, 300, 5);
  CHECK(a2.failures <= a6.failures);
}

TEST_CASE("frozen reference estimates") {
  OutageEstimate easy = run(0.1, 5.0, 0.5, 10000, 42);
  CHECK(easy.p_out == 0.0);

  OutageEstimate mid = run(0.4, 24.0, 0.5, 10000, 42);
  CHECK(mid.failures == 5371);
  CHECK(mid.p_out == Approx(0.5371).epsilon(1e-12));
  CHECK(mid.std_err == Approx(0.004986216902622669).epsilon(1e-12));
}

TEST_CASE("query validation") {
  ChannelRealization ch = [] {
    SeededRng rng(1, 0);
    return secrd::mmf::sample_realization(kRef, rng);
  }();
  OutageQuery bad_rate{0.1, 0.0, 0.2, 10, 1};
  CHECK_THROWS_AS(secrd::mmf::trial_success(kRef, ch, bad_rate, kEntropy),
                  std::invalid_argument);
  OutageQuery bad_rsp{kEntropy + 0.01, 5.0, 0.2, 10, 1};
  CHECK_THROWS_AS(secrd::mmf::trial_success(kRef, ch, bad_rsp, kEntropy),
                  std::invalid_argument);
  OutageQuery bad_alpha{0.1, 5.0, 1.2, 10, 1};
  CHECK_THROWS_AS(secrd::mmf::trial_success(kRef, ch, bad_alpha, kEntropy),
                  std::invalid_argument);
  OutageQuery no_trials{0.1, 5.0, 0.2, 0, 1};
  CHECK_THROWS_AS(secrd::mmf::estimate_outage(kRef, no_trials, kEntropy),
                  std::invalid_argument);
}

}  // TEST_SUITE
