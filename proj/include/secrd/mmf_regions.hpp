#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "secrd/mmf_model.hpp"

// Secrecy rate regions and rate-distortion curves for the normalized MMF
// channel. Everything here depends on the unitaries only through determinant
// identities, so the diagonal covariance family (K = Psi_e^* Lambda Psi_e)
// reduces to per-mode scalar sums.

namespace secrd::mmf {

// The sufficient secrecy condition min_i phibar_i < SNR/SNR_e fails.
class SecrecyConditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input covariance spectrum for the diagonal family; entries in [0, 1].
struct CovSpectrum {
  std::vector<double> lambdas;

  void validate() const;
};

using HermitianCov = Eigen::MatrixXcd;

struct RatePair {
  double rs;      // confidential rate, clamped at 0
  double rs_raw;  // unclamped value
  double rp;      // public rate
};

struct AlphaBarValue {
  double value;  // clamped to [0, 1]
  double raw;
};

// rs = sum log2(1+SNR*l_i) - sum log2(1+SNR_e*l_i*phibar_i),
// rp = M*log2(1+SNR) - sum log2(1+SNR*l_i).
RatePair rate_pair_diag(const MmfParams& params, const MdlSpectrum& mdl,
                        const CovSpectrum& spectrum);

// Same quantities from log-dets of a general Hermitian K with 0 <= K <= I
// (checked within 1e-9).
RatePair rate_pair_general(const MmfParams& params,
                           const ChannelRealization& realization,
                           const HermitianCov& k);

// min_i phibar_i < SNR/SNR_e (strict).
bool check_secrecy_condition(const MmfParams& params, const MdlSpectrum& mdl);

struct NoCausalRegion {
  double rate_bound;  // M*log2(1+SNR)/source_entropy
  double distortion;  // the caller's delta, passed through
};

// Throws SecrecyConditionError when the sufficient condition fails.
NoCausalRegion no_causal_region(const MmfParams& params,
                                const MdlSpectrum& mdl, double source_entropy,
                                double delta);

struct MaxRsResult {
  double rs_star;        // best of both stages
  double diag_value;
  CovSpectrum diag_argmax;
  double general_value;  // never below diag_value - 1e-9
  HermitianCov general_argmax;
};

// Stage 1: coordinate ascent over the diagonal family (each mode's term is
// monotone in lambda_i, so the per-coordinate optimum is closed-form).
// Stage 2: projected gradient ascent over Hermitian K with eigenvalue
// clipping to [0, 1], initial step 0.1, backtracking halving, stopping at
// improvement < 1e-10 or 500 iterations.
MaxRsResult max_rs(const MmfParams& params,
                   const ChannelRealization& realization);

AlphaBarValue alpha_bar(const MmfParams& params,
                        const ChannelRealization& realization,
                        const HermitianCov& k);
AlphaBarValue alpha_bar_diag(const MmfParams& params, const MdlSpectrum& mdl,
                             const CovSpectrum& spectrum);

enum class MmfRegime { kPlateau, kTradeoff, kInfeasible };

struct MmfRdPoint {
  double rate;
  double distortion;  // NaN when infeasible
  MmfRegime regime;
  double alpha_bar;  // 1 on the plateau by convention, NaN when infeasible
  double rs;
  double rp;
  std::vector<double> lambdas;  // operating spectrum (empty when infeasible)
};

// Causal-disclosure distortion curve over the rate grid. In the tradeoff
// regime the operating covariance is selected on the rate-matching surface
// sum_i log2(1+SNR_e*l_i*phibar_i) = M*log2(1+SNR) - rate*H(S); on that
// surface the objective depends only on t = sum_i log2(1+SNR*l_i), which is
// maximized over the exactly-computed reachable t-interval, followed by a
// projected-ascent refinement over general Hermitian K.
std::vector<MmfRdPoint> causal_curve(const MmfParams& params,
                                     const ChannelRealization& realization,
                                     double source_p,
                                     const std::vector<double>& rate_grid);

}  // namespace secrd::mmf
