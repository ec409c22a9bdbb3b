#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "secrd/rng.hpp"

// Multimode-fiber MIMO channel model in its normalized form: unit noise
// variance, Bob's channel sqrt(SNR) * Psi, Eve's channel
// sqrt(SNR_e) * sqrt(Phi) * Psi_e with Psi, Psi_e unitary crosstalk and Phi
// the diagonal mode-dependent-loss spectrum.

namespace secrd::mmf {

struct MmfParams {
  int modes;       // M >= 1
  double snr_db;   // Bob's SNR in dB
  double snre_db;  // Eve's SNR in dB
  double mdl_db;   // mode-dependent-loss spread in dB, >= 0

  void validate() const;
  double snr() const;   // linear
  double snre() const;  // linear
};

double db_to_linear(double db);

// Normalized spectrum: entries > 0, mean exactly 1 (sum = M within 1e-9).
struct MdlSpectrum {
  std::vector<double> phi_bar;

  void validate() const;
};

struct ChannelRealization {
  Eigen::MatrixXcd psi;    // Bob's unitary crosstalk
  Eigen::MatrixXcd psi_e;  // Eve's unitary crosstalk
  MdlSpectrum mdl;

  void validate() const;
  int modes() const { return static_cast<int>(psi.rows()); }
};

// Haar-distributed unitary: complex Gaussian matrix, QR, then each column of
// Q is rephased by the sign of the matching diagonal entry of R so that R's
// diagonal is positive.
Eigen::MatrixXcd sample_haar_unitary(int m, SeededRng& rng);

// Loss spectrum with the extremes pinned: phi_1 = 1, phi_2 = 10^(mdl_db/10),
// remaining entries uniform in between; returned normalized to mean 1.
// Requires m >= 2.
MdlSpectrum sample_mdl(int m, double mdl_db, SeededRng& rng);

// Draws (psi, psi_e, mdl) for one channel realization. At m = 1 the
// normalized spectrum is forced to (1) regardless of mdl_db.
ChannelRealization sample_realization(const MmfParams& params, SeededRng& rng);

// (H, H_e) = (sqrt(SNR) Psi, sqrt(SNR_e) sqrt(Phi) Psi_e).
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> build_channels(
    const MmfParams& params, const ChannelRealization& realization);

nlohmann::json realization_to_json(const ChannelRealization& realization);
ChannelRealization realization_from_json(const nlohmann::json& j);

}  // namespace secrd::mmf
