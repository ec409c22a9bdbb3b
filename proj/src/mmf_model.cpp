#include "secrd/mmf_model.hpp"

#include <cmath>
#include <stdexcept>

namespace secrd::mmf {

void MmfParams::validate() const {
  if (modes < 1) throw std::invalid_argument("MmfParams: need modes >= 1");
  if (!(std::isfinite(snr_db) && std::isfinite(snre_db)))
    throw std::invalid_argument("MmfParams: SNR values must be finite");
  if (!(std::isfinite(mdl_db) && mdl_db >= 0.0))
    throw std::invalid_argument("MmfParams: need mdl_db >= 0");
}

double MmfParams::snr() const { return db_to_linear(snr_db); }
double MmfParams::snre() const { return db_to_linear(snre_db); }

double db_to_linear(double db) {
  if (!std::isfinite(db))
    throw std::invalid_argument("db_to_linear: argument must be finite");
  return std::pow(10.0, db / 10.0);
}

void MdlSpectrum::validate() const {
  if (phi_bar.empty()) throw std::invalid_argument("MdlSpectrum: empty");
  double sum = 0.0;
  for (double v : phi_bar) {
    if (!(std::isfinite(v) && v > 0.0))
      throw std::invalid_argument("MdlSpectrum: entries must be > 0");
    sum += v;
  }
  if (std::abs(sum - static_cast<double>(phi_bar.size())) > 1e-9)
    throw std::invalid_argument("MdlSpectrum: entries must average to 1");
}

void ChannelRealization::validate() const {
  auto check_unitary = [](const Eigen::MatrixXcd& u, const char* name) {
    if (u.rows() != u.cols() || u.rows() < 1)
      throw std::invalid_argument(std::string(name) + ": must be square");
    Eigen::MatrixXcd err =
        u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    if (err.cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument(std::string(name) + ": not unitary");
  };
  check_unitary(psi, "ChannelRealization.psi");
  check_unitary(psi_e, "ChannelRealization.psi_e");
  mdl.validate();
  if (static_cast<Eigen::Index>(mdl.phi_bar.size()) != psi.rows() ||
      psi_e.rows() != psi.rows())
    throw std::invalid_argument("ChannelRealization: dimension mismatch");
}

Eigen::MatrixXcd sample_haar_unitary(int m, SeededRng& rng) {
  if (m < 1) throw std::invalid_argument("sample_haar_unitary: need m >= 1");
  Eigen::MatrixXcd a(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) a(r, c) = rng.complex_normal();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR();
  for (int c = 0; c < m; ++c) {
    std::complex<double> d = r(c, c);
    double mag = std::abs(d);
    std::complex<double> phase = mag > 0.0 ? d / mag : 1.0;
    q.col(c) *= phase;
  }
  return q;
}

MdlSpectrum sample_mdl(int m, double mdl_db, SeededRng& rng) {
  if (m < 2) throw std::invalid_argument("sample_mdl: need m >= 2");
  if (!(std::isfinite(mdl_db) && mdl_db >= 0.0))
    throw std::invalid_argument("sample_mdl: need mdl_db >= 0");
  double phi_min = 1.0;
  double phi_max = db_to_linear(mdl_db);
  std::vector<double> phi(m);
  phi[0] = phi_min;
  phi[1] = phi_max;
  for (int i = 2; i < m; ++i)
    phi[i] = phi_min + (phi_max - phi_min) * rng.uniform();
  double sum = 0.0;
  for (double v : phi) sum += v;
  MdlSpectrum spectrum;
  spectrum.phi_bar.resize(m);
  for (int i = 0; i < m; ++i)
    spectrum.phi_bar[i] = static_cast<double>(m) * phi[i] / sum;
  return spectrum;
}

ChannelRealization sample_realization(const MmfParams& params, SeededRng& rng) {
  params.validate();
  ChannelRealization real;
  real.psi = sample_haar_unitary(params.modes, rng);
  real.psi_e = sample_haar_unitary(params.modes, rng);
  if (params.modes == 1) {
    real.mdl.phi_bar = {1.0};  // normalization leaves no freedom at M = 1
  } else {
    real.mdl = sample_mdl(params.modes, params.mdl_db, rng);
  }
  return real;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> build_channels(
    const MmfParams& params, const ChannelRealization& realization) {
  params.validate();
  realization.validate();
  double root_snr = std::sqrt(params.snr());
  double root_snre = std::sqrt(params.snre());
  Eigen::MatrixXcd h = root_snr * realization.psi;
  Eigen::VectorXd root_phi(realization.modes());
  for (int i = 0; i < realization.modes(); ++i)
    root_phi(i) = std::sqrt(realization.mdl.phi_bar[i]);
  Eigen::MatrixXcd he =
      root_snre * root_phi.asDiagonal().toDenseMatrix().cast<std::complex<double>>() *
      realization.psi_e;
  return {h, he};
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back({{"re", m(r, c).real()}, {"im", m(r, c).imag()}});
    }
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j, const char* name) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(std::string(name) + ": expected matrix rows");
  auto rows = static_cast<Eigen::Index>(j.size());
  auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument(std::string(name) + ": ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& cell = row.at(c);
      m(r, c) = {cell.at("re").get<double>(), cell.at("im").get<double>()};
    }
  }
  return m;
}

}  // namespace

nlohmann::json realization_to_json(const ChannelRealization& realization) {
  return {{"psi", matrix_to_json(realization.psi)},
          {"psi_e", matrix_to_json(realization.psi_e)},
          {"phi_bar", realization.mdl.phi_bar}};
}

ChannelRealization realization_from_json(const nlohmann::json& j) {
  ChannelRealization real;
  real.psi = matrix_from_json(j.at("psi"), "psi");
  real.psi_e = matrix_from_json(j.at("psi_e"), "psi_e");
  real.mdl.phi_bar = j.at("phi_bar").get<std::vector<double>>();
  real.validate();
  return real;
}

}  // namespace secrd::mmf
