#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <nlohmann/json.hpp>

#include "secrd/mmf_model.hpp"
#include "secrd/rng.hpp"

using doctest::Approx;
using secrd::SeededRng;
using secrd::mmf::ChannelRealization;
using secrd::mmf::MdlSpectrum;
using secrd::mmf::MmfParams;

namespace {

double unitarity_error(const Eigen::MatrixXcd& u) {
  Eigen::MatrixXcd g = u.adjoint() * u;
  g -= Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return g.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("mmf_model") {

TEST_CASE("dB conversion and parameter accessors") {
  CHECK(secrd::mmf::db_to_linear(0.0) == 1.0);
  CHECK(secrd::mmf::db_to_linear(10.0) == Approx(10.0).epsilon(1e-14));
  CHECK(secrd::mmf::db_to_linear(20.0) == Approx(100.0).epsilon(1e-14));
  MmfParams params{4, 20.0, 10.0, 20.0};
  CHECK(params.snr() == Approx(100.0).epsilon(1e-14));
  CHECK(params.snre() == Approx(10.0).epsilon(1e-14));
  CHECK_THROWS_AS((MmfParams{0, 20.0, 10.0, 20.0}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((MmfParams{4, 20.0, 10.0, -1.0}.validate()),
                  std::invalid_argument);
}

TEST_CASE("haar draws are unitary and deterministic") {
  for (int m : {1, 2, 4, 8}) {
    SeededRng rng(5, 3);
    for (int i = 0; i < 5; ++i) {
      Eigen::MatrixXcd u = secrd::mmf::sample_haar_unitary(m, rng);
      REQUIRE(u.rows() == m);
      REQUIRE(u.cols() == m);
      CHECK(unitarity_error(u) <= 1e-10);
    }
  }
  SeededRng a(5, 3);
  SeededRng b(5, 3);
  Eigen::MatrixXcd ua = secrd::mmf::sample_haar_unitary(4, a);
  Eigen::MatrixXcd ub = secrd::mmf::sample_haar_unitary(4, b);
  CHECK((ua - ub).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(secrd::mmf::sample_haar_unitary(0, a),
                  std::invalid_argument);
}

TEST_CASE("single-mode haar draw is a unit-modulus phase") {
  SeededRng rng(9, 0);
  for (int i = 0; i < 20; ++i) {
    Eigen::MatrixXcd u = secrd::mmf::sample_haar_unitary(1, rng);
    CHECK(std::abs(u(0, 0)) == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("first matrix entry has the rotation-invariant second moment") {
  // E|U_11|^2 = 1/M for Haar measure.
  SeededRng rng(21, 0);
  double acc = 0.0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    Eigen::MatrixXcd u = secrd::mmf::sample_haar_unitary(4, rng);
    acc += std::norm(u(0, 0));
  }
  CHECK(std::abs(acc / draws - 0.25) < 0.02);
}

TEST_CASE("two-mode corner modulus is uniform on the unit interval") {
  // For M = 2 the squared modulus of any single entry is Unif[0,1]; the
  // one-sample KS statistic against that law must be small.
  SeededRng rng(22, 0);
  const int n = 100000;
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXcd u = secrd::mmf::sample_haar_unitary(2, rng);
    vals[i] = std::norm(u(0, 0));
  }
  std::sort(vals.begin(), vals.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    double hi = (i + 1.0) / n - vals[i];
    double lo = vals[i] - static_cast<double>(i) / n;
    ks = std::max(ks, std::max(hi, lo));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("loss spectrum pins the spread and normalizes to unit mean") {
  SeededRng rng(3, 0);
  MdlSpectrum flat = secrd::mmf::sample_mdl(2, 0.0, rng);
  REQUIRE(flat.phi_bar.size() == 2);
  CHECK(flat.phi_bar[0] == Approx(1.0).epsilon(1e-14));
  CHECK(flat.phi_bar[1] == Approx(1.0).epsilon(1e-14));

  MdlSpectrum wide = secrd::mmf::sample_mdl(2, 20.0, rng);
  std::vector<double> sorted = wide.phi_bar;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted[0] == Approx(2.0 / 101.0).epsilon(1e-12));
  CHECK(sorted[1] == Approx(200.0 / 101.0).epsilon(1e-12));

  for (int i = 0; i < 1000; ++i) {
    MdlSpectrum s = secrd::mmf::sample_mdl(4, 20.0, rng);
    double sum = 0.0;
    double lo = s.phi_bar[0];
    double hi = s.phi_bar[0];
    for (double v : s.phi_bar) {
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(sum == Approx(4.0).epsilon(1e-9));
    CHECK(lo <= 1.0 + 1e-12);
    CHECK(hi >= 1.0 - 1e-12);
    // Post-normalization extremes keep the configured ratio.
    CHECK(hi / lo == Approx(100.0).epsilon(1e-9));
    CHECK_NOTHROW(s.validate());
  }
  CHECK_THROWS_AS(secrd::mmf::sample_mdl(1, 20.0, rng), std::invalid_argument);
}

TEST_CASE("realizations compose into the two channel matrices") {
  MmfParams params{4, 20.0, 10.0, 20.0};
  SeededRng rng(42, 0);
  ChannelRealization real = secrd::mmf::sample_realization(params, rng);
  REQUIRE(real.modes() == 4);
  CHECK_NOTHROW(real.validate());

  auto [h, he] = secrd::mmf::build_channels(params, real);
  Eigen::MatrixXcd gram = h.adjoint() * h;
  CHECK((gram - 100.0 * Eigen::MatrixXcd::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() <= 1e-9);

  Eigen::MatrixXcd eve_gram = he * he.adjoint();
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) expected(i, i) = 10.0 * real.mdl.phi_bar[i];
  CHECK((eve_gram - expected).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("single-mode realization forces a flat spectrum") {
  MmfParams params{1, 20.0, 10.0, 20.0};
  SeededRng rng(7, 0);
  ChannelRealization real = secrd::mmf::sample_realization(params, rng);
  REQUIRE(real.mdl.phi_bar.size() == 1);
  CHECK(real.mdl.phi_bar[0] == 1.0);
  auto [h, he] = secrd::mmf::build_channels(params, real);
  CHECK(std::abs(h(0, 0)) == Approx(10.0).epsilon(1e-12));
}

TEST_CASE("json round trip preserves a realization bit for bit") {
  MmfParams params{3, 20.0, 10.0, 15.0};
  SeededRng rng(13, 0);
  ChannelRealization real = secrd::mmf::sample_realization(params, rng);

  nlohmann::json j = secrd::mmf::realization_to_json(real);
  ChannelRealization back = secrd::mmf::realization_from_json(j);
  CHECK((back.psi - real.psi).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.psi_e - real.psi_e).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.mdl.phi_bar.size() == real.mdl.phi_bar.size());
  for (std::size_t i = 0; i < real.mdl.phi_bar.size(); ++i) {
    CHECK(back.mdl.phi_bar[i] == real.mdl.phi_bar[i]);
  }

  // Text round trip as well: serialized doubles must parse back exactly.
  ChannelRealization text_back =
      secrd::mmf::realization_from_json(nlohmann::json::parse(j.dump()));
  CHECK((text_back.psi - real.psi).cwiseAbs().maxCoeff() == 0.0);
  CHECK((text_back.psi_e - real.psi_e).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("validation rejects a perturbed crosstalk matrix") {
  MmfParams params{3, 20.0, 10.0, 15.0};
  SeededRng rng(14, 0);
  ChannelRealization real = secrd::mmf::sample_realization(params, rng);
  real.psi(0, 0) += 0.1;
  CHECK_THROWS_AS(real.validate(), std::invalid_argument);
}

}  // TEST_SUITE
