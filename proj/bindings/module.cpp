#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "secrd/binning_sim.hpp"
#include "secrd/bsbcc.hpp"
#include "secrd/info_math.hpp"
#include "secrd/mmf_model.hpp"
#include "secrd/mmf_regions.hpp"
#include "secrd/outage_mc.hpp"
#include "secrd/rng.hpp"

namespace py = pybind11;

namespace {

const char* regime_name(secrd::bsbcc::Regime r) {
  switch (r) {
    case secrd::bsbcc::Regime::kPlateau:
      return "plateau";
    case secrd::bsbcc::Regime::kTradeoff:
      return "tradeoff";
    default:
      return "infeasible";
  }
}

const char* regime_name(secrd::mmf::MmfRegime r) {
  switch (r) {
    case secrd::mmf::MmfRegime::kPlateau:
      return "plateau";
    case secrd::mmf::MmfRegime::kTradeoff:
      return "tradeoff";
    default:
      return "infeasible";
  }
}

secrd::JointDistribution joint_from_matrix(const Eigen::MatrixXd& m) {
  std::vector<double> masses(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      masses[r * m.cols() + c] = m(r, c);
  return secrd::JointDistribution(m.rows(), m.cols(), std::move(masses));
}

}  // namespace

PYBIND11_MODULE(secrd, m) {
  m.doc() =
      "Rate-distortion secrecy regions for wiretap broadcast channels: "
      "binary symmetric boundaries, multimode-fiber MIMO regions, outage "
      "Monte Carlo, and an exact typical-set binning simulator.";
  m.attr("__version__") = "0.1.0";

  m.def("binary_entropy", &secrd::binary_entropy, py::arg("x"),
        "Binary entropy in bits; x in [0, 1].");
  m.def("binary_convolution", &secrd::binary_convolution, py::arg("a"),
        py::arg("b"), "a(1-b) + (1-a)b.");
  m.def("f_interp", &secrd::f_interp, py::arg("x"),
        "Piecewise-linear interpolation through (log2 n, (n-1)/n).");
  m.def("d_cap", &secrd::d_cap, py::arg("x"), py::arg("p_max"),
        "min(f_interp(x), 1 - p_max).");
  m.def(
      "mutual_information",
      [](const Eigen::MatrixXd& joint) {
        return secrd::mutual_information(joint_from_matrix(joint));
      },
      py::arg("joint"),
      "Mutual information in bits of a joint pmf given as a matrix.");
  m.def(
      "lemma_tv_mi_check",
      [](const Eigen::MatrixXd& joint) {
        const auto r = secrd::lemma_tv_mi_check(joint_from_matrix(joint));
        py::dict d;
        d["epsilon"] = r.epsilon;
        d["mi"] = r.mi;
        d["bound"] = r.bound;
        d["applicable"] = r.applicable;
        d["holds"] = r.holds;
        return d;
      },
      py::arg("joint"),
      "Total-variation vs mutual-information bound for a joint pmf whose "
      "row marginal is uniform.");
  m.def(
      "sample_haar_unitary",
      [](int modes, std::uint64_t seed, std::uint64_t stream) {
        secrd::SeededRng rng(seed, stream);
        return secrd::mmf::sample_haar_unitary(modes, rng);
      },
      py::arg("modes"), py::arg("seed"), py::arg("stream") = 0,
      "One Haar-distributed unitary from the (seed, stream) rng.");

  // --- binary symmetric broadcast channel ---
  py::module_ bs = m.def_submodule(
      "bsbcc", "Binary symmetric broadcast channel boundaries.");

  py::class_<secrd::bsbcc::BsbccParams>(bs, "Params")
      .def(py::init([](double p, double p1, double p2) {
             secrd::bsbcc::BsbccParams s{p, p1, p2};
             s.validate();
             return s;
           }),
           py::arg("p"), py::arg("p1"), py::arg("p2"))
      .def_readonly("p", &secrd::bsbcc::BsbccParams::p)
      .def_readonly("p1", &secrd::bsbcc::BsbccParams::p1)
      .def_readonly("p2", &secrd::bsbcc::BsbccParams::p2)
      .def("__repr__", [](const secrd::bsbcc::BsbccParams& s) {
        return "Params(p=" + std::to_string(s.p) +
               ", p1=" + std::to_string(s.p1) +
               ", p2=" + std::to_string(s.p2) + ")";
      });

  py::class_<secrd::bsbcc::CurvePoint>(bs, "CurvePoint")
      .def_readonly("rate", &secrd::bsbcc::CurvePoint::rate)
      .def_readonly("d_no_causal", &secrd::bsbcc::CurvePoint::d_no_causal)
      .def_readonly("d_causal", &secrd::bsbcc::CurvePoint::d_causal)
      .def_readonly("gamma", &secrd::bsbcc::CurvePoint::gamma)
      .def_readonly("alpha_prime", &secrd::bsbcc::CurvePoint::alpha)
      .def_property_readonly("regime",
                             [](const secrd::bsbcc::CurvePoint& pt) {
                               return regime_name(pt.causal_regime);
                             })
      .def("__repr__", [](const secrd::bsbcc::CurvePoint& pt) {
        return "CurvePoint(rate=" + std::to_string(pt.rate) +
               ", d_causal=" + std::to_string(pt.d_causal) + ", " +
               regime_name(pt.causal_regime) + ")";
      });

  bs.def("rate_max", &secrd::bsbcc::rate_max, py::arg("params"));
  bs.def("rate_kink", &secrd::bsbcc::rate_kink, py::arg("params"));
  bs.def("solve_gamma", &secrd::bsbcc::solve_gamma, py::arg("params"),
         py::arg("rate"));
  bs.def("alpha_prime", &secrd::bsbcc::alpha_prime, py::arg("params"),
         py::arg("gamma"));
  bs.def("secure_rate", &secrd::bsbcc::secure_rate, py::arg("params"),
         py::arg("gamma"));
  bs.def("distortion_no_causal", &secrd::bsbcc::distortion_no_causal,
         py::arg("params"), py::arg("rate"));
  bs.def("distortion_causal", &secrd::bsbcc::distortion_causal,
         py::arg("params"), py::arg("rate"));
  bs.def("curve", &secrd::bsbcc::curve, py::arg("params"), py::arg("rates"));

  // --- multimode fiber ---
  py::module_ mf = m.def_submodule(
      "mmf", "Multimode-fiber MIMO secrecy regions and outage.");

  py::class_<secrd::mmf::MmfParams>(mf, "Params")
      .def(py::init([](int modes, double snr_db, double snre_db,
                       double mdl_db) {
             secrd::mmf::MmfParams s{modes, snr_db, snre_db, mdl_db};
             s.validate();
             return s;
           }),
           py::arg("modes"), py::arg("snr_db"), py::arg("snre_db"),
           py::arg("mdl_db"))
      .def_readonly("modes", &secrd::mmf::MmfParams::modes)
      .def_readonly("snr_db", &secrd::mmf::MmfParams::snr_db)
      .def_readonly("snre_db", &secrd::mmf::MmfParams::snre_db)
      .def_readonly("mdl_db", &secrd::mmf::MmfParams::mdl_db)
      .def("snr", &secrd::mmf::MmfParams::snr)
      .def("snre", &secrd::mmf::MmfParams::snre);

  py::class_<secrd::mmf::MdlSpectrum>(mf, "MdlSpectrum")
      .def(py::init([](std::vector<double> phi_bar) {
             secrd::mmf::MdlSpectrum s{std::move(phi_bar)};
             s.validate();
             return s;
           }),
           py::arg("phi_bar"))
      .def_readonly("phi_bar", &secrd::mmf::MdlSpectrum::phi_bar);

  py::class_<secrd::mmf::ChannelRealization>(mf, "ChannelRealization")
      .def_readonly("psi", &secrd::mmf::ChannelRealization::psi)
      .def_readonly("psi_e", &secrd::mmf::ChannelRealization::psi_e)
      .def_readonly("mdl", &secrd::mmf::ChannelRealization::mdl)
      .def("modes", &secrd::mmf::ChannelRealization::modes);

  py::class_<secrd::mmf::CovSpectrum>(mf, "CovSpectrum")
      .def(py::init([](std::vector<double> lambdas) {
             secrd::mmf::CovSpectrum s{std::move(lambdas)};
             s.validate();
             return s;
           }),
           py::arg("lambdas"))
      .def_readonly("lambdas", &secrd::mmf::CovSpectrum::lambdas);

  py::class_<secrd::mmf::RatePair>(mf, "RatePair")
      .def_readonly("rs", &secrd::mmf::RatePair::rs)
      .def_readonly("rs_raw", &secrd::mmf::RatePair::rs_raw)
      .def_readonly("rp", &secrd::mmf::RatePair::rp)
      .def("__repr__", [](const secrd::mmf::RatePair& r) {
        return "RatePair(rs=" + std::to_string(r.rs) +
               ", rp=" + std::to_string(r.rp) + ")";
      });

  py::class_<secrd::mmf::MaxRsResult>(mf, "MaxRsResult")
      .def_readonly("rs_star", &secrd::mmf::MaxRsResult::rs_star)
      .def_readonly("diag_value", &secrd::mmf::MaxRsResult::diag_value)
      .def_property_readonly("diag_argmax",
                             [](const secrd::mmf::MaxRsResult& r) {
                               return r.diag_argmax.lambdas;
                             })
      .def_readonly("general_value", &secrd::mmf::MaxRsResult::general_value)
      .def_readonly("general_argmax",
                    &secrd::mmf::MaxRsResult::general_argmax);

  py::class_<secrd::mmf::MmfRdPoint>(mf, "RdPoint")
      .def_readonly("rate", &secrd::mmf::MmfRdPoint::rate)
      .def_readonly("distortion", &secrd::mmf::MmfRdPoint::distortion)
      .def_property_readonly("regime",
                             [](const secrd::mmf::MmfRdPoint& pt) {
                               return regime_name(pt.regime);
                             })
      .def_readonly("alpha_bar", &secrd::mmf::MmfRdPoint::alpha_bar)
      .def_readonly("rs", &secrd::mmf::MmfRdPoint::rs)
      .def_readonly("rp", &secrd::mmf::MmfRdPoint::rp)
      .def_readonly("lambdas", &secrd::mmf::MmfRdPoint::lambdas)
      .def("__repr__", [](const secrd::mmf::MmfRdPoint& pt) {
        return "RdPoint(rate=" + std::to_string(pt.rate) + ", distortion=" +
               std::to_string(pt.distortion) + ", " + regime_name(pt.regime) +
               ")";
      });

  py::class_<secrd::mmf::OutageQuery>(mf, "OutageQuery")
      .def(py::init([](double rs_prime, double rate, double alpha,
                       std::uint64_t trials, std::uint64_t seed) {
             return secrd::mmf::OutageQuery{rs_prime, rate, alpha, trials,
                                            seed};
           }),
           py::arg("rs_prime"), py::arg("rate"), py::arg("alpha"),
           py::arg("trials"), py::arg("seed"))
      .def_readonly("rs_prime", &secrd::mmf::OutageQuery::rs_prime)
      .def_readonly("rate", &secrd::mmf::OutageQuery::rate)
      .def_readonly("alpha", &secrd::mmf::OutageQuery::alpha)
      .def_readonly("trials", &secrd::mmf::OutageQuery::trials)
      .def_readonly("seed", &secrd::mmf::OutageQuery::seed);

  py::class_<secrd::mmf::OutageEstimate>(mf, "OutageEstimate")
      .def_readonly("p_out", &secrd::mmf::OutageEstimate::p_out)
      .def_readonly("std_err", &secrd::mmf::OutageEstimate::std_err)
      .def_readonly("trials_used", &secrd::mmf::OutageEstimate::trials_used)
      .def_readonly("failures", &secrd::mmf::OutageEstimate::failures)
      .def("__repr__", [](const secrd::mmf::OutageEstimate& e) {
        return "OutageEstimate(p_out=" + std::to_string(e.p_out) + ")";
      });

  mf.def(
      "sample_realization",
      [](const secrd::mmf::MmfParams& params, std::uint64_t seed,
         std::uint64_t stream) {
        secrd::SeededRng rng(seed, stream);
        return secrd::mmf::sample_realization(params, rng);
      },
      py::arg("params"), py::arg("seed"), py::arg("stream") = 0);
  mf.def(
      "sample_mdl",
      [](int modes, double mdl_db, std::uint64_t seed, std::uint64_t stream) {
        secrd::SeededRng rng(seed, stream);
        return secrd::mmf::sample_mdl(modes, mdl_db, rng);
      },
      py::arg("modes"), py::arg("mdl_db"), py::arg("seed"),
      py::arg("stream") = 0);
  mf.def("rate_pair_diag", &secrd::mmf::rate_pair_diag, py::arg("params"),
         py::arg("mdl"), py::arg("spectrum"));
  mf.def("rate_pair_general", &secrd::mmf::rate_pair_general,
         py::arg("params"), py::arg("realization"), py::arg("k"));
  mf.def("check_secrecy_condition", &secrd::mmf::check_secrecy_condition,
         py::arg("params"), py::arg("mdl"));
  mf.def(
      "no_causal_region",
      [](const secrd::mmf::MmfParams& params,
         const secrd::mmf::MdlSpectrum& mdl, double source_entropy,
         double delta) {
        const auto r =
            secrd::mmf::no_causal_region(params, mdl, source_entropy, delta);
        py::dict d;
        d["rate_bound"] = r.rate_bound;
        d["distortion"] = r.distortion;
        return d;
      },
      py::arg("params"), py::arg("mdl"), py::arg("source_entropy"),
      py::arg("delta"));
  mf.def("max_rs", &secrd::mmf::max_rs, py::arg("params"),
         py::arg("realization"),
         py::call_guard<py::gil_scoped_release>());
  mf.def(
      "alpha_bar",
      [](const secrd::mmf::MmfParams& params,
         const secrd::mmf::ChannelRealization& realization,
         const secrd::mmf::HermitianCov& k) {
        const auto a = secrd::mmf::alpha_bar(params, realization, k);
        return py::make_tuple(a.value, a.raw);
      },
      py::arg("params"), py::arg("realization"), py::arg("k"),
      "Returns (clamped, raw).");
  mf.def("causal_curve", &secrd::mmf::causal_curve, py::arg("params"),
         py::arg("realization"), py::arg("source_p"), py::arg("rate_grid"),
         py::call_guard<py::gil_scoped_release>());
  mf.def("trial_success", &secrd::mmf::trial_success, py::arg("params"),
         py::arg("realization"), py::arg("query"), py::arg("source_entropy"));
  mf.def("estimate_outage", &secrd::mmf::estimate_outage, py::arg("params"),
         py::arg("query"), py::arg("source_entropy"), py::arg("threads") = 1,
         py::call_guard<py::gil_scoped_release>());

  // --- binning ---
  py::module_ bn = m.def_submodule(
      "binning", "Exact typical-set binning simulation.");

  py::class_<secrd::binning::BinningConfig>(bn, "Config")
      .def(py::init([](int k, double p, double rs_prime, double epsilon,
                       std::uint64_t seed) {
             secrd::binning::BinningConfig c{k, p, rs_prime, epsilon, seed};
             c.validate();
             return c;
           }),
           py::arg("k"), py::arg("p"), py::arg("rs_prime"),
           py::arg("epsilon"), py::arg("seed") = 0)
      .def_readonly("k", &secrd::binning::BinningConfig::k)
      .def_readonly("p", &secrd::binning::BinningConfig::p)
      .def_readonly("rs_prime", &secrd::binning::BinningConfig::rs_prime)
      .def_readonly("epsilon", &secrd::binning::BinningConfig::epsilon)
      .def_readonly("seed", &secrd::binning::BinningConfig::seed)
      .def("bin_size", &secrd::binning::BinningConfig::bin_size);

  py::class_<secrd::binning::SimResult>(bn, "SimResult")
      .def_readonly("eve_distortion", &secrd::binning::SimResult::eve_distortion)
      .def_readonly("bob_error", &secrd::binning::SimResult::bob_error)
      .def_readonly("bin_count", &secrd::binning::SimResult::bin_count)
      .def_readonly("leftover_mass", &secrd::binning::SimResult::leftover_mass)
      .def("__repr__", [](const secrd::binning::SimResult& r) {
        return "SimResult(eve_distortion=" + std::to_string(r.eve_distortion) +
               ", bob_error=" + std::to_string(r.bob_error) + ")";
      });

  bn.def("typical_set", &secrd::binning::typical_set, py::arg("k"),
         py::arg("p"), py::arg("epsilon"));
  bn.def("run", &secrd::binning::run, py::arg("config"),
         py::call_guard<py::gil_scoped_release>());
}
