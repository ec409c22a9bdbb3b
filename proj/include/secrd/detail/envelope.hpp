#pragma once

#include <vector>

#include "secrd/mmf_model.hpp"

// Reachable-region geometry for the diagonal covariance family, shared by the
// curve solver and the outage sampler. With x_i = log2(1+SNR*l_i) the box
// l in [0,1]^M becomes x in [0,xbar]^M, t = sum x_i, and the eavesdropper
// log-det splits into sum_i psi_i(x_i) with psi_i(x) = log2(1+c_i*(2^x-1)),
// c_i = SNR_e*phibar_i/SNR. psi_i is convex for c_i < 1 and concave for
// c_i > 1, with slope < 1 resp. > 1 on the whole interval, so the extremal
// allocation fills slope classes in a fixed order: within a class, an
// equal-marginal waterfill for the interior-type extreme and a vertex
// enumeration for the bang-bang one.

namespace secrd::mmf::detail {

struct ModeGeometry {
  double snr = 0.0;
  double snre = 0.0;
  double xbar = 0.0;     // log2(1+SNR), per-mode budget
  double total_t = 0.0;  // M*xbar
  double gamma_full = 0.0;
  std::vector<double> b;        // SNR_e*phibar_i
  std::vector<double> c;        // b_i/SNR
  std::vector<double> psi_bar;  // psi_i(xbar) = log2(1+b_i)
  std::vector<int> cvx, ccv, lin;
  double cap_cvx = 0.0, cap_ccv = 0.0, cap_lin = 0.0;

  int modes() const { return static_cast<int>(c.size()); }
};

ModeGeometry make_geometry(const MmfParams& params, const MdlSpectrum& mdl);

double psi_of_x(double c, double x);
double gamma_of_profile(const ModeGeometry& geom,
                        const std::vector<double>& x);

// Extreme of sum_i psi_i(x_i) subject to sum x_i = t over the box. Exact up
// to waterfill bisection tolerance. Fills the attaining profile if requested.
double envelope_gamma(const ModeGeometry& geom, double t, bool want_max,
                      std::vector<double>* profile);

// Inverts the strictly increasing envelopes: upper = largest t with
// gamma_min(t) <= g, otherwise smallest t with gamma_max(t) >= g.
double t_at_gamma(const ModeGeometry& geom, double g, bool upper);

// Profile with sum x = t and gamma(x) = g, found by bisecting the linear
// blend between the two envelope profiles at t (sum is preserved exactly).
std::vector<double> surface_profile(const ModeGeometry& geom, double t,
                                    double g);

std::vector<double> lambdas_from_x(const ModeGeometry& geom,
                                   const std::vector<double>& x);

}  // namespace secrd::mmf::detail
