#include "secrd/mmf_regions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "secrd/detail/envelope.hpp"
#include "secrd/info_math.hpp"
#include "secrd/rng.hpp"

namespace secrd::mmf {
namespace detail {

namespace {

constexpr double kCurvTol = 1e-12;  // |c-1| below this counts as linear

// Allocation x(mu) with marginal psi' = mu; psi'(x) = c*u/(1+c*(u-1)) with
// u = 2^x inverts to u = mu*(1-c)/(c*(1-mu)), the same expression for both
// curvature signs.
double x_at_marginal(double c, double mu, double xbar) {
  const double num = mu * (1.0 - c);
  const double den = c * (1.0 - mu);
  if (num <= 0.0 || den <= 0.0) {
    // Sign mismatch: the requested marginal lies outside this mode's range.
    const bool convex = c < 1.0;
    if (convex) return mu >= 1.0 ? xbar : 0.0;
    return mu <= 1.0 ? xbar : 0.0;
  }
  const double x = std::log2(num / den);
  return std::clamp(x, 0.0, xbar);
}

// Equal-marginal fill of a single-curvature-class set. Monotone in the
// bisection parameter s in (0,1): mu = s for the convex class, 1/s for the
// concave one, and every x_i(s) is nondecreasing either way.
double waterfill(const ModeGeometry& geom, const std::vector<int>& set,
                 double budget, std::vector<double>* profile) {
  if (set.empty() || budget <= 0.0) return 0.0;
  const double cap = static_cast<double>(set.size()) * geom.xbar;
  if (budget >= cap - 1e-13) {
    double v = 0.0;
    for (int i : set) {
      if (profile) (*profile)[i] = geom.xbar;
      v += geom.psi_bar[i];
    }
    return v;
  }
  const bool convex = geom.c[set.front()] < 1.0;
  auto total_x = [&](double s) {
    const double mu = convex ? s : 1.0 / s;
    double sum = 0.0;
    for (int i : set) sum += x_at_marginal(geom.c[i], mu, geom.xbar);
    return sum;
  };
  double lo = 1e-300, hi = 1.0 - 1e-16;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (total_x(mid) < budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mu = convex ? hi : 1.0 / hi;
  double sum = 0.0;
  int slack = -1;
  std::vector<double> xs(set.size());
  for (size_t k = 0; k < set.size(); ++k) {
    xs[k] = x_at_marginal(geom.c[set[k]], mu, geom.xbar);
    sum += xs[k];
    if (xs[k] > 1e-11 && xs[k] < geom.xbar - 1e-11) slack = static_cast<int>(k);
  }
  if (slack >= 0) {
    xs[slack] = std::clamp(xs[slack] + (budget - sum), 0.0, geom.xbar);
  }
  double v = 0.0;
  for (size_t k = 0; k < set.size(); ++k) {
    if (profile) (*profile)[set[k]] = xs[k];
    v += psi_of_x(geom.c[set[k]], xs[k]);
  }
  return v;
}

// Bang-bang extreme of a single-curvature-class set: at most one fractional
// coordinate at the optimum, so enumerate full-subsets plus a fractional one.
double vertex_extreme(const ModeGeometry& geom, const std::vector<int>& set,
                      double budget, bool want_max,
                      std::vector<double>* profile) {
  const int n = static_cast<int>(set.size());
  if (n == 0 || budget <= 0.0) return 0.0;
  const double cap = n * geom.xbar;
  if (budget >= cap - 1e-13) {
    double v = 0.0;
    for (int i : set) {
      if (profile) (*profile)[i] = geom.xbar;
      v += geom.psi_bar[i];
    }
    return v;
  }
  double best = want_max ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  uint32_t best_mask = 0;
  int best_frac = -1;
  double best_frac_x = 0.0;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int k = __builtin_popcount(mask);
    const double rem = budget - k * geom.xbar;
    if (rem < -1e-12 || rem > geom.xbar + 1e-12) continue;
    double base = 0.0;
    for (int j = 0; j < n; ++j) {
      if (mask & (1u << j)) base += geom.psi_bar[set[j]];
    }
    if (rem <= 1e-12) {
      if (want_max ? base > best : base < best) {
        best = base;
        best_mask = mask;
        best_frac = -1;
      }
      continue;
    }
    const double xf = std::min(rem, geom.xbar);
    for (int j = 0; j < n; ++j) {
      if (mask & (1u << j)) continue;
      const double v = base + psi_of_x(geom.c[set[j]], xf);
      if (want_max ? v > best : v < best) {
        best = v;
        best_mask = mask;
        best_frac = j;
        best_frac_x = xf;
      }
    }
  }
  if (profile) {
    for (int j = 0; j < n; ++j) {
      double x = (best_mask & (1u << j)) ? geom.xbar : 0.0;
      if (j == best_frac) x = best_frac_x;
      (*profile)[set[j]] = x;
    }
  }
  return best;
}

// Linear modes contribute exactly their budget; profile fills them in index
// order, which is value-neutral.
double fill_linear(const ModeGeometry& geom, double budget,
                   std::vector<double>* profile) {
  if (profile) {
    double rem = budget;
    for (int i : geom.lin) {
      const double x = std::clamp(rem, 0.0, geom.xbar);
      (*profile)[i] = x;
      rem -= x;
    }
  }
  return budget;
}

}  // namespace

ModeGeometry make_geometry(const MmfParams& params, const MdlSpectrum& mdl) {
  ModeGeometry g;
  g.snr = params.snr();
  g.snre = params.snre();
  g.xbar = std::log2(1.0 + g.snr);
  const int m = static_cast<int>(mdl.phi_bar.size());
  g.total_t = m * g.xbar;
  g.b.resize(m);
  g.c.resize(m);
  g.psi_bar.resize(m);
  for (int i = 0; i < m; ++i) {
    g.b[i] = g.snre * mdl.phi_bar[i];
    g.c[i] = g.b[i] / g.snr;
    g.psi_bar[i] = std::log2(1.0 + g.b[i]);
    g.gamma_full += g.psi_bar[i];
    if (g.c[i] < 1.0 - kCurvTol) {
      g.cvx.push_back(i);
    } else if (g.c[i] > 1.0 + kCurvTol) {
      g.ccv.push_back(i);
    } else {
      g.lin.push_back(i);
    }
  }
  g.cap_cvx = g.cvx.size() * g.xbar;
  g.cap_ccv = g.ccv.size() * g.xbar;
  g.cap_lin = g.lin.size() * g.xbar;
  return g;
}

double psi_of_x(double c, double x) {
  return std::log2(1.0 + c * (std::exp2(x) - 1.0));
}

double gamma_of_profile(const ModeGeometry& geom,
                        const std::vector<double>& x) {
  double v = 0.0;
  for (int i = 0; i < geom.modes(); ++i) v += psi_of_x(geom.c[i], x[i]);
  return v;
}

double envelope_gamma(const ModeGeometry& geom, double t, bool want_max,
                      std::vector<double>* profile) {
  t = std::clamp(t, 0.0, geom.total_t);
  if (profile) profile->assign(geom.modes(), 0.0);
  // Slopes are globally ordered: convex < 1, linear = 1, concave > 1. The
  // max loads concave modes first, the min loads convex modes first; the
  // class whose extreme is interior-type gets the waterfill, the other one
  // the vertex enumeration.
  const std::vector<int>& first = want_max ? geom.ccv : geom.cvx;
  const std::vector<int>& last = want_max ? geom.cvx : geom.ccv;
  const double cap_first = want_max ? geom.cap_ccv : geom.cap_cvx;
  const double b1 = std::min(t, cap_first);
  const double b2 = std::min(t - b1, geom.cap_lin);
  const double b3 = t - b1 - b2;
  double v = waterfill(geom, first, b1, profile);
  v += fill_linear(geom, b2, profile);
  v += vertex_extreme(geom, last, b3, want_max, profile);
  return v;
}

double t_at_gamma(const ModeGeometry& geom, double g, bool upper) {
  if (g <= 0.0) return 0.0;
  if (g >= geom.gamma_full) return geom.total_t;
  double lo = 0.0, hi = geom.total_t;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double val = envelope_gamma(geom, mid, !upper, nullptr);
    if (val < g) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> surface_profile(const ModeGeometry& geom, double t,
                                    double g) {
  std::vector<double> x_lo(geom.modes()), x_hi(geom.modes());
  const double g_lo = envelope_gamma(geom, t, false, &x_lo);
  const double g_hi = envelope_gamma(geom, t, true, &x_hi);
  if (g <= g_lo) return x_lo;
  if (g >= g_hi) return x_hi;
  std::vector<double> blend(geom.modes());
  auto eval = [&](double th) {
    for (int i = 0; i < geom.modes(); ++i) {
      blend[i] = (1.0 - th) * x_lo[i] + th * x_hi[i];
    }
    return gamma_of_profile(geom, blend);
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eval(mid) < g) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  eval(0.5 * (lo + hi));
  return blend;
}

std::vector<double> lambdas_from_x(const ModeGeometry& geom,
                                   const std::vector<double>& x) {
  std::vector<double> l(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    l[i] = std::clamp((std::exp2(x[i]) - 1.0) / geom.snr, 0.0, 1.0);
  }
  return l;
}

}  // namespace detail

namespace {

constexpr double kLn2 = 0.6931471805599453;

double log2det_hpd(const Eigen::MatrixXcd& m) {
  Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (llt.info() == Eigen::Success) {
    double v = 0.0;
    const auto d = llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      v += 2.0 * std::log2(d(i).real());
    }
    return v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  double v = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    v += std::log2(std::max(es.eigenvalues()(i), 1e-300));
  }
  return v;
}

Eigen::MatrixXcd eve_map(const ChannelRealization& realization) {
  const int m = realization.modes();
  Eigen::MatrixXcd c = realization.psi_e;
  for (int i = 0; i < m; ++i) {
    c.row(i) *= std::sqrt(realization.mdl.phi_bar[i]);
  }
  return c;  // sqrt(Phi)*Psi_e
}

Eigen::MatrixXcd clip_cov(const Eigen::MatrixXcd& k) {
  const Eigen::MatrixXcd sym = 0.5 * (k + k.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

struct GeneralRates {
  double t;
  double gamma;
};

GeneralRates eval_general(const MmfParams& params, const Eigen::MatrixXcd& c,
                          const Eigen::MatrixXcd& k) {
  const int m = static_cast<int>(k.rows());
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(m, m);
  const double t = log2det_hpd(eye + params.snr() * k);
  Eigen::MatrixXcd be = eye + params.snre() * c * k * c.adjoint();
  be = 0.5 * (be + be.adjoint());
  return {t, log2det_hpd(be)};
}

}  // namespace

void CovSpectrum::validate() const {
  if (lambdas.empty()) {
    throw std::invalid_argument("covariance spectrum is empty");
  }
  for (double l : lambdas) {
    if (!(l >= -1e-12 && l <= 1.0 + 1e-12)) {
      throw std::invalid_argument(
          "covariance spectrum entry outside [0, 1]: " + std::to_string(l));
    }
  }
}

RatePair rate_pair_diag(const MmfParams& params, const MdlSpectrum& mdl,
                        const CovSpectrum& spectrum) {
  spectrum.validate();
  mdl.validate();
  if (spectrum.lambdas.size() != mdl.phi_bar.size()) {
    throw std::invalid_argument("spectrum/mdl mode count mismatch");
  }
  const double snr = params.snr();
  const double snre = params.snre();
  double t = 0.0, gamma = 0.0;
  for (size_t i = 0; i < spectrum.lambdas.size(); ++i) {
    const double l = std::clamp(spectrum.lambdas[i], 0.0, 1.0);
    t += std::log2(1.0 + snr * l);
    gamma += std::log2(1.0 + snre * mdl.phi_bar[i] * l);
  }
  RatePair out;
  out.rs_raw = t - gamma;
  out.rs = std::max(0.0, out.rs_raw);
  out.rp = std::max(0.0, mdl.phi_bar.size() * std::log2(1.0 + snr) - t);
  return out;
}

RatePair rate_pair_general(const MmfParams& params,
                           const ChannelRealization& realization,
                           const HermitianCov& k) {
  realization.validate();
  const int m = realization.modes();
  if (k.rows() != m || k.cols() != m) {
    throw std::invalid_argument("covariance dimension mismatch");
  }
  if ((k - k.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("covariance is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (k + k.adjoint()));
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo < -1e-10 || hi > 1.0 + 1e-10) {
    throw std::invalid_argument("covariance eigenvalues outside [0, 1]");
  }
  const Eigen::MatrixXcd ks = clip_cov(k);
  const GeneralRates gr = eval_general(params, eve_map(realization), ks);
  RatePair out;
  out.rs_raw = gr.t - gr.gamma;
  out.rs = std::max(0.0, out.rs_raw);
  out.rp = std::max(0.0, m * std::log2(1.0 + params.snr()) - gr.t);
  return out;
}

bool check_secrecy_condition(const MmfParams& params, const MdlSpectrum& mdl) {
  mdl.validate();
  const double min_phi =
      *std::min_element(mdl.phi_bar.begin(), mdl.phi_bar.end());
  return min_phi < params.snr() / params.snre();
}

NoCausalRegion no_causal_region(const MmfParams& params,
                                const MdlSpectrum& mdl, double source_entropy,
                                double delta) {
  if (!(source_entropy > 0.0)) {
    throw std::invalid_argument("source entropy must be positive");
  }
  if (!check_secrecy_condition(params, mdl)) {
    throw SecrecyConditionError(
        "secrecy condition fails: min attenuation >= snr/snr_e");
  }
  NoCausalRegion r;
  r.rate_bound =
      mdl.phi_bar.size() * std::log2(1.0 + params.snr()) / source_entropy;
  r.distortion = delta;
  return r;
}

MaxRsResult max_rs(const MmfParams& params,
                   const ChannelRealization& realization) {
  realization.validate();
  const int m = realization.modes();
  const double snr = params.snr();
  const double snre = params.snre();

  MaxRsResult result;
  // Coordinate ascent over the diagonal family. Each coordinate's term
  // log2(1+SNR*l) - log2(1+SNR_e*phibar_i*l) has a derivative of constant
  // sign, so the 1-D optimum is an endpoint and the sweep settles at once.
  result.diag_argmax.lambdas.assign(m, 0.5);
  for (int pass = 0; pass < 50; ++pass) {
    bool changed = false;
    for (int i = 0; i < m; ++i) {
      const double opt =
          snr >= snre * realization.mdl.phi_bar[i] ? 1.0 : 0.0;
      if (result.diag_argmax.lambdas[i] != opt) {
        result.diag_argmax.lambdas[i] = opt;
        changed = true;
      }
    }
    if (!changed) break;
  }
  result.diag_value =
      rate_pair_diag(params, realization.mdl, result.diag_argmax).rs_raw;

  const Eigen::MatrixXcd c = eve_map(realization);
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(m, m);
  auto rs_of = [&](const Eigen::MatrixXcd& k) {
    const GeneralRates gr = eval_general(params, c, k);
    return gr.t - gr.gamma;
  };
  auto grad_of = [&](const Eigen::MatrixXcd& k) {
    const Eigen::MatrixXcd g1 =
        snr * (eye + snr * k).inverse();
    Eigen::MatrixXcd be = eye + snre * c * k * c.adjoint();
    be = 0.5 * (be + be.adjoint());
    const Eigen::MatrixXcd g2 = snre * c.adjoint() * be.inverse() * c;
    Eigen::MatrixXcd g = (g1 - g2) / kLn2;
    return Eigen::MatrixXcd(0.5 * (g + g.adjoint()));
  };

  Eigen::MatrixXcd diag_start = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 0; i < m; ++i) diag_start(i, i) = result.diag_argmax.lambdas[i];
  diag_start = realization.psi_e.adjoint() * diag_start * realization.psi_e;

  SeededRng rng(0xD1A60, 0);
  Eigen::MatrixXcd gauss(m, m);
  for (int r = 0; r < m; ++r) {
    for (int cc = 0; cc < m; ++cc) gauss(r, cc) = rng.complex_normal();
  }
  Eigen::MatrixXcd random_start = gauss * gauss.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> res(random_start);
  random_start /= res.eigenvalues().maxCoeff() + 1e-12;

  std::vector<Eigen::MatrixXcd> starts = {clip_cov(diag_start),
                                          Eigen::MatrixXcd(0.5 * eye), eye,
                                          clip_cov(random_start)};

  result.general_value = -std::numeric_limits<double>::infinity();
  for (const Eigen::MatrixXcd& start : starts) {
    Eigen::MatrixXcd k = start;
    double val = rs_of(k);
    double step = 0.1;
    for (int it = 0; it < 500; ++it) {
      const Eigen::MatrixXcd g = grad_of(k);
      bool accepted = false;
      while (step >= 1e-12) {
        const Eigen::MatrixXcd cand = clip_cov(k + step * g);
        const double cand_val = rs_of(cand);
        if (cand_val > val) {
          const double gain = cand_val - val;
          k = cand;
          val = cand_val;
          accepted = true;
          if (gain < 1e-10) it = 500;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    if (val > result.general_value) {
      result.general_value = val;
      result.general_argmax = k;
    }
  }
  result.rs_star = std::max(result.diag_value, result.general_value);
  return result;
}

AlphaBarValue alpha_bar(const MmfParams& params,
                        const ChannelRealization& realization,
                        const HermitianCov& k) {
  realization.validate();
  const int m = realization.modes();
  if (k.rows() != m || k.cols() != m) {
    throw std::invalid_argument("covariance dimension mismatch");
  }
  const Eigen::MatrixXcd ks = clip_cov(k);
  const GeneralRates gr = eval_general(params, eve_map(realization), ks);
  const double beta_bar = m * std::log2(1.0 + params.snr()) - gr.t;
  double gamma_full = 0.0;
  for (double phi : realization.mdl.phi_bar) {
    gamma_full += std::log2(1.0 + params.snre() * phi);
  }
  const double gamma_bar = gamma_full - gr.gamma;
  if (beta_bar <= 1e-9) {
    throw std::domain_error(
        "alpha_bar undefined: residual public rate is zero at K = I");
  }
  AlphaBarValue v;
  v.raw = (beta_bar - gamma_bar) / beta_bar;
  v.value = std::clamp(v.raw, 0.0, 1.0);
  return v;
}

AlphaBarValue alpha_bar_diag(const MmfParams& params, const MdlSpectrum& mdl,
                             const CovSpectrum& spectrum) {
  spectrum.validate();
  mdl.validate();
  if (spectrum.lambdas.size() != mdl.phi_bar.size()) {
    throw std::invalid_argument("spectrum/mdl mode count mismatch");
  }
  const double snr = params.snr();
  const double snre = params.snre();
  double beta_bar = 0.0, gamma_bar = 0.0;
  for (size_t i = 0; i < spectrum.lambdas.size(); ++i) {
    const double l = std::clamp(spectrum.lambdas[i], 0.0, 1.0);
    beta_bar += std::log2((1.0 + snr) / (1.0 + snr * l));
    gamma_bar += std::log2((1.0 + snre * mdl.phi_bar[i]) /
                           (1.0 + snre * mdl.phi_bar[i] * l));
  }
  if (beta_bar <= 1e-9) {
    throw std::domain_error(
        "alpha_bar undefined: residual public rate is zero at K = I");
  }
  AlphaBarValue v;
  v.raw = (beta_bar - gamma_bar) / beta_bar;
  v.value = std::clamp(v.raw, 0.0, 1.0);
  return v;
}

namespace {

// Distortion at a surface point as a function of (t, gamma); on the
// rate-matching surface gamma = c, but the refinement needs it off-surface.
double surface_distortion(double t, double gamma, double rate, double total_t,
                          double gamma_full, double delta, double p_max) {
  const double beta_bar = total_t - t;
  const double gamma_bar = gamma_full - gamma;
  double a;
  if (beta_bar <= 1e-12) {
    a = gamma_bar <= 1e-12 ? 1.0 : 0.0;
  } else {
    a = std::clamp((beta_bar - gamma_bar) / beta_bar, 0.0, 1.0);
  }
  const double rs = std::max(0.0, t - gamma);
  return a * delta + (1.0 - a) * d_cap(rs / rate, p_max);
}

}  // namespace

std::vector<MmfRdPoint> causal_curve(const MmfParams& params,
                                     const ChannelRealization& realization,
                                     double source_p,
                                     const std::vector<double>& rate_grid) {
  realization.validate();
  if (!(source_p > 0.0 && source_p < 1.0)) {
    throw std::invalid_argument("source probability must lie in (0, 1)");
  }
  for (double r : rate_grid) {
    if (!(r > 0.0)) {
      throw std::invalid_argument("rate grid entries must be positive");
    }
  }
  const detail::ModeGeometry geom =
      detail::make_geometry(params, realization.mdl);
  const double entropy = binary_entropy(source_p);
  const double delta = std::min(source_p, 1.0 - source_p);
  const double p_max = std::max(source_p, 1.0 - source_p);
  const double plateau_d = d_cap(entropy, p_max);

  const MaxRsResult mr = max_rs(params, realization);
  const double rate_plateau = mr.rs_star / entropy;
  const double rate_feasible = geom.total_t / entropy;
  const RatePair plateau_rates =
      rate_pair_diag(params, realization.mdl, mr.diag_argmax);

  const Eigen::MatrixXcd cmap = eve_map(realization);
  const Eigen::MatrixXcd eye =
      Eigen::MatrixXcd::Identity(geom.modes(), geom.modes());

  std::vector<MmfRdPoint> out;
  out.reserve(rate_grid.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double rate : rate_grid) {
    MmfRdPoint pt;
    pt.rate = rate;
    if (rate <= rate_plateau * (1.0 + 1e-9)) {
      pt.regime = MmfRegime::kPlateau;
      pt.distortion = plateau_d;
      pt.alpha_bar = 1.0;
      pt.rs = mr.rs_star;
      pt.rp = plateau_rates.rp;
      pt.lambdas = mr.diag_argmax.lambdas;
      out.push_back(std::move(pt));
      continue;
    }
    if (rate > rate_feasible * (1.0 + 1e-9)) {
      pt.regime = MmfRegime::kInfeasible;
      pt.distortion = nan;
      pt.alpha_bar = nan;
      pt.rs = nan;
      pt.rp = nan;
      out.push_back(std::move(pt));
      continue;
    }
    pt.regime = MmfRegime::kTradeoff;
    const double c =
        std::clamp(geom.total_t - rate * entropy, 0.0, geom.gamma_full);
    const double t_lo = detail::t_at_gamma(geom, c, false);
    const double t_hi =
        std::min(detail::t_at_gamma(geom, c, true), geom.total_t - 1e-9);
    auto obj = [&](double t) {
      return surface_distortion(t, c, rate, geom.total_t, geom.gamma_full,
                                delta, p_max);
    };
    // Dense scan then golden-section refinement around the best sample.
    const int kGrid = 600;
    double best_t = t_lo, best_v = obj(t_lo);
    for (int i = 1; i <= kGrid; ++i) {
      const double t = t_lo + (t_hi - t_lo) * i / kGrid;
      const double v = obj(t);
      if (v > best_v) {
        best_v = v;
        best_t = t;
      }
    }
    {
      const double span = (t_hi - t_lo) / kGrid;
      double a = std::max(t_lo, best_t - span);
      double b = std::min(t_hi, best_t + span);
      const double gr = 0.6180339887498949;
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = obj(x1), f2 = obj(x2);
      for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = obj(x2);
        } else {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = obj(x1);
        }
      }
      const double mid = 0.5 * (a + b);
      if (obj(mid) > best_v) {
        best_v = obj(mid);
        best_t = mid;
      }
    }

    std::vector<double> x = detail::surface_profile(geom, best_t, c);
    std::vector<double> lambdas = detail::lambdas_from_x(geom, x);

    pt.distortion = best_v;
    pt.lambdas = lambdas;
    {
      CovSpectrum sp{lambdas};
      const RatePair rp = rate_pair_diag(params, realization.mdl, sp);
      pt.rs = rp.rs;
      pt.rp = rp.rp;
      const double beta_bar = geom.total_t - best_t;
      pt.alpha_bar =
          beta_bar <= 1e-12
              ? 1.0
              : std::clamp((beta_bar - (geom.gamma_full - c)) / beta_bar, 0.0,
                           1.0);
    }

    // General-K refinement: ascend the same objective with the surface
    // constraint as an exact penalty; only a strictly better feasible point
    // replaces the diagonal solution.
    {
      Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(geom.modes(), geom.modes());
      for (int i = 0; i < geom.modes(); ++i) k(i, i) = lambdas[i];
      k = clip_cov(realization.psi_e.adjoint() * k * realization.psi_e);
      const double rho = 10.0;
      auto fval = [&](const GeneralRates& gr2) {
        return surface_distortion(gr2.t, gr2.gamma, rate, geom.total_t,
                                  geom.gamma_full, delta, p_max) -
               rho * std::abs(gr2.gamma - c);
      };
      GeneralRates gr2 = eval_general(params, cmap, k);
      double val = fval(gr2);
      double step = 0.05;
      for (int it = 0; it < 40; ++it) {
        // dJ/dK = (dF/dt)*grad t + (dF/dgamma)*grad gamma, with the scalar
        // partials taken by central differences.
        const double ht = 1e-6;
        const double dft = (fval({gr2.t + ht, gr2.gamma}) -
                            fval({gr2.t - ht, gr2.gamma})) /
                           (2.0 * ht);
        const double dfg = (fval({gr2.t, gr2.gamma + ht}) -
                            fval({gr2.t, gr2.gamma - ht})) /
                           (2.0 * ht);
        const Eigen::MatrixXcd gt =
            params.snr() * (eye + params.snr() * k).inverse() / kLn2;
        Eigen::MatrixXcd be =
            eye + params.snre() * cmap * k * cmap.adjoint();
        be = 0.5 * (be + be.adjoint());
        const Eigen::MatrixXcd gg =
            params.snre() * cmap.adjoint() * be.inverse() * cmap / kLn2;
        Eigen::MatrixXcd g = dft * gt + dfg * gg;
        g = 0.5 * (g + g.adjoint());
        bool accepted = false;
        while (step >= 1e-10) {
          const Eigen::MatrixXcd cand = clip_cov(k + step * g);
          const GeneralRates cr = eval_general(params, cmap, cand);
          const double cv = fval(cr);
          if (cv > val + 1e-14) {
            k = cand;
            gr2 = cr;
            val = cv;
            accepted = true;
            break;
          }
          step *= 0.5;
        }
        if (!accepted) break;
      }
      if (std::abs(gr2.gamma - c) <= 1e-7) {
        const double d_gen =
            surface_distortion(gr2.t, gr2.gamma, rate, geom.total_t,
                               geom.gamma_full, delta, p_max);
        if (d_gen > pt.distortion + 1e-12) {
          pt.distortion = d_gen;
          const RatePair rp = rate_pair_general(params, realization, k);
          pt.rs = rp.rs;
          pt.rp = rp.rp;
          const double beta_bar = geom.total_t - gr2.t;
          pt.alpha_bar =
              beta_bar <= 1e-12
                  ? 1.0
                  : std::clamp(
                        (beta_bar - (geom.gamma_full - gr2.gamma)) / beta_bar,
                        0.0, 1.0);
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
          pt.lambdas.assign(es.eigenvalues().data(),
                            es.eigenvalues().data() + geom.modes());
        }
      }
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace secrd::mmf
