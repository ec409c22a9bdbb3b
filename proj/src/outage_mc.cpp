#include "secrd/outage_mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "secrd/detail/envelope.hpp"
#include "secrd/info_math.hpp"
#include "secrd/rng.hpp"

namespace secrd::mmf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;
constexpr double kFeasTol = 1e-9;

using detail::ModeGeometry;

// Piecewise-linear sample of one reachable-region envelope, knots sorted by
// t. The waterfill phase is swept directly in the marginal level (no inner
// bisection); the bang-bang phase is sampled in t with its kinks included.
struct Polyline {
  std::vector<double> t;
  std::vector<double> g;

  double eval(double tq) const {
    if (tq <= t.front()) return g.front();
    if (tq >= t.back()) return g.back();
    const auto it = std::upper_bound(t.begin(), t.end(), tq);
    const size_t j = static_cast<size_t>(it - t.begin());
    const double w = (tq - t[j - 1]) / (t[j] - t[j - 1]);
    return g[j - 1] + w * (g[j] - g[j - 1]);
  }
};

void append_knot(Polyline& p, double t, double g) {
  if (!p.t.empty()) {
    if (t <= p.t.back() + 1e-12) return;
    g = std::max(g, p.g.back());  // both envelopes increase in t
  }
  p.t.push_back(t);
  p.g.push_back(g);
}

Polyline build_polyline(const ModeGeometry& geom, bool want_max) {
  Polyline p;
  append_knot(p, 0.0, 0.0);
  const std::vector<int>& first = want_max ? geom.ccv : geom.cvx;
  const std::vector<int>& last = want_max ? geom.cvx : geom.ccv;
  const double cap_first = want_max ? geom.cap_ccv : geom.cap_cvx;

  double t_base = 0.0, g_base = 0.0;
  if (!first.empty()) {
    // Marginal-level sweep. Slopes of a mode span [c, c(1+A)/(1+cA)]
    // (increasing for convex, the reverse for concave); log-spaced levels
    // across the pooled range cover every mode's transition.
    double lo = kInf, hi = 0.0;
    for (int i : first) {
      const double c = geom.c[i];
      const double term = c * (1.0 + geom.snr) / (1.0 + c * geom.snr);
      lo = std::min(lo, std::min(c, term));
      hi = std::max(hi, std::max(c, term));
    }
    lo *= 1.0 - 1e-9;
    hi *= 1.0 + 1e-9;
    const int kSweep = 96;
    std::vector<std::pair<double, double>> pts;
    for (int j = 0; j <= kSweep; ++j) {
      const double mu = lo * std::pow(hi / lo, static_cast<double>(j) / kSweep);
      double t = 0.0, g = 0.0;
      for (int i : first) {
        const double num = mu * (1.0 - geom.c[i]);
        const double den = geom.c[i] * (1.0 - mu);
        double x;
        if (num <= 0.0 || den <= 0.0 || (num > 0.0) != (den > 0.0)) {
          const bool convex = geom.c[i] < 1.0;
          x = (convex ? mu >= 1.0 : mu <= 1.0) ? geom.xbar : 0.0;
        } else {
          x = std::clamp(std::log2(num / den), 0.0, geom.xbar);
        }
        t += x;
        g += detail::psi_of_x(geom.c[i], x);
      }
      pts.emplace_back(t, g);
    }
    std::sort(pts.begin(), pts.end());
    for (const auto& [t, g] : pts) append_knot(p, t, g);
    t_base = cap_first;
    for (int i : first) g_base += geom.psi_bar[i];
    append_knot(p, t_base, g_base);
  }
  if (geom.cap_lin > 0.0) {
    t_base += geom.cap_lin;
    g_base += geom.cap_lin;
    append_knot(p, t_base, g_base);
  }
  if (!last.empty()) {
    const double cap = static_cast<double>(last.size()) * geom.xbar;
    std::vector<double> taus;
    const int kSamples = 24;
    for (int j = 1; j <= kSamples; ++j) taus.push_back(cap * j / kSamples);
    for (size_t k = 1; k < last.size(); ++k) taus.push_back(k * geom.xbar);
    std::sort(taus.begin(), taus.end());
    for (double tau : taus) {
      const double v = [&] {
        // Inline bang-bang extreme: the fractional budget depends only on
        // how many modes sit at xbar, so tabulate per-count values first.
        const int n = static_cast<int>(last.size());
        const int full = static_cast<int>(tau / geom.xbar);
        double best = want_max ? -kInf : kInf;
        for (int k = std::max(0, full - 1); k <= std::min(n, full + 1); ++k) {
          const double rem = tau - k * geom.xbar;
          if (rem < -1e-12 || rem > geom.xbar + 1e-12) continue;
          std::vector<double> frac(n);
          for (int j = 0; j < n; ++j) {
            frac[j] = rem > 1e-12 ? detail::psi_of_x(geom.c[last[j]],
                                                     std::min(rem, geom.xbar))
                                  : 0.0;
          }
          for (uint32_t mask = 0; mask < (1u << n); ++mask) {
            if (__builtin_popcount(mask) != k) continue;
            double base = 0.0;
            for (int j = 0; j < n; ++j) {
              if (mask & (1u << j)) base += geom.psi_bar[last[j]];
            }
            if (rem <= 1e-12) {
              best = want_max ? std::max(best, base) : std::min(best, base);
              continue;
            }
            for (int j = 0; j < n; ++j) {
              if (mask & (1u << j)) continue;
              const double v = base + frac[j];
              best = want_max ? std::max(best, v) : std::min(best, v);
            }
          }
        }
        return best;
      }();
      append_knot(p, t_base + tau, g_base + v);
    }
  }
  append_knot(p, geom.total_t, geom.gamma_full);
  return p;
}

struct ScanResult {
  double margin = -kInf;
  double t_star = 0.0;
};

// max over t of min(gmax, t - rs_req) - max(gmin, l_alpha); every piece is
// linear between merged knots, so the max sits at a knot or at a crossing
// inside a segment.
ScanResult scan_feasibility(const Polyline& pmin, const Polyline& pmax,
                            double t_lo, double t_hi, double rbar_s,
                            double l_alpha_level, double one_minus_alpha,
                            bool has_alpha) {
  ScanResult out;
  if (t_hi < t_lo) return out;
  auto upper = [&](double t) {
    const double lim = rbar_s > 1e-15 ? t - rbar_s : kInf;
    return std::min(pmax.eval(t), lim);
  };
  auto lower = [&](double t) {
    // l_alpha(t) = gamma_full - (1-alpha)*(total_t - t); the caller folds
    // gamma_full - (1-alpha)*total_t into l_alpha_level.
    const double la = has_alpha ? l_alpha_level + one_minus_alpha * t : -kInf;
    return std::max(pmin.eval(t), la);
  };
  auto consider = [&](double t) {
    if (t < t_lo || t > t_hi) return;
    const double f = upper(t) - lower(t);
    if (f > out.margin) {
      out.margin = f;
      out.t_star = t;
    }
  };
  std::vector<double> ts;
  ts.push_back(t_lo);
  ts.push_back(t_hi);
  for (double t : pmin.t) {
    if (t > t_lo && t < t_hi) ts.push_back(t);
  }
  for (double t : pmax.t) {
    if (t > t_lo && t < t_hi) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  for (double t : ts) consider(t);
  // Segment-interior crossings of the two pairs of linear pieces.
  for (size_t i = 0; i + 1 < ts.size(); ++i) {
    const double a = ts[i], b = ts[i + 1];
    if (b - a < 1e-12) continue;
    if (rbar_s > 1e-15) {
      const double fa = pmax.eval(a) - (a - rbar_s);
      const double fb = pmax.eval(b) - (b - rbar_s);
      if ((fa > 0.0) != (fb > 0.0)) {
        consider(a + (b - a) * fa / (fa - fb));
      }
    }
    if (has_alpha) {
      const double la_a = l_alpha_level + one_minus_alpha * a;
      const double la_b = l_alpha_level + one_minus_alpha * b;
      const double fa = pmin.eval(a) - la_a;
      const double fb = pmin.eval(b) - la_b;
      if ((fa > 0.0) != (fb > 0.0)) {
        consider(a + (b - a) * fa / (fa - fb));
      }
    }
  }
  return out;
}

Eigen::MatrixXcd clip_cov(const Eigen::MatrixXcd& k) {
  const Eigen::MatrixXcd sym = 0.5 * (k + k.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Min-margin ascent over general Hermitian K for near-miss draws.
bool refine_general(const MmfParams& params,
                    const ChannelRealization& realization,
                    const ModeGeometry& geom, double rbar_s, double rbar_p,
                    double alpha, const std::vector<double>& seed_lambdas) {
  const int m = realization.modes();
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(m, m);
  Eigen::MatrixXcd cmap = realization.psi_e;
  for (int i = 0; i < m; ++i) {
    cmap.row(i) *= std::sqrt(realization.mdl.phi_bar[i]);
  }
  const double snr = params.snr();
  const double snre = params.snre();

  auto log2det = [](const Eigen::MatrixXcd& h) {
    Eigen::LLT<Eigen::MatrixXcd> llt(h);
    double v = 0.0;
    const auto d = llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      v += 2.0 * std::log2(d(i).real());
    }
    return v;
  };

  struct Margins {
    double value;
    int active;
  };
  auto margins_of = [&](const Eigen::MatrixXcd& k) -> Margins {
    const double t = log2det(eye + snr * k);
    Eigen::MatrixXcd be = eye + snre * cmap * k * cmap.adjoint();
    be = 0.5 * (be + be.adjoint());
    const double gamma = log2det(be);
    const double m1 = std::max(0.0, t - gamma) - rbar_s;
    const double m2 = std::max(0.0, geom.total_t - t) - rbar_p;
    double m3 = kInf;
    if (alpha > 0.0) {
      const double beta_bar = geom.total_t - t;
      if (beta_bar <= 1e-12) {
        m3 = -1.0;
      } else {
        const double a =
            std::clamp(1.0 - (geom.gamma_full - gamma) / beta_bar, 0.0, 1.0);
        m3 = a - alpha;
      }
    }
    Margins out{m1, 0};
    if (m2 < out.value) out = {m2, 1};
    if (m3 < out.value) out = {m3, 2};
    return out;
  };

  std::vector<Eigen::MatrixXcd> starts;
  {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 0; i < m; ++i) d(i, i) = seed_lambdas[i];
    starts.push_back(
        clip_cov(realization.psi_e.adjoint() * d * realization.psi_e));
    starts.push_back(Eigen::MatrixXcd(0.5 * eye));
  }
  for (Eigen::MatrixXcd k : starts) {
    Margins cur = margins_of(k);
    double step = 0.1;
    for (int it = 0; it < 60 && cur.value < kFeasTol; ++it) {
      const Eigen::MatrixXcd gt = snr * (eye + snr * k).inverse() / kLn2;
      Eigen::MatrixXcd be = eye + snre * cmap * k * cmap.adjoint();
      be = 0.5 * (be + be.adjoint());
      const Eigen::MatrixXcd gg =
          snre * cmap.adjoint() * be.inverse() * cmap / kLn2;
      Eigen::MatrixXcd g;
      if (cur.active == 0) {
        g = gt - gg;
      } else if (cur.active == 1) {
        g = -gt;
      } else {
        const double t = log2det(eye + snr * k);
        const double beta_bar = std::max(geom.total_t - t, 1e-9);
        const double gamma = log2det(be);
        const double gamma_bar = geom.gamma_full - gamma;
        // alpha_bar = 1 - gamma_bar/beta_bar; d gamma_bar = -gg,
        // d beta_bar = -gt.
        g = (gg * beta_bar - gamma_bar * gt) / (beta_bar * beta_bar);
      }
      g = 0.5 * (g + g.adjoint());
      const double norm = g.norm();
      if (norm < 1e-14) break;
      bool accepted = false;
      while (step >= 1e-10) {
        const Eigen::MatrixXcd cand = clip_cov(k + (step / norm) * g);
        const Margins mc = margins_of(cand);
        if (mc.value > cur.value + 1e-14) {
          k = cand;
          cur = mc;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    if (cur.value >= -kFeasTol) return true;
  }
  return false;
}

}  // namespace

bool trial_success(const MmfParams& params,
                   const ChannelRealization& realization,
                   const OutageQuery& query, double source_entropy) {
  realization.validate();
  if (!(query.rate > 0.0)) {
    throw std::invalid_argument("rate must be positive");
  }
  if (!(query.rs_prime >= 0.0 && query.rs_prime <= source_entropy + 1e-12)) {
    throw std::invalid_argument(
        "rs_prime must lie in [0, source entropy]");
  }
  if (!(query.alpha >= 0.0 && query.alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  const ModeGeometry geom = detail::make_geometry(params, realization.mdl);
  const double rbar_s = query.rs_prime * query.rate;
  const double rbar_p = (source_entropy - query.rs_prime) * query.rate;

  double t_hi = geom.total_t - rbar_p;
  if (t_hi < -kFeasTol) return false;
  t_hi = std::min(t_hi, geom.total_t);
  const bool has_alpha = query.alpha > 0.0;
  if (has_alpha) t_hi = std::min(t_hi, geom.total_t - 1e-9);
  const double t_lo = std::max(0.0, rbar_s > 1e-15 ? rbar_s : 0.0);
  if (t_hi < t_lo) return false;

  const Polyline pmin = build_polyline(geom, false);
  const Polyline pmax = build_polyline(geom, true);
  const double l_alpha_level =
      geom.gamma_full - (1.0 - query.alpha) * geom.total_t;
  const ScanResult scan =
      scan_feasibility(pmin, pmax, t_lo, t_hi, rbar_s, l_alpha_level,
                       1.0 - query.alpha, has_alpha);
  if (scan.margin >= -kFeasTol) return true;
  if (scan.margin < -0.05) return false;

  // Near miss: seed the general-K pass from the best diagonal point.
  const double g_lo = detail::envelope_gamma(geom, scan.t_star, false, nullptr);
  const double g_hi = detail::envelope_gamma(geom, scan.t_star, true, nullptr);
  double g_want = 0.5 * ((rbar_s > 1e-15 ? scan.t_star - rbar_s : g_hi) +
                         (has_alpha ? l_alpha_level +
                                          (1.0 - query.alpha) * scan.t_star
                                    : g_lo));
  g_want = std::clamp(g_want, g_lo, g_hi);
  const std::vector<double> x =
      detail::surface_profile(geom, scan.t_star, g_want);
  return refine_general(params, realization, geom, rbar_s, rbar_p,
                        query.alpha, detail::lambdas_from_x(geom, x));
}

OutageEstimate estimate_outage(const MmfParams& params,
                               const OutageQuery& query, double source_entropy,
                               int threads) {
  if (query.trials == 0) {
    throw std::invalid_argument("trial count must be positive");
  }
  const std::uint64_t trials = query.trials;
  if (threads < 1) threads = 1;
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(threads, trials));

  std::atomic<std::uint64_t> failures{0};
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    std::uint64_t local = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      SeededRng rng(query.seed, i);
      const ChannelRealization ch = sample_realization(params, rng);
      if (!trial_success(params, ch, query, source_entropy)) ++local;
    }
    failures.fetch_add(local, std::memory_order_relaxed);
  };
  if (workers == 1) {
    work(0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, trials);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (std::thread& th : pool) th.join();
  }

  OutageEstimate est;
  est.trials_used = trials;
  est.failures = failures.load();
  est.p_out = static_cast<double>(est.failures) / static_cast<double>(trials);
  est.std_err =
      std::sqrt(est.p_out * (1.0 - est.p_out) / static_cast<double>(trials));
  return est;
}

}  // namespace secrd::mmf
