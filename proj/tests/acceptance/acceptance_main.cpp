// Acceptance gate: every release-blocking behavior checked end to end, one
// printed verdict per criterion. Tolerances are pinned here on purpose;
// loosening them is a release decision, not a test fix.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "secrd/binning_sim.hpp"
#include "secrd/bsbcc.hpp"
#include "secrd/info_math.hpp"
#include "secrd/mmf_model.hpp"
#include "secrd/mmf_regions.hpp"
#include "secrd/outage_mc.hpp"
#include "secrd/rng.hpp"

namespace {

using secrd::SeededRng;
using secrd::mmf::ChannelRealization;
using secrd::mmf::CovSpectrum;
using secrd::mmf::MmfParams;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, ap);
  va_end(ap);
  return buf;
}

const secrd::bsbcc::BsbccParams kBsbcc{0.3, 0.1, 0.2};
const MmfParams kMmf{4, 20.0, 10.0, 20.0};

// Reference values recomputed independently at 50-digit precision.
constexpr double kRateMax = 0.6025302279579305;
constexpr double kRateKink = 0.2870022843976650;
constexpr double kEndpointD = 0.1428985324290006;
constexpr double kGammaNearKink = 0.4999708723045613;
constexpr double kCapacityRate03 = 30.220266604654437;
constexpr double kCapacityRate05 = 26.632845931007179;
constexpr double kScalarRs = 3.1987798641144975;

ChannelRealization reference_realization() {
  SeededRng rng(42, 0);
  return secrd::mmf::sample_realization(kMmf, rng);
}

CovSpectrum random_spectrum(int m, SeededRng& rng) {
  CovSpectrum sp;
  sp.lambdas.resize(m);
  for (double& l : sp.lambdas) l = rng.uniform();
  return sp;
}

Eigen::MatrixXcd diag_cov(const ChannelRealization& real,
                          const CovSpectrum& sp) {
  int m = real.modes();
  Eigen::MatrixXcd lam = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 0; i < m; ++i) lam(i, i) = sp.lambdas[i];
  return real.psi_e.adjoint() * lam * real.psi_e;
}

double log2_abs_det(const Eigen::MatrixXcd& m) {
  return std::log2(std::abs(m.determinant()));
}

Outcome criterion1() {
  double rmax = secrd::bsbcc::rate_max(kBsbcc);
  double rkink = secrd::bsbcc::rate_kink(kBsbcc);
  double plateau = secrd::bsbcc::distortion_causal(kBsbcc, 0.15);
  double plateau_nc = secrd::bsbcc::distortion_no_causal(kBsbcc, 0.15);
  double endpoint = secrd::bsbcc::distortion_causal(kBsbcc, rmax);
  Outcome o;
  o.pass = std::abs(rmax - kRateMax) <= 1e-5 &&
           std::abs(rkink - kRateKink) <= 1e-5 && plateau == 0.3 &&
           plateau_nc == 0.3 && std::abs(endpoint - kEndpointD) <= 1e-5;
  o.detail = strf("rate_max=%.8f kink=%.8f plateau=%g endpoint=%.8f", rmax,
                  rkink, plateau, endpoint);
  return o;
}

Outcome criterion2() {
  // The computed boundary is fed back directly; the rounded constant can sit
  // an ulp past it and trip the strict feasibility check.
  double g_at_max =
      secrd::bsbcc::solve_gamma(kBsbcc, secrd::bsbcc::rate_max(kBsbcc));
  double g_near_kink =
      secrd::bsbcc::solve_gamma(kBsbcc, kRateKink + 1e-9);
  // The root leaves 0.5 with square-root speed, so 1e-9 past the kink it
  // already sits ~3e-5 away; the limit itself is checked at a smaller offset
  // where it is within the same tolerance of 0.5.
  double g_limit = secrd::bsbcc::solve_gamma(kBsbcc, kRateKink + 1e-12);

  double worst = 0.0;
  SeededRng rng(2001, 0);
  for (int i = 0; i < 200; ++i) {
    double p1 = 0.3 * rng.uniform();
    double p2 = p1 + 0.05 + (0.44 - p1) * rng.uniform();
    double p = 0.05 + 0.45 * rng.uniform();
    secrd::bsbcc::BsbccParams params{p, p1, p2};
    double lo = secrd::bsbcc::rate_kink(params);
    double hi = secrd::bsbcc::rate_max(params);
    double rate = lo + (hi - lo) * (0.02 + 0.96 * rng.uniform());
    double gamma = secrd::bsbcc::solve_gamma(params, rate);
    double lhs = secrd::binary_entropy(secrd::binary_convolution(gamma, p2));
    double rhs = 1.0 - secrd::binary_entropy(p1) + secrd::binary_entropy(p2) -
                 rate * secrd::binary_entropy(p);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  Outcome o;
  o.pass = std::abs(g_at_max) <= 1e-5 &&
           std::abs(g_near_kink - kGammaNearKink) <= 1e-5 &&
           std::abs(g_limit - 0.5) <= 1e-5 && worst <= 1e-10;
  o.detail = strf(
      "gamma(max)=%.2e gamma(kink+1e-9)=%.8f gamma(kink+1e-12)=%.8f "
      "residual=%.2e",
      g_at_max, g_near_kink, g_limit, worst);
  return o;
}

Outcome criterion3() {
  ChannelRealization real = reference_realization();
  auto r03 = secrd::mmf::no_causal_region(kMmf, real.mdl,
                                          secrd::binary_entropy(0.3), 0.3);
  auto r05 = secrd::mmf::no_causal_region(kMmf, real.mdl,
                                          secrd::binary_entropy(0.5), 0.5);
  Outcome o;
  o.pass = std::abs(r03.rate_bound - kCapacityRate03) <= 1e-3 &&
           std::abs(r05.rate_bound - kCapacityRate05) <= 1e-4;
  o.detail = strf("rate(p=0.3)=%.6f rate(p=0.5)=%.6f", r03.rate_bound,
                  r05.rate_bound);
  return o;
}

Outcome criterion4() {
  double worst_pair = 0.0, worst_psi = 0.0, worst_det = 0.0;
  for (int i = 0; i < 100; ++i) {
    SeededRng rng(4000 + i, 0);
    ChannelRealization real = secrd::mmf::sample_realization(kMmf, rng);
    CovSpectrum sp = random_spectrum(4, rng);
    Eigen::MatrixXcd k = diag_cov(real, sp);

    auto diag = secrd::mmf::rate_pair_diag(kMmf, real.mdl, sp);
    auto gen = secrd::mmf::rate_pair_general(kMmf, real, k);
    worst_pair = std::max(worst_pair, std::abs(diag.rs_raw - gen.rs_raw));
    worst_pair = std::max(worst_pair, std::abs(diag.rp - gen.rp));

    ChannelRealization other = real;
    other.psi = secrd::mmf::sample_haar_unitary(4, rng);
    auto swapped = secrd::mmf::rate_pair_general(kMmf, other, k);
    worst_psi = std::max(worst_psi, std::abs(swapped.rs_raw - gen.rs_raw));
    worst_psi = std::max(worst_psi, std::abs(swapped.rp - gen.rp));

    Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(4, 4);
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(4, 4);
    Eigen::MatrixXcd sqrt_phi = Eigen::MatrixXcd::Zero(4, 4);
    for (int d = 0; d < 4; ++d) {
      phi(d, d) = real.mdl.phi_bar[d];
      sqrt_phi(d, d) = std::sqrt(real.mdl.phi_bar[d]);
    }
    Eigen::MatrixXcd conj = real.psi_e * k * real.psi_e.adjoint();
    double herm = log2_abs_det(eye + 10.0 * sqrt_phi * conj * sqrt_phi);
    double cycled = log2_abs_det(eye + 10.0 * conj * phi);
    worst_det = std::max(worst_det, std::abs(herm - cycled));
  }
  Outcome o;
  o.pass = worst_pair <= 1e-9 && worst_psi <= 1e-9 && worst_det <= 1e-9;
  o.detail = strf("family=%.2e psi_swap=%.2e det_cycle=%.2e", worst_pair,
                  worst_psi, worst_det);
  return o;
}

Outcome criterion5() {
  int held = 0;
  for (int i = 0; i < 1000; ++i) {
    SeededRng rng(5000 + i, 0);
    int m = 2 + static_cast<int>(rng.bounded(7));
    double mdl_db = 0.1 + 29.9 * rng.uniform();
    double snre_db = 20.0 * rng.uniform();
    double snr_db = snre_db + 20.0 * rng.uniform();
    MmfParams params{m, snr_db, snre_db, mdl_db};
    secrd::mmf::MdlSpectrum mdl = secrd::mmf::sample_mdl(m, mdl_db, rng);
    if (secrd::mmf::check_secrecy_condition(params, mdl)) ++held;
  }
  Outcome o;
  o.pass = held == 1000;
  o.detail = strf("condition held on %d/1000 draws", held);
  return o;
}

Outcome criterion6() {
  double worst_gap = 0.0;
  for (int i = 0; i < 50; ++i) {
    SeededRng rng(6000 + i, 0);
    ChannelRealization real = secrd::mmf::sample_realization(kMmf, rng);
    auto result = secrd::mmf::max_rs(kMmf, real);
    worst_gap =
        std::max(worst_gap, result.diag_value - result.general_value);
  }
  MmfParams scalar{1, 20.0, 10.0, 0.0};
  SeededRng rng(61, 0);
  ChannelRealization real = secrd::mmf::sample_realization(scalar, rng);
  double rs1 = secrd::mmf::max_rs(scalar, real).rs_star;
  Outcome o;
  o.pass = worst_gap <= 1e-9 && std::abs(rs1 - kScalarRs) <= 1e-6;
  o.detail = strf("worst diag-general gap=%.2e scalar rs=%.10f", worst_gap,
                  rs1);
  return o;
}

Outcome criterion7() {
  ChannelRealization real = reference_realization();
  const double entropy = secrd::binary_entropy(0.3);
  const double plateau_d = secrd::d_cap(entropy, 0.7);
  const double rate_feasible = 4.0 * std::log2(101.0) / entropy;
  const double rate_plateau =
      secrd::mmf::max_rs(kMmf, real).rs_star / entropy;

  std::vector<double> grid;
  for (int i = 1; i <= 60; ++i) grid.push_back(rate_feasible * i / 60.0);
  auto pts = secrd::mmf::causal_curve(kMmf, real, 0.3, grid);

  bool monotone = true, plateau_ok = true, capped = true;
  double prev = 1.0;
  for (const auto& pt : pts) {
    if (pt.regime == secrd::mmf::MmfRegime::kInfeasible) {
      monotone = false;
      continue;
    }
    if (pt.distortion > prev + 1e-12) monotone = false;
    if (pt.distortion > 0.3 + 1e-12) capped = false;
    if (pt.rate <= rate_plateau * (1.0 - 1e-12) &&
        (pt.regime != secrd::mmf::MmfRegime::kPlateau ||
         pt.distortion != plateau_d)) {
      plateau_ok = false;
    }
    prev = pt.distortion;
  }

  // Closed-form endpoint: with the input off, the weight is
  // (total - log2det(I + SNRe*Phi)) / total straight from the drawn spectrum.
  double total = 4.0 * std::log2(101.0);
  double eve_full = 0.0;
  for (double phi : real.mdl.phi_bar) eve_full += std::log2(1.0 + 10.0 * phi);
  double alpha0 = (total - eve_full) / total;
  double endpoint = pts.back().distortion;
  bool endpoint_ok = std::abs(endpoint - alpha0 * 0.3) <= 1e-6;

  Outcome o;
  o.pass = monotone && plateau_ok && capped && endpoint_ok;
  o.detail = strf(
      "monotone=%d plateau=%d cap=%d endpoint=%.8f closed_form=%.8f",
      monotone, plateau_ok, capped, endpoint, alpha0 * 0.3);
  return o;
}

double exhaustive_eve_distortion(const secrd::binning::BinningConfig& config) {
  secrd::binning::Codebook cb = secrd::binning::build_codebook(config);
  std::map<int, std::vector<std::uint32_t>> events;
  const std::uint32_t n = 1u << config.k;
  for (std::uint32_t s = 0; s < n; ++s) {
    auto enc = secrd::binning::encode(cb, s);
    int key = enc.status == secrd::binning::EncodeResult::Status::kAtypical
                  ? -1
                  : enc.m_p;
    events[key].push_back(s);
  }
  double total = 0.0;
  for (const auto& [key, members] : events) {
    double best = 1e300;
    for (std::uint32_t guess = 0; guess < n; ++guess) {
      double acc = 0.0;
      for (std::uint32_t s : members) {
        int w = __builtin_popcount(s);
        double mass = std::pow(config.p, w) *
                      std::pow(1.0 - config.p, config.k - w);
        acc += mass * __builtin_popcount(s ^ guess);
      }
      best = std::min(best, acc);
    }
    total += best / config.k;
  }
  return total;
}

Outcome criterion8() {
  secrd::binning::BinningConfig small{4, 0.3, 0.5, 0.5, 7};
  double exact = secrd::binning::run(small).eve_distortion;
  double oracle = exhaustive_eve_distortion(small);
  bool oracle_ok = std::abs(exact - oracle) <= 1e-12;

  double prev = -1.0;
  bool trend = true;
  double eve20 = 0.0, bob8 = 0.0, bob20 = 0.0;
  for (int k : {8, 12, 16, 20}) {
    auto res = secrd::binning::run({k, 0.3, 0.2, 0.15, 0});
    if (res.eve_distortion < prev - 1e-12) trend = false;
    prev = res.eve_distortion;
    if (k == 8) bob8 = res.bob_error;
    if (k == 20) {
      eve20 = res.eve_distortion;
      bob20 = res.bob_error;
    }
  }
  Outcome o;
  o.pass = oracle_ok && trend && eve20 >= 0.27 && bob20 <= bob8;
  o.detail = strf(
      "oracle_gap=%.2e trend=%d eve(k=20)=%.4f bob(k=8)=%.4f bob(k=20)=%.4f",
      std::abs(exact - oracle), trend, eve20, bob8, bob20);
  return o;
}

Outcome criterion9() {
  SeededRng rng(9000, 0);
  int applicable = 0, held = 0, attempts = 0;
  double worst_margin = 1e300;
  while (applicable < 1000 && attempts < 20000) {
    ++attempts;
    int rows = 2 + static_cast<int>(rng.bounded(7));
    int cols = 2 + static_cast<int>(rng.bounded(7));
    std::vector<double> base(cols);
    double bsum = 0.0;
    for (double& b : base) {
      b = 0.2 + rng.uniform();
      bsum += b;
    }
    for (double& b : base) b /= bsum;
    std::vector<double> masses(rows * cols);
    for (int r = 0; r < rows; ++r) {
      double rsum = 0.0;
      for (int c = 0; c < cols; ++c) {
        double v = base[c] * (1.0 + 0.6 * (rng.uniform() - 0.5));
        masses[r * cols + c] = v;
        rsum += v;
      }
      for (int c = 0; c < cols; ++c) masses[r * cols + c] /= rsum * rows;
    }
    secrd::JointDistribution joint(rows, cols, masses);
    auto res = secrd::lemma_tv_mi_check(joint);
    if (!res.applicable) continue;
    ++applicable;
    if (res.holds) ++held;
    worst_margin = std::min(worst_margin, res.bound - res.mi);
  }
  Outcome o;
  o.pass = applicable == 1000 && held == 1000;
  o.detail = strf("held on %d/%d applicable joints, worst margin=%.3e", held,
                  applicable, worst_margin);
  return o;
}

Outcome criterion10() {
  SeededRng rng(10, 0);
  const int draws = 100000;
  double max_err = 0.0;
  double acc = 0.0;
  Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(4, 4);
  for (int i = 0; i < draws; ++i) {
    Eigen::MatrixXcd u = secrd::mmf::sample_haar_unitary(4, rng);
    double err = (u.adjoint() * u - eye).cwiseAbs().maxCoeff();
    max_err = std::max(max_err, err);
    acc += std::norm(u(0, 0));
  }
  double mean = acc / draws;
  Outcome o;
  o.pass = max_err <= 1e-10 && std::abs(mean - 0.25) <= 0.01;
  o.detail = strf("max unitarity error=%.2e mean |u11|^2=%.5f", max_err, mean);
  return o;
}

Outcome criterion11() {
  const double entropy = secrd::binary_entropy(0.3);
  auto estimate = [&](double rsp, double rate, double alpha,
                      std::uint64_t trials, std::uint64_t seed, int threads) {
    secrd::mmf::OutageQuery q{rsp, rate, alpha, trials, seed};
    return secrd::mmf::estimate_outage(kMmf, q, entropy, threads);
  };

  auto ceiling = estimate(0.1, 31.0, 0.2, 2000, 7, 1);
  auto trivial = estimate(0.0, 0.01, 0.0, 2000, 7, 1);
  bool extremes = ceiling.p_out == 1.0 && trivial.p_out == 0.0;

  const double rates[3] = {20.0, 24.0, 28.0};
  const double rsps[3] = {0.1, 0.4, 0.7};
  const double alphas[3] = {0.2, 0.4, 0.6};
  double p[3][3][3];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        p[a][b][c] =
            estimate(rsps[b], rates[a], alphas[c], 10000, 2025, 1).p_out;

  bool monotone = true;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        if (a + 1 < 3 && p[a + 1][b][c] < p[a][b][c]) monotone = false;
        if (b + 1 < 3 && p[a][b + 1][c] < p[a][b][c]) monotone = false;
        if (c + 1 < 3 && p[a][b][c + 1] < p[a][b][c]) monotone = false;
      }

  auto t1 = estimate(0.4, 24.0, 0.4, 10000, 2025, 1);
  auto t4 = estimate(0.4, 24.0, 0.4, 10000, 2025, 4);
  bool thread_ok = t1.failures == t4.failures && t1.p_out == t4.p_out;

  Outcome o;
  o.pass = extremes && monotone && thread_ok;
  o.detail = strf(
      "extremes=%d monotone=%d threads=%d span=[%.3f, %.3f]", extremes,
      monotone, thread_ok, p[0][0][0], p[2][2][2]);
  return o;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion12(const std::string& cli) {
  Outcome o;
  if (cli.empty()) {
    o.pass = false;
    o.detail = "missing --cli path to the command-line binary";
    return o;
  }
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "secrd_acceptance_cli";
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::create_directories(dir);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"bsbcc",
       "bsbcc-curve --p 0.3 --p1 0.1 --p2 0.2 --rate_min 0.05 --rate_max 0.6 "
       "--steps 40"},
      {"curve",
       "mmf-curve --M 4 --snr_db 20 --snre_db 10 --mdl_db 20 --p 0.3 "
       "--steps 12 --seed 42"},
      {"capacity",
       "mmf-capacity --M 4 --snr_db 20 --snre_db 10 --mdl_db 20 --p 0.3 "
       "--seed 3"},
      {"outage",
       "outage --M 4 --snr_db 20 --snre_db 10 --mdl_db 20 --p 0.3 "
       "--rs_prime 0.4 --rate 24 --alpha 0.5 --trials 400 --seed 11"},
      {"binning",
       "binning-sim --k 10 --p 0.3 --rs_prime 0.2 --epsilon 0.15 --seed 4"},
      {"lemma", "lemma-check --trials 200 --alphabet_sizes 4 6 --seed 2"},
      {"haar", "haar-test --M 4 --draws 2000 --seed 6"},
  };

  int matched = 0;
  std::string first_mismatch;
  for (const auto& [name, args] : commands) {
    fs::path out_a = dir / (name + "_a.out");
    fs::path out_b = dir / (name + "_b.out");
    bool ok = true;
    for (const fs::path& out : {out_a, out_b}) {
      std::string cmd = "\"" + cli + "\" " + args + " --out \"" +
                        out.string() + "\" >/dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) ok = false;
    }
    if (ok && !read_file(out_a).empty() &&
        read_file(out_a) == read_file(out_b)) {
      ++matched;
    } else if (first_mismatch.empty()) {
      first_mismatch = name;
    }
  }
  fs::remove_all(dir, ec);
  o.pass = matched == static_cast<int>(commands.size());
  o.detail = strf("%d/%d commands byte-identical on rerun", matched,
                  static_cast<int>(commands.size()));
  if (!o.pass && !first_mismatch.empty()) {
    o.detail += " (first failure: " + first_mismatch + ")";
  }
  return o;
}

Outcome dispatch(int n, const std::string& cli) {
  switch (n) {
    case 1: return criterion1();
    case 2: return criterion2();
    case 3: return criterion3();
    case 4: return criterion4();
    case 5: return criterion5();
    case 6: return criterion6();
    case 7: return criterion7();
    case 8: return criterion8();
    case 9: return criterion9();
    case 10: return criterion10();
    case 11: return criterion11();
    case 12: return criterion12(cli);
  }
  return {false, "unknown criterion"};
}

// Stated runtime budgets in seconds; 0 means unconstrained.
constexpr double kBudget[13] = {0, 1, 0, 1, 10, 1, 30, 60, 300, 5, 30, 300, 0};

}  // namespace

int main(int argc, char** argv) {
  int only = -1;
  std::string cli;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (arg == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else {
      std::fprintf(stderr,
                   "usage: %s [--criterion N] [--cli path-to-secrd]\n",
                   argv[0]);
      return 2;
    }
  }
  if (only != -1 && (only < 1 || only > 12)) {
    std::fprintf(stderr, "criterion must lie in 1..12\n");
    return 2;
  }

  bool all_pass = true;
  for (int n = 1; n <= 12; ++n) {
    if (only != -1 && n != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o = dispatch(n, cli);
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    if (kBudget[n] > 0 && secs > kBudget[n]) {
      o.pass = false;
      o.detail += strf(", over the %.0f s budget", kBudget[n]);
    }
    std::printf("criterion %d: %s (%s, %.2f s)\n", n,
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
