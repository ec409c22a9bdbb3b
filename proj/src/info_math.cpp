#include "secrd/info_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace secrd {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

constexpr double kMassTol = 1e-12;

double checked_sum(const std::vector<double>& masses, const char* what) {
  double sum = 0.0;
  for (double m : masses) {
    require(std::isfinite(m) && m >= 0.0,
            std::string(what) + ": masses must be finite and nonnegative");
    sum += m;
  }
  require(std::abs(sum - 1.0) <= kMassTol,
          std::string(what) + ": masses must sum to 1 within 1e-12");
  return sum;
}

}  // namespace

double binary_entropy(double x) {
  require(std::isfinite(x) && x >= 0.0 && x <= 1.0,
          "binary_entropy: argument must lie in [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -(x * std::log2(x) + (1.0 - x) * std::log2(1.0 - x));
}

double binary_convolution(double a, double b) {
  require(std::isfinite(a) && a >= 0.0 && a <= 1.0 && std::isfinite(b) &&
              b >= 0.0 && b <= 1.0,
          "binary_convolution: arguments must lie in [0, 1]");
  return a * (1.0 - b) + (1.0 - a) * b;
}

double f_interp(double x) {
  require(std::isfinite(x) && x >= 0.0, "f_interp: argument must be >= 0");
  if (x == 0.0) return 0.0;
  // Knot n maps to abscissa log2(n); past n ~ 2^52 the knots are denser than
  // double spacing and the curve is 1 - 1/2^x to machine precision.
  if (x >= 52.0) {
    return std::min(1.0 - std::exp2(-x), std::nextafter(1.0, 0.0));
  }
  auto n = static_cast<std::uint64_t>(std::floor(std::exp2(x)));
  if (n < 1) n = 1;
  double x_lo = std::log2(static_cast<double>(n));
  if (x_lo > x) {
    --n;
    x_lo = std::log2(static_cast<double>(n));
  }
  double x_hi = std::log2(static_cast<double>(n + 1));
  double y_lo = static_cast<double>(n - 1) / static_cast<double>(n);
  double y_hi = static_cast<double>(n) / static_cast<double>(n + 1);
  double t = (x - x_lo) / (x_hi - x_lo);
  // Endpoint-exact form: t = 0 or 1 reproduces the knot values bit-for-bit.
  return y_lo + t * (y_hi - y_lo);
}

double d_cap(double x, double p_max) {
  require(std::isfinite(p_max) && p_max >= 0.0 && p_max <= 1.0,
          "d_cap: p_max must lie in [0, 1]");
  return std::min(f_interp(x), 1.0 - p_max);
}

FiniteDistribution::FiniteDistribution(std::vector<double> masses)
    : masses_(std::move(masses)) {
  require(!masses_.empty(), "FiniteDistribution: empty support");
  checked_sum(masses_, "FiniteDistribution");
}

JointDistribution::JointDistribution(std::size_t rows, std::size_t cols,
                                     std::vector<double> masses)
    : rows_(rows), cols_(cols), masses_(std::move(masses)) {
  require(rows_ >= 1 && cols_ >= 1, "JointDistribution: empty support");
  require(masses_.size() == rows_ * cols_,
          "JointDistribution: mass count must equal rows * cols");
  checked_sum(masses_, "JointDistribution");
}

FiniteDistribution JointDistribution::row_marginal() const {
  std::vector<double> m(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m[r] += at(r, c);
  // Re-normalize away accumulated rounding so the constructor tolerance holds.
  double sum = std::accumulate(m.begin(), m.end(), 0.0);
  for (double& v : m) v /= sum;
  return FiniteDistribution(std::move(m));
}

FiniteDistribution JointDistribution::col_marginal() const {
  std::vector<double> m(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m[c] += at(r, c);
  double sum = std::accumulate(m.begin(), m.end(), 0.0);
  for (double& v : m) v /= sum;
  return FiniteDistribution(std::move(m));
}

JointDistribution JointDistribution::product(const FiniteDistribution& rows,
                                             const FiniteDistribution& cols) {
  std::vector<double> m(rows.size() * cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      m[r * cols.size() + c] = rows[r] * cols[c];
  double sum = std::accumulate(m.begin(), m.end(), 0.0);
  for (double& v : m) v /= sum;
  return JointDistribution(rows.size(), cols.size(), std::move(m));
}

double max_distortion(
    const FiniteDistribution& source, std::size_t guess_count,
    const std::function<double(std::size_t, std::size_t)>& d) {
  require(guess_count >= 1, "max_distortion: need at least one guess");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < guess_count; ++t) {
    double e = 0.0;
    for (std::size_t s = 0; s < source.size(); ++s) {
      double v = d(s, t);
      require(std::isfinite(v) && v >= 0.0,
              "max_distortion: distortion values must be finite and >= 0");
      e += source[s] * v;
    }
    best = std::min(best, e);
  }
  return best;
}

double total_variation(const FiniteDistribution& p,
                       const FiniteDistribution& q) {
  require(p.size() == q.size(), "total_variation: shape mismatch");
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return tv;
}

double total_variation(const JointDistribution& p, const JointDistribution& q) {
  require(p.rows() == q.rows() && p.cols() == q.cols(),
          "total_variation: shape mismatch");
  double tv = 0.0;
  for (std::size_t i = 0; i < p.masses().size(); ++i)
    tv += std::abs(p.masses()[i] - q.masses()[i]);
  return tv;
}

double mutual_information(const JointDistribution& joint) {
  FiniteDistribution pr = joint.row_marginal();
  FiniteDistribution pc = joint.col_marginal();
  double mi = 0.0;
  for (std::size_t r = 0; r < joint.rows(); ++r) {
    for (std::size_t c = 0; c < joint.cols(); ++c) {
      double p = joint.at(r, c);
      if (p <= 0.0) continue;
      mi += p * std::log2(p / (pr[r] * pc[c]));
    }
  }
  return std::max(mi, 0.0);
}

LemmaCheckResult lemma_tv_mi_check(const JointDistribution& joint) {
  FiniteDistribution pr = joint.row_marginal();
  double uniform = 1.0 / static_cast<double>(joint.rows());
  for (std::size_t r = 0; r < joint.rows(); ++r) {
    require(std::abs(pr[r] - uniform) <= 1e-9,
            "lemma_tv_mi_check: row marginal must be uniform within 1e-9");
  }
  JointDistribution prod =
      JointDistribution::product(pr, joint.col_marginal());
  LemmaCheckResult res{};
  res.epsilon = total_variation(prod, joint);
  res.mi = mutual_information(joint);
  res.bound = res.epsilon > 0.0
                  ? -res.epsilon * std::log2(res.epsilon /
                                             static_cast<double>(joint.rows()))
                  : 0.0;
  res.applicable = res.epsilon <= 0.5;
  res.holds = !res.applicable || res.mi <= res.bound + 1e-12;
  return res;
}

double bisect_root(const std::function<double(double)>& fn, double lo,
                   double hi, double tol) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
          "bisect_root: need lo < hi");
  require(std::isfinite(tol) && tol > 0.0, "bisect_root: tol must be > 0");
  double flo = fn(lo);
  double fhi = fn(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    throw std::invalid_argument("bisect_root: no sign change over [lo, hi]");
  for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace secrd
