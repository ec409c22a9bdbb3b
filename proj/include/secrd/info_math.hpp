#pragma once

#include <cstddef>
#include <functional>
#include <vector>

// Scalar information measures and small finite-alphabet distributions.
// All entropies, rates and mutual informations are in bits (base-2 logs),
// with the 0*log(0) = 0 convention throughout.

namespace secrd {

// Binary entropy in bits; x must lie in [0, 1]. Exactly 1 at x = 0.5.
double binary_entropy(double x);

// Binary convolution a*b = a(1-b) + (1-a)b; both arguments in [0, 1].
double binary_convolution(double a, double b);

// Piecewise-linear interpolation through the knots (log2 n, (n-1)/n) for
// n = 1, 2, 3, ...; defined for x >= 0, values in [0, 1).
double f_interp(double x);

// min(f_interp(x), 1 - p_max) with p_max in [0, 1].
double d_cap(double x, double p_max);

class FiniteDistribution {
 public:
  // Masses must be nonnegative and sum to 1 within 1e-12.
  explicit FiniteDistribution(std::vector<double> masses);

  std::size_t size() const { return masses_.size(); }
  double operator[](std::size_t i) const { return masses_[i]; }
  const std::vector<double>& masses() const { return masses_; }

 private:
  std::vector<double> masses_;
};

class JointDistribution {
 public:
  // Row-major masses, nonnegative, summing to 1 within 1e-12.
  JointDistribution(std::size_t rows, std::size_t cols,
                    std::vector<double> masses);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t r, std::size_t c) const {
    return masses_[r * cols_ + c];
  }
  const std::vector<double>& masses() const { return masses_; }

  FiniteDistribution row_marginal() const;  // marginal over the row variable
  FiniteDistribution col_marginal() const;  // marginal over the column variable

  static JointDistribution product(const FiniteDistribution& rows,
                                   const FiniteDistribution& cols);

 private:
  std::size_t rows_, cols_;
  std::vector<double> masses_;
};

// Minimum over constant guesses t in {0, ..., guess_count-1} of E[d(S, t)].
double max_distortion(const FiniteDistribution& source, std::size_t guess_count,
                      const std::function<double(std::size_t, std::size_t)>& d);

// Unnormalized total variation sum |p_i - q_i| (shapes must match).
double total_variation(const FiniteDistribution& p,
                       const FiniteDistribution& q);
double total_variation(const JointDistribution& p, const JointDistribution& q);

// Mutual information between the row and column variables, in bits.
double mutual_information(const JointDistribution& joint);

struct LemmaCheckResult {
  double epsilon;  // TV distance between the joint and its marginal product
  double mi;       // mutual information of the joint, bits
  double bound;    // -epsilon * log2(epsilon / rows), 0 at epsilon = 0
  bool applicable;  // epsilon <= 1/2
  bool holds;       // mi <= bound whenever applicable
};

// Requires the row marginal to be uniform within 1e-9 per entry.
LemmaCheckResult lemma_tv_mi_check(const JointDistribution& joint);

// Bisection on [lo, hi]; fn must change sign over the bracket. Returns the
// midpoint of the final bracket once its width is at most tol.
double bisect_root(const std::function<double(double)>& fn, double lo,
                   double hi, double tol);

}  // namespace secrd
