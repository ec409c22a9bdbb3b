#include "secrd/binning_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "secrd/info_math.hpp"
#include "secrd/rng.hpp"

namespace secrd::binning {

namespace {

// All C(k,w) sequences of Hamming weight w in ascending numeric order
// (Gosper's next-same-weight trick).
std::vector<std::uint32_t> weight_class(int k, int w) {
  std::vector<std::uint32_t> out;
  if (w == 0) {
    out.push_back(0);
    return out;
  }
  const std::uint32_t limit = 1u << k;
  std::uint32_t v = (1u << w) - 1;
  while (v < limit) {
    out.push_back(v);
    const std::uint32_t u = v & (~v + 1);
    const std::uint32_t t = v + u;
    if (t >= limit) break;
    v = t | (((v ^ t) / u) >> 2);
  }
  return out;
}

double log_choose(int n, int r) {
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

// C(n,r)*p^a*q^b without underflow for k <= 24 scales.
double class_mass(int n, int r, double log_p, double log_q, int a, int b) {
  return std::exp(log_choose(n, r) + a * log_p + b * log_q);
}

}  // namespace

void BinningConfig::validate() const {
  if (k < 1 || k > 24) {
    throw std::invalid_argument("blocklength k must lie in [1, 24]");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("source bias must lie in (0, 1)");
  }
  if (!(rs_prime > 0.0)) {
    throw std::invalid_argument("rs_prime must be positive");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
}

std::uint64_t BinningConfig::bin_size() const {
  const double raw = std::exp2(k * rs_prime);
  // Far beyond any class size of a k <= 24 codebook; avoids llround overflow.
  if (raw >= 9.0e18) return UINT64_MAX;
  return static_cast<std::uint64_t>(std::llround(raw));
}

std::vector<int> typical_set(int k, double p, double epsilon) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("source bias must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  const double h = binary_entropy(p);
  std::vector<int> out;
  for (int w = 0; w <= k; ++w) {
    const double ll =
        -(w * std::log2(p) + (k - w) * std::log2(1.0 - p)) / k;
    if (std::abs(ll - h) <= epsilon) out.push_back(w);
  }
  return out;
}

Codebook build_codebook(const BinningConfig& config) {
  config.validate();
  Codebook cb;
  cb.k = config.k;
  cb.p = config.p;
  cb.bin_size = config.bin_size();
  cb.weights = typical_set(config.k, config.p, config.epsilon);
  if (cb.weights.empty()) {
    throw EmptyTypicalSetError("typical set is empty: epsilon too small for k");
  }
  SeededRng rng(config.seed, 0);
  for (size_t ci = 0; ci < cb.weights.size(); ++ci) {
    std::vector<std::uint32_t> seqs = weight_class(config.k, cb.weights[ci]);
    for (size_t i = seqs.size(); i > 1; --i) {
      const std::uint64_t j = rng.bounded(i);
      std::swap(seqs[i - 1], seqs[j]);
    }
    const std::uint32_t n = static_cast<std::uint32_t>(seqs.size());
    std::uint32_t off = 0;
    while (static_cast<std::uint64_t>(n - off) >= cb.bin_size) {
      cb.bins.push_back({cb.weights[ci], static_cast<int>(ci), off,
                         static_cast<std::uint32_t>(cb.bin_size), false});
      ++cb.full_bin_count;
      off += static_cast<std::uint32_t>(cb.bin_size);
    }
    if (off < n) {
      cb.bins.push_back(
          {cb.weights[ci], static_cast<int>(ci), off, n - off, true});
    }
    cb.class_sequences.push_back(std::move(seqs));
  }
  if (cb.full_bin_count == 0) {
    throw NoFullBinError(
        "bin size " + std::to_string(cb.bin_size) +
        " exceeds every typical class size: no full bin exists");
  }
  return cb;
}

std::vector<std::uint32_t> Codebook::bin_members(int m_p) const {
  const BinRef& b = bins.at(m_p);
  const std::vector<std::uint32_t>& cls = class_sequences[b.class_index];
  return {cls.begin() + b.offset, cls.begin() + b.offset + b.size};
}

EncodeResult encode(const Codebook& codebook, std::uint32_t sequence) {
  if (sequence >= (1u << codebook.k)) {
    throw std::invalid_argument("encode: sequence wider than k bits");
  }
  const int w = __builtin_popcount(sequence);
  const auto wit =
      std::find(codebook.weights.begin(), codebook.weights.end(), w);
  if (wit == codebook.weights.end()) {
    return {EncodeResult::Status::kAtypical, -1, -1};
  }
  const int ci = static_cast<int>(wit - codebook.weights.begin());
  const std::vector<std::uint32_t>& cls = codebook.class_sequences[ci];
  const auto pos_it = std::find(cls.begin(), cls.end(), sequence);
  const std::uint32_t pos = static_cast<std::uint32_t>(pos_it - cls.begin());
  // Map the class-local position to the global m_p index space.
  for (size_t m_p = 0; m_p < codebook.bins.size(); ++m_p) {
    const BinRef& b = codebook.bins[m_p];
    if (b.class_index != ci) continue;
    if (pos >= b.offset && pos < b.offset + b.size) {
      if (b.leftover) {
        return {EncodeResult::Status::kLeftover, -1, static_cast<int>(m_p)};
      }
      return {EncodeResult::Status::kOk, static_cast<int>(pos - b.offset),
              static_cast<int>(m_p)};
    }
  }
  return {EncodeResult::Status::kAtypical, -1, -1};
}

std::uint32_t decode(const Codebook& codebook, int m_s, int m_p) {
  const BinRef& b = codebook.bins.at(m_p);
  if (b.leftover || m_s < 0 || static_cast<std::uint32_t>(m_s) >= b.size) {
    throw std::out_of_range("decode: invalid (m_s, m_p)");
  }
  return codebook.class_sequences[b.class_index][b.offset + m_s];
}

EveEstimate eve_oracle(const std::vector<std::uint32_t>& members, int k,
                       double p) {
  if (members.empty()) throw std::invalid_argument("eve_oracle: empty bin");
  const double log_p = std::log(p);
  const double log_q = std::log(1.0 - p);
  double total = 0.0;
  std::vector<double> ones(k, 0.0);
  for (std::uint32_t s : members) {
    const int w = __builtin_popcount(s);
    const double mass = std::exp(w * log_p + (k - w) * log_q);
    total += mass;
    for (int j = 0; j < k; ++j) {
      if (s & (1u << j)) ones[j] += mass;
    }
  }
  EveEstimate out{0, 0.0};
  for (int j = 0; j < k; ++j) {
    if (ones[j] > total - ones[j]) out.estimate |= 1u << j;
    out.conditional_distortion += std::min(ones[j], total - ones[j]);
  }
  out.conditional_distortion /= total * k;
  return out;
}

SimResult run(const BinningConfig& config) {
  const Codebook cb = build_codebook(config);
  const double log_p = std::log(config.p);
  const double log_q = std::log(1.0 - config.p);

  SimResult res{0.0, 0.0, cb.full_bin_count, 0.0};
  for (size_t m_p = 0; m_p < cb.bins.size(); ++m_p) {
    const BinRef& b = cb.bins[m_p];
    const double seq_mass =
        std::exp(b.weight * log_p + (config.k - b.weight) * log_q);
    const double bin_mass = b.size * seq_mass;
    const EveEstimate ev =
        eve_oracle(cb.bin_members(static_cast<int>(m_p)), config.k, config.p);
    res.eve_distortion += bin_mass * ev.conditional_distortion;
    if (b.leftover) res.leftover_mass += bin_mass;
  }

  // Atypical event: per-coordinate posterior has closed form because
  // P(s_j=1, weight w) = C(k-1, w-1) p^w q^(k-w); every coordinate is
  // exchangeable, so the per-symbol distortion equals one coordinate's.
  double atypical_mass = 0.0;
  double atypical_ones = 0.0;
  for (int w = 0; w <= config.k; ++w) {
    if (std::find(cb.weights.begin(), cb.weights.end(), w) !=
        cb.weights.end()) {
      continue;
    }
    atypical_mass +=
        class_mass(config.k, w, log_p, log_q, w, config.k - w);
    if (w >= 1) {
      atypical_ones +=
          class_mass(config.k - 1, w - 1, log_p, log_q, w, config.k - w);
    }
  }
  if (atypical_mass > 0.0) {
    res.eve_distortion +=
        std::min(atypical_ones, atypical_mass - atypical_ones);
  }
  res.bob_error = atypical_mass + res.leftover_mass;
  return res;
}

void dump_codebook(const Codebook& codebook, std::ostream& os) {
  for (size_t m_p = 0; m_p < codebook.bins.size(); ++m_p) {
    const BinRef& b = codebook.bins[m_p];
    const std::vector<std::uint32_t> members =
        codebook.bin_members(static_cast<int>(m_p));
    for (size_t i = 0; i < members.size(); ++i) {
      if (i) os << ' ';
      for (int j = codebook.k - 1; j >= 0; --j) {
        os << ((members[i] >> j) & 1u);
      }
    }
    if (b.leftover) os << " #leftover";
    os << '\n';
  }
}

}  // namespace secrd::binning
