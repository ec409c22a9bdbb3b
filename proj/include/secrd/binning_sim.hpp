#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

// Executable model of typical-set binning for a Bernoulli(p) source: the
// confidential message is the within-bin index m_s, the revealed public
// message is the bin index m_p, and Eve's best estimate given m_p is
// evaluated exactly (no sampling).

namespace secrd::binning {

class EmptyTypicalSetError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Every typical weight class is smaller than the bin size.
class NoFullBinError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct BinningConfig {
  int k = 0;
  double p = 0.0;
  double rs_prime = 0.0;  // confidential bits per source symbol
  double epsilon = 0.0;
  std::uint64_t seed = 0;

  void validate() const;  // k in [1, 24], p in (0, 1), rs_prime and eps > 0
  std::uint64_t bin_size() const;  // round(2^(k*rs_prime))
};

// Weights w whose type satisfies |-(1/k)*log2 P(seq) - h(p)| <= epsilon,
// ascending. May be empty.
std::vector<int> typical_set(int k, double p, double epsilon);

struct BinRef {
  int weight;
  int class_index;
  std::uint32_t offset;  // into the class's shuffled sequence list
  std::uint32_t size;
  bool leftover;
};

// Per typical weight class, all C(k,w) sequences in a seeded shuffle, sliced
// into bins of bin_size; a final short slice becomes a flagged leftover bin.
// Bins are concatenated ascending in weight into the m_p index space.
struct Codebook {
  int k = 0;
  double p = 0.0;
  std::uint64_t bin_size = 0;
  std::vector<int> weights;
  std::vector<std::vector<std::uint32_t>> class_sequences;
  std::vector<BinRef> bins;  // indexed by m_p
  int full_bin_count = 0;

  std::vector<std::uint32_t> bin_members(int m_p) const;
};

Codebook build_codebook(const BinningConfig& config);

struct EncodeResult {
  enum class Status { kOk, kAtypical, kLeftover };
  Status status;
  int m_s = -1;  // valid when kOk
  int m_p = -1;  // valid when kOk or kLeftover (the bin is still revealed)
};

EncodeResult encode(const Codebook& codebook, std::uint32_t sequence);
std::uint32_t decode(const Codebook& codebook, int m_s, int m_p);

struct EveEstimate {
  std::uint32_t estimate;
  double conditional_distortion;  // expected Hamming distortion per symbol
};

// Optimal estimator of the source given that it lies in `members`: per
// coordinate the posterior-majority bit (ties to 0). Members of one bin share
// a weight and are then equiprobable, but the rule is evaluated with the
// i.i.d. weights so it stays exact for mixed-weight sets too.
EveEstimate eve_oracle(const std::vector<std::uint32_t>& members, int k,
                       double p);

struct SimResult {
  double eve_distortion;
  double bob_error;
  int bin_count;  // full bins
  double leftover_mass;
};

SimResult run(const BinningConfig& config);

// One bin per line, sequences as k-character bitstrings (most significant
// coordinate first); leftover bins carry a trailing marker.
void dump_codebook(const Codebook& codebook, std::ostream& os);

}  // namespace secrd::binning
