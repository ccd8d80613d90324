#pragma once

// Exact (small-N enumeration) and empirical measurement of reliability,
// secrecy leakage, uniformity, and the distance/divergence primitives.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "polarkey/bitvec.hpp"
#include "polarkey/polarization.hpp"
#include "polarkey/sources.hpp"

namespace polarkey {

// Dense joint histogram over a tuple of packed bit-components. Component c
// contributes widths[c] bits; the flat index concatenates components with
// component 0 in the most significant position.
struct FlatHist {
  std::vector<int> widths;
  std::vector<double> p;

  explicit FlatHist(std::vector<int> w);
  int total_bits() const;
  void add(std::span<const uint64_t> comps, double weight);
  double sum() const;
  void normalize();

  FlatHist marginal(std::span<const size_t> keep) const;
  double entropy_bits() const;
  // I(first n_left components ; rest) in bits.
  double mutual_information_bits(size_t n_left) const;
};

double entropy_bits(std::span<const double> p);

// Paper's (unnormalized) variational distance: sum |p - q|.
double variational_distance(std::span<const double> p, std::span<const double> q);
// KL divergence in bits; +infinity when q = 0 < p somewhere.
double kl_divergence_bits(std::span<const double> p, std::span<const double> q);

struct ErrorRate {
  double rate = 0, lo = 0, hi = 0;  // Wilson 95% interval
  uint64_t failures = 0, trials = 0;
  double sigma() const;
};
// trial_fails(rng) -> true when any terminal disagrees.
ErrorRate empirical_error_rate(const std::function<bool(std::mt19937_64&)>& trial_fails,
                               uint64_t trials, std::mt19937_64& rng);
ErrorRate wilson_interval(uint64_t failures, uint64_t trials);

struct SecrecyReport {
  double leakage_bits = 0;     // I(K; EveView)
  double uniformity_bits = 0;  // |K| - H(K)
  std::string method;          // "exact" | "plug_in"
  uint64_t count = 0;          // trials or enumeration size
};

// Plug-in estimator over hashed buckets; diagnostic only (biased).
SecrecyReport plug_in_secrecy(const std::vector<std::pair<BitVec, BitVec>>& key_view_pairs,
                              int bucket_bits = 16);

// Closed-form test thresholds from the chained-scheme analysis.
double delta_n(size_t n_block, double beta);          // 2^{-N^beta}
double delta_star(size_t n_block, double beta);       // seed-vs-key MI bound
double delta1(size_t n_block, double beta);           // per-block uniformity bound
double delta2(size_t n_block, double beta);           // key-vs-randomness MI bound
double delta3(size_t n_block, double beta);           // quantized-block leakage bound

// ---------------------------------------------------------------------------
// Exact protocol distributions (enumeration backends). The returned histogram
// has components [key bits | transcript bits | eavesdropper bits]; widths may
// be zero. Budget: source bits (m*N*k) + enumerated randomness <= 26.
// ---------------------------------------------------------------------------

struct ExactJoint {
  FlatHist hist;
  int key_bits = 0, transcript_bits = 0, eve_bits = 0;
  ExactJoint() : hist({0, 0, 0}) {}
  double leakage_bits() const;      // I(K; transcript, eve)
  double uniformity_bits() const;   // |K| - H(K)
};

struct TestChannel {
  std::array<std::array<double, 2>, 2> pu_given_x{{{1, 0}, {0, 1}}};
  static TestChannel bsc(double flip) {
    return {{{{{1 - flip, flip}}, {{flip, 1 - flip}}}}};
  }
};

ExactJoint exact_protocol_distribution(const std::string& model, const JointSourceSpec& spec,
                                       const IndexSetBundle& sets, size_t n_block, size_t k,
                                       const TestChannel* tc = nullptr);

}  // namespace polarkey
