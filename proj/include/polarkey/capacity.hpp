#pragma once

// Closed-form secret-key capacities and rate formulas for every model,
// including the bisection-solved rate-limited value.

#include <array>
#include <string>

#include "polarkey/sources.hpp"

namespace polarkey {

struct CapacityResult {
  double value = 0.0;  // bits/symbol
  std::string model;
  double beta0 = 0.0;      // auxiliary root for the rate-limited formula
  int arg_terminal = 0;    // argmin terminal (broadcast)
  int arg_edge_i = 0, arg_edge_j = 0;  // argmin edge (tree)
  bool degraded = true;    // false => value returned with a non-capacity warning
};

double hb(double p);                  // binary entropy, bits
double star(double a, double b);     // (1-b)a + b(1-a); associative, commutative

// I(A;B) in bits from a pair pmf laid out [p00, p01, p10, p11].
double pair_mutual_information(const std::array<double, 4>& pmf);

// I(X;Y) - I(X;Z) for a two-terminal source with an eavesdropper bit.
// Not a capacity when X->Y->Z fails; flagged via CapacityResult::degraded.
CapacityResult cwsk_unlimited(const JointSourceSpec& spec);

// Rate-limited capacity of the uniform-X BSC chain:
// Hb(p*b0*q) - Hb(p*b0) with Hb(p*b0) - Hb(b0) = R_p (b0 in [0,1/2]).
CapacityResult example1_capacity(double p, double q, double rp);

// min_j I(X_1;X_j) for the star; min-MI edge for the tree.
CapacityResult broadcast_capacity(const JointSourceSpec& spec);
CapacityResult tree_capacity(const JointSourceSpec& spec);

// The (key rate, required public rate) pair for a given binary test channel:
// (I(Y;U) - I(Z;U), I(U;X) - I(U;Y)). Z absent => I(Z;U) = 0.
struct RatePoint {
  double key_rate = 0.0;
  double required_rp = 0.0;
};
RatePoint model2_rate_point(const JointSourceSpec& spec,
                            const std::array<std::array<double, 2>, 2>& pu_given_x);

}  // namespace polarkey
