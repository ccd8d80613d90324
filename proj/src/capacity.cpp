#include "polarkey/capacity.hpp"

#include <algorithm>
#include <cmath>

namespace polarkey {

double hb(double p) { return binary_entropy(p); }

double star(double a, double b) {
  if (a < 0 || a > 1 || b < 0 || b > 1) throw StructuralError("star: arguments outside [0,1]");
  return (1.0 - b) * a + b * (1.0 - a);
}

double pair_mutual_information(const std::array<double, 4>& pmf) {
  double pa[2] = {pmf[0] + pmf[1], pmf[2] + pmf[3]};
  double pb[2] = {pmf[0] + pmf[2], pmf[1] + pmf[3]};
  double mi = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double pab = pmf[2 * a + b];
      if (pab > 0) mi += pab * std::log2(pab / (pa[a] * pb[b]));
    }
  return std::max(0.0, mi);
}

CapacityResult cwsk_unlimited(const JointSourceSpec& spec) {
  JointPmf pmf = joint_pmf(spec);
  if (pmf.m != 2) throw ValidationError("cwsk_unlimited: two-terminal source expected");
  CapacityResult r;
  r.model = "model1";
  double ixy = pair_mutual_information(pair_pmf(pmf, 1, 2));
  double ixz = 0.0;
  if (pmf.has_z) {
    std::array<double, 4> xz{0, 0, 0, 0};
    for (size_t t = 0; t < pmf.tuple_count(); ++t)
      xz[2 * pmf.bit_of(t, 1) + pmf.z_of(t)] += pmf.p[t];
    ixz = pair_mutual_information(xz);
  }
  r.value = ixy - ixz;
  r.degraded = degrade_check(spec).markov_chain_xyz;
  return r;
}

CapacityResult example1_capacity(double p, double q, double rp) {
  if (p <= 0 || p >= 0.5 || q <= 0 || q >= 0.5)
    throw StructuralError("example1_capacity: p, q must lie in (0, 1/2)");
  if (rp < 0) throw StructuralError("example1_capacity: R_p must be nonnegative");
  CapacityResult r;
  r.model = "model2";
  if (rp >= hb(p)) {
    r.beta0 = 0.0;
    r.value = hb(star(p, q)) - hb(p);
    return r;
  }
  // g(b) = Hb(p*b) - Hb(b) decreases from Hb(p) to 0 on [0, 1/2]; of the two
  // symmetric roots we take the one in [0, 1/2].
  auto g = [p](double b) { return hb(star(p, b)) - hb(b); };
  double lo = 0.0, hi = 0.5;
  double glo = g(lo) - rp, ghi = g(hi) - rp;
  if (glo < 0 || ghi > 1e-12) throw StructuralError("example1_capacity: no root in [0, 1/2]");
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) - rp >= 0)
      lo = mid;
    else
      hi = mid;
  }
  r.beta0 = 0.5 * (lo + hi);
  double pb = star(p, r.beta0);
  r.value = hb(star(pb, q)) - hb(pb);
  return r;
}

CapacityResult broadcast_capacity(const JointSourceSpec& spec) {
  if (spec.variant != SourceVariant::BroadcastStar)
    throw ValidationError("broadcast_capacity: BroadcastStar source expected");
  JointPmf pmf = joint_pmf(spec);
  CapacityResult r;
  r.model = "model3-star";
  r.value = 2.0;
  for (int j = 2; j <= pmf.m; ++j) {
    double mi = pair_mutual_information(pair_pmf(pmf, 1, j));
    if (mi < r.value - 1e-15) {
      r.value = mi;
      r.arg_terminal = j;
    }
  }
  return r;
}

CapacityResult tree_capacity(const JointSourceSpec& spec) {
  if (spec.variant != SourceVariant::MarkovTree)
    throw ValidationError("tree_capacity: MarkovTree source expected");
  spec.validate();
  CapacityResult r;
  r.model = "model4";
  r.value = 2.0;
  for (const auto& e : spec.edges) {
    // uniform marginals: I = 1 - Hb(p_edge)
    double mi = 1.0 - hb(e.p);
    if (mi < r.value - 1e-15) {
      r.value = mi;
      r.arg_edge_i = std::min(e.i, e.j);
      r.arg_edge_j = std::max(e.i, e.j);
    }
  }
  return r;
}

RatePoint model2_rate_point(const JointSourceSpec& spec,
                            const std::array<std::array<double, 2>, 2>& pu_given_x) {
  JointPmf base = joint_pmf(spec);
  if (base.m != 2) throw ValidationError("model2_rate_point: two-terminal source expected");
  JointPmf aug = augment_with_test_channel(base, pu_given_x);
  // aug terminals: 1 = U, 2 = X, 3 = Y
  double iux = pair_mutual_information(pair_pmf(aug, 1, 2));
  double iuy = pair_mutual_information(pair_pmf(aug, 1, 3));
  double iuz = 0.0;
  if (aug.has_z) {
    std::array<double, 4> uz{0, 0, 0, 0};
    for (size_t t = 0; t < aug.tuple_count(); ++t)
      uz[2 * aug.bit_of(t, 1) + aug.z_of(t)] += aug.p[t];
    iuz = pair_mutual_information(uz);
  }
  return {iuy - iuz, iux - iuy};
}

}  // namespace polarkey
