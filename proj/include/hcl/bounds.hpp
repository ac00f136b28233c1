#pragma once

#include <vector>

#include "hcl/config_space.hpp"
#include "hcl/mc.hpp"
#include "hcl/operators.hpp"
#include "hcl/spectral.hpp"

// Deterministic inequality checks: the Combes-Thomas bound and its block-norm
// ladder, the resolvent expansion, the perturbative correlator step, and the
// combined decay envelopes.

namespace hcl {

struct CtParams {
  double g;
  double mu_T;
  double E;

  // delta_k(E) = 2k(g - e^{mu_T}) - E
  double delta_k(int k) const;
  // 4g - E > 12 e^{mu_T}
  bool admissible() const;
  void require_admissible() const;  // throws, reporting 4g-E against 12 e^{mu_T}
};

// C_T = (2/delta_2) (1 - 8 e^{mu_T}/delta_2)^{-1}, always > 2/delta_2.
double ct_constant(const CtParams& p);

// max over pairs x,y in the at-least-2 sector of |G^(2)(x,y;E)| e^{mu_T d(x,y)},
// which the Combes-Thomas theorem bounds by C_T for every lambda >= 0.
struct CtVerifyReport {
  double worst_ratio;
  double c_t;
  int x_ordinal, y_ordinal;  // maximizing pair, parent-space ordinals
  long pairs_checked;
  bool pass;
};
CtVerifyReport ct_verify(const ConfigSpace& space, const ModelParams& params,
                         const DisorderRealization& w, const CtParams& p);

// Block norms ||P^(k) M R^(l) M^{-1} P^(j)|| with M = diag(e^{mu_T d(.,y)}):
// <= 2/delta_l for l in {j,k}, and <= C_T for R^(2); the top sector alone
// satisfies the stronger bound 1/delta_K.
struct BlockNormRow {
  int k, j, l;
  double norm;
  double bound;
  bool pass;
};
struct BlockNormReport {
  std::vector<BlockNormRow> ct1;  // bounds 2/delta_l
  std::vector<BlockNormRow> ct2;  // bounds C_T (rows carry l = 2)
  double base_norm;               // ||M R^(K) M^{-1}|| on the top sector
  double base_bound;              // 1/delta_K
  bool pass;
};
BlockNormReport ct_block_norms(const ConfigSpace& space, const ModelParams& params,
                               const DisorderRealization& w, const CtParams& p,
                               const Configuration& y);

struct InequalityReport {
  double lhs, rhs;
  bool holds;
};

// |G(x,y)| <= sum_{u in ran Q, v in ran P} |G(x,u)| |H(u,v)| |(P(H-E)P)^{-1}(v,y)|
// for complementary projections (Q, P), x in ran Q, y in ran P.  Works for any
// symmetric operator; the chain overload assembles H from the model.
InequalityReport resolvent_expansion_check(const SymmetricOperator& H,
                                           const std::vector<int>& q_idx,
                                           const std::vector<int>& p_idx, int x_ordinal,
                                           int y_ordinal, double E);
InequalityReport resolvent_expansion_check(const ConfigSpace& space, const ModelParams& params,
                                           const DisorderRealization& w,
                                           const std::vector<int>& q_idx,
                                           const std::vector<int>& p_idx, int x_ordinal,
                                           int y_ordinal, double E);

// Q(x,y,I) <= 2 C_T(I) e^{mu_T} sum_{w in C} e^{-mu_T d(x,w)} Q(w,y,I) for
// non-clustered x, with C_T(I) evaluated at sup I.  Also reports the largest
// summand on the right.
struct PerturbativeReport {
  double lhs, rhs;
  bool holds;
  int argmax_w;  // clustered ordinal carrying the largest summand
};
PerturbativeReport perturbative_correlator_check(const SpectralData& sd, const ConfigSpace& space,
                                                 const CtParams& p, int x_ordinal, int y_ordinal,
                                                 EnergyWindow I);

// sup over a time grid of |<delta_x, e^{-itH} P_I delta_y>|, which the
// correlator dominates.
double dynamical_amplitude_sup(const SpectralData& sd, int x, int y, EnergyWindow I,
                               const std::vector<double>& times);

// Combined envelope E[Q] <= C e^{-s1 c n} e^{-s2 mu dbar} F_{s3 mu}(x,y):
// calibrates C over the supplied rows and counts violations.
struct EnvelopeRow {
  int n;
  double mean;      // estimated E[Q(x,y,I)]
  double dbar_xy;   // dbar(x,y)
  double f_s3mu;    // F_{s3 mu}(x,y)
};
struct EnvelopeFitReport {
  double c_calibrated;
  int violations;
  bool weights_valid;
};
EnvelopeFitReport combined_envelope_check(const std::vector<EnvelopeRow>& rows, double s1,
                                          double s2, double s3, double c_rate, double mu);

}  // namespace hcl
