#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcl/config_space.hpp"
#include "hcl/operators.hpp"
#include "hcl/spectral.hpp"

// Disorder averaging: reproducible seeded estimation of the averaged
// correlators, fractional moments and sup-sums, with decay-rate fits.

namespace hcl {

// Interval admissibility threshold E(g, mu_T) = 4g - 12 e^{mu_T} for the
// correlator decay window.
inline double fock_threshold(double g, double mu_T) {
  return 4.0 * g - 12.0 * std::exp(mu_T);
}

// A per-realization sample breached an inequality certified elsewhere
// (cluster threshold, Combes-Thomas bound); estimators abort with this
// rather than average over a bug.
struct CertifiedInequalityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct McPlan {
  int L = 3;
  int n = 2;
  ModelParams params{2.0, 1.0};
  double omega_max = 1.0;
  std::string distribution = "uniform";
  int realizations = 100;
  std::uint64_t seed_root = 1;
  EnergyWindow window{0.0, 1.0};
  double s = 0.5;     // fractional exponent, in (0,1)
  double mu = 0.25;   // decay rate for the sum weights
  double mu_T = 0.5;  // Combes-Thomas rate; 0 < mu < mu_T
  double energy = 0.0;  // Green-function probe energy
  bool guard_thresholds = true;  // per-realization Lemma-1.1 check

  void validate() const;
  DisorderRealization realization(int r) const;
};

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  long count = 0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
};

McEstimate make_estimate(const std::vector<double>& samples);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
  int npoints = 0;
};

// Ordinary least squares of y against x; slope_se from the residual variance.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Run fn(0..realizations-1) on a few threads; callers collect results into
// per-index slots so the merge order is fixed by index.
void parallel_for(int count, const std::function<void(int)>& fn);

// ---------------------------------------------------------------------------
// E[Q(x,y,I)] over clustered pairs, aggregated by separation |x_1-y_1|,
// with a least-squares fit of log E[Q] against the separation.

struct DecaySeparationRow {
  int separation;
  McEstimate est;   // per-pair average at this separation
  long pair_count;  // clustered pairs contributing per realization
};

struct DecayPairRow {
  int xi, yi;        // parent-space ordinals
  int exponent;      // |x_1-y_1| for clustered pairs, dbar generally
  bool clustered;    // both endpoints clustered
  McEstimate est;
};

struct DecayTable {
  std::vector<DecaySeparationRow> per_separation;
  std::vector<DecayPairRow> pairs;
  double mu_fit = 0.0;
  double mu_fit_se = 0.0;   // standard error of the fitted rate
  double log_c_fit = 0.0;   // intercept of the fit
  double c_envelope = 0.0;  // calibrated constant: E[Q] <= c_envelope * e^{-mu_fit l}
  int violations = 0;       // rows exceeding the calibrated envelope
  int n = 0;
  int realizations_with_weight = 0;  // realizations with spectrum in the window
};

// Precondition: window inside [0, E(g, mu_T)); throws std::domain_error
// naming E(g, mu_T) otherwise.
DecayTable estimate_correlator_decay(const McPlan& plan);

// ---------------------------------------------------------------------------
// E[|G(x,y;E)|^s], optionally conditioned on the field outside two sites
// (u in x, v in y): the background field is frozen from the plan seed and
// only omega(u), omega(v) are resampled.

McEstimate fractional_moment_probe(const McPlan& plan, const Configuration& x,
                                   const Configuration& y,
                                   std::optional<std::pair<int, int>> conditioning = {});

// ---------------------------------------------------------------------------
// Sup-sums S^(1), S^(2): sup over subintervals Lambda' of Lambda and
// clustered x of sum_y e^{s mu |x1-y1|} E[|G_{Lambda'}(x,y;E)|^s]
// (clustered y) resp. e^{s mu dbar(x,y)} (all y).

struct SupSumCell {
  SiteInterval subinterval;
  int x_ordinal;  // within the subinterval space
  McEstimate est;
};

struct SupSumReport {
  SupSumCell s1, s2;
};

SupSumReport sum_S1_S2(const McPlan& plan);

// ---------------------------------------------------------------------------
// E[q(U,V,I)] for site windows U, V.

struct WindowAverage {
  SiteInterval U, V;
  int distance;
  McEstimate est;
};

WindowAverage window_correlator_average(const McPlan& plan, SiteInterval U, SiteInterval V);

}  // namespace hcl
