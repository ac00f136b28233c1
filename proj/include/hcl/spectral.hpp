#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hcl/config_space.hpp"
#include "hcl/operators.hpp"

// Dense exact diagonalization and everything built on it: Green functions,
// restricted resolvents, eigenfunction correlators, reduced density matrix
// elements and heat-kernel diagonals.

namespace hcl {

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnergyWindow {
  double lo, hi;
  bool contains(double e) const { return lo <= e && e <= hi; }
};

class SpectralData {
 public:
  SpectralData(Eigen::VectorXd eigval, Eigen::MatrixXd eigvec, std::vector<int> parent,
               double scale);

  int dim() const { return static_cast<int>(eigval_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return eigval_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigvec_; }
  const std::vector<int>& parent_index() const { return parent_; }

  // Degenerate eigenvalues (within 1e-8 * (1 + |H|_max), chained) form one
  // spectral projector; groups are [begin, end) column ranges.
  const std::vector<std::pair<int, int>>& groups() const { return groups_; }
  double group_energy(int gidx) const;
  // <delta_x, P_group delta_y>
  double projector_element(int gidx, int x, int y) const;

 private:
  Eigen::VectorXd eigval_;
  Eigen::MatrixXd eigvec_;
  std::vector<int> parent_;
  std::vector<std::pair<int, int>> groups_;
};

inline constexpr int kDefaultDimCap = 15000;

// Full dense symmetric eigendecomposition (LAPACK dsyevd).  Throws
// CapacityError beyond the cap.
SpectralData diagonalize(const SymmetricOperator& op, int dim_cap = kDefaultDimCap);

// G(x,y;z) = sum_E Phi_E(x) Phi_E(y) / (E - z).  For real z within
// `floor` of an eigenvalue throws SingularityError.
std::complex<double> green(const SpectralData& sd, int x, int y, std::complex<double> z,
                           double floor = 1e-12);

// Resolvent entry of H^(k) = Q^(k) H Q^(k) at real energy E below the
// spectrum of the restriction.  x, y are parent-space ordinals and must lie
// in the at-least-k sector.
double green_restricted(const ConfigSpace& space, const ModelParams& params,
                        const DisorderRealization& w, int k, const Configuration& x,
                        const Configuration& y, double E);

// Q(x,y,I) = sum over eigenvalue groups in I of |<delta_x, P_E delta_y>|.
double eigenfunction_correlator(const SpectralData& sd, int x, int y, EnergyWindow I);

// Q(x,y,I,s) = sum_E |<x,P_E x>|^(1-s) |<x,P_E y>|^s, s in [0,1].
double interpolated_correlator(const SpectralData& sd, int x, int y, EnergyWindow I, double s);

// q(U,V,I) = sum_{E in I} sum_{x meets U, y meets V} |<x,P_E y>|.
double window_correlator(const SpectralData& sd, const ConfigSpace& space, SiteInterval U,
                         SiteInterval V, EnergyWindow I);

// <Phi, a_u^* a_v Phi> for the eigenvector in column `col`; hard-core bosonic
// convention (spin-flip transport, no sign strings).  For u == v this is the
// occupation expectation of site u.
double reduced_density_element(const SpectralData& sd, int col, const ConfigSpace& space,
                               int u, int v);

// <delta_x, e^{-tH} delta_x>
double heat_kernel_diag(const SpectralData& sd, int x, double t);

// (1-s)/2 * Int_I |G(x,y;E)|^s dE for each s in s_grid, by Gauss-Legendre
// panels split at eigenvalues inside I and graded toward the singular
// endpoints.  Also reports Q(x,y,I) for convergence diagnostics.
struct SingularLimitResult {
  std::vector<double> s_grid;
  std::vector<double> value;
  std::vector<bool> converged;
  double correlator;  // Q(x,y,I)
};
SingularLimitResult singular_limit_probe(const SpectralData& sd, int x, int y, EnergyWindow I,
                                         const std::vector<double>& s_grid,
                                         int panels_per_interval = 64);

}  // namespace hcl
