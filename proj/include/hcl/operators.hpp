#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hcl/config_space.hpp"

// Assembly of H = -A + 2g U + lambda V over a configuration basis, the
// cluster-sector projections, the occupancy/exchange operator algebra behind
// the threshold bounds, and the droplet band formula.

namespace hcl {

// Real symmetric matrix; the diagonal and one copy of each off-diagonal
// entry (i < j) are stored, so symmetry holds structurally.
class SymmetricOperator {
 public:
  struct Entry {
    int i, j;  // i < j
    double v;
  };

  explicit SymmetricOperator(int dim);

  int dim() const { return dim_; }
  void set_diag(int i, double v) { diag_[i] = v; }
  void add_diag(int i, double v) { diag_[i] += v; }
  void add_offdiag(int i, int j, double v);

  const std::vector<double>& diag() const { return diag_; }
  const std::vector<Entry>& offdiag() const { return off_; }

  // sort entries and merge duplicates; builders call this before returning
  void finalize();

  double entry(int i, int j) const;
  double max_abs() const;
  Eigen::MatrixXd dense() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  // map back to the parent basis after restrict(); empty = identity
  const std::vector<int>& parent_index() const { return parent_; }
  void set_parent_index(std::vector<int> p) { parent_ = std::move(p); }

 private:
  int dim_;
  std::vector<double> diag_;
  std::vector<Entry> off_;
  std::vector<int> parent_;
  bool finalized_ = false;
};

// Site field omega: [lo, hi] -> [0, omega_max], regenerated bit-exactly from
// (seed, distribution_id, interval).
struct DisorderRealization {
  int lo, hi;
  std::vector<double> omega;
  std::uint64_t seed = 0;
  std::string distribution_id;
  double omega_max = 1.0;

  double at(int site) const;
  double config_sum(const Configuration& x) const;
  bool covers(int a, int b) const { return lo <= a && b <= hi; }
};

struct ModelParams {
  double g;       // > 1
  double lambda;  // >= 0
  void validate() const;
};

SymmetricOperator build_adjacency(const ConfigSpace& space);
SymmetricOperator build_cluster_potential(const ConfigSpace& space);
SymmetricOperator build_random_potential(const ConfigSpace& space,
                                         const DisorderRealization& w);
SymmetricOperator build_hamiltonian(const ConfigSpace& space, const ModelParams& params,
                                    const DisorderRealization& w);

enum class SectorMode { Exactly, AtLeast };

// Ordinals of configurations with exactly k clusters (P^(k)) or at least k
// clusters (Q^(k)).
std::vector<int> sector_indices(const ConfigSpace& space, int k, SectorMode mode);

// Principal submatrix on idx, carrying idx as the map back to the parent.
SymmetricOperator restrict_to(const SymmetricOperator& op, const std::vector<int>& idx);

// pi_alpha projects onto configurations containing alpha; pi_pair onto those
// containing exactly one of {alpha, beta}; tau swaps the occupancy of alpha
// and beta (a symmetric involution).
struct ClusterAlgebra {
  SymmetricOperator pi_alpha;
  SymmetricOperator pi_pair;
  SymmetricOperator tau;
};
ClusterAlgebra build_cluster_algebra(const ConfigSpace& space, int alpha, int beta);

// Frobenius norms of 2U - [sum_a pi_{a,a+1} + pi_lo + pi_hi] and of
// -A - sum_a (1 - pi_{a,a+1} - tau_{a,a+1}); both identities are exact, so
// the residuals must be exactly zero.
struct OperatorIdentityResiduals {
  double potential;  // 2U identity
  double hopping;    // -A identity
};
OperatorIdentityResiduals verify_propA1(const ConfigSpace& space);

// Droplet band 2 sqrt(g^2-1) [tanh(rho_g n/2), coth(rho_g n/2)] with
// rho_g = ln(g + sqrt(g^2-1)); contained in [2(g-1), 2(g+1)].
struct Band {
  double lo, hi;
};
Band droplet_band(double g, int n);

// Plain-text sparse triplet export (header: dim nnz, rows: i j value).
void export_triplets(const SymmetricOperator& op, std::ostream& os);

}  // namespace hcl
