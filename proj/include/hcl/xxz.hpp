#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hcl/config_space.hpp"
#include "hcl/operators.hpp"

// XXZ droplet Hamiltonian in fixed down-spin sectors and the unitary
// dictionary onto the hard-core chain: U H_{n,Lambda}(g) U* = 2g H^{++}(g,1).

namespace hcl {

// Down-spin position sets over chain sites 1..N, lexicographically ordered so
// the dictionary onto a hard-core ConfigSpace is the identity permutation.
class SpinSectorBasis {
 public:
  SpinSectorBasis(int N, int n);

  int chain_length() const { return N_; }
  int down_spins() const { return n_; }
  int size() const { return static_cast<int>(states_.size()); }
  // positions of the down spins of state i, increasing, within 1..N
  const std::vector<int>& state(int i) const { return states_[i]; }
  int index_of(const std::vector<int>& downs) const;

 private:
  int N_, n_;
  std::vector<std::vector<int>> states_;
  std::unordered_map<std::uint64_t, int> index_;
};

struct XxzParams {
  double delta;   // anisotropy, > 1 in the droplet regime (may be +inf: Ising)
  double gamma;   // boundary field strength, >= 0
  double lambda;  // disorder strength, >= 0
  std::vector<double> omega;  // field on chain sites 1..N
};

// Two-site bond h = -(1/Delta)(Sx Sx + Sy Sy) + (1/4 - Sz Sz) on the ordered
// basis (uu, ud, du, dd).
Eigen::Matrix4d build_local_bond(double delta);

// Sector restriction of H^xxz + (gamma/2)(1 - Sz_1 - Sz_N)
// + (lambda/(2 Delta)) sum_k omega(k) (1/2 - Sz_k).
SymmetricOperator build_droplet_hamiltonian(const SpinSectorBasis& basis, const XxzParams& p);

// x -> e_x: hard-core configuration to down-spin positions (1-based chain
// coordinates).  With matched orderings the induced unitary is the identity
// permutation; returns the index map basis_index[space ordinal].
std::vector<int> dictionary(const ConfigSpace& space, const SpinSectorBasis& basis);

// Max-entry norm of U H_{n,Lambda}(g) U* - 2g H^{++}(Delta=g, gamma=1).
double equivalence_residual(const ConfigSpace& space, double g, double lambda,
                            const DisorderRealization& w);

// Validation path: the full 2^N chain, built independently, projected onto
// the n-down-spin sector.  N <= 14.
Eigen::MatrixXd full_chain_sector_dense(const SpinSectorBasis& basis, const XxzParams& p);

}  // namespace hcl
