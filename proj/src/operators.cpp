#include "hcl/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace hcl {

SymmetricOperator::SymmetricOperator(int dim) : dim_(dim), diag_(dim, 0.0) {
  if (dim < 1) throw std::domain_error("SymmetricOperator: dim must be >= 1");
}

void SymmetricOperator::add_offdiag(int i, int j, double v) {
  if (i == j) throw std::domain_error("SymmetricOperator: use set_diag for diagonal entries");
  if (i > j) std::swap(i, j);
  off_.push_back({i, j, v});
  finalized_ = false;
}

void SymmetricOperator::finalize() {
  std::sort(off_.begin(), off_.end(), [](const Entry& a, const Entry& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  std::vector<Entry> merged;
  merged.reserve(off_.size());
  for (const Entry& e : off_) {
    if (!merged.empty() && merged.back().i == e.i && merged.back().j == e.j)
      merged.back().v += e.v;
    else
      merged.push_back(e);
  }
  std::erase_if(merged, [](const Entry& e) { return e.v == 0.0; });
  off_ = std::move(merged);
  finalized_ = true;
}

double SymmetricOperator::entry(int i, int j) const {
  if (i == j) return diag_[i];
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(off_.begin(), off_.end(), std::pair{i, j},
                             [](const Entry& e, const std::pair<int, int>& p) {
                               return e.i != p.first ? e.i < p.first : e.j < p.second;
                             });
  if (it != off_.end() && it->i == i && it->j == j) return it->v;
  return 0.0;
}

double SymmetricOperator::max_abs() const {
  double m = 0;
  for (double d : diag_) m = std::max(m, std::abs(d));
  for (const Entry& e : off_) m = std::max(m, std::abs(e.v));
  return m;
}

Eigen::MatrixXd SymmetricOperator::dense() const {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i) M(i, i) = diag_[i];
  for (const Entry& e : off_) {
    M(e.i, e.j) += e.v;
    M(e.j, e.i) += e.v;
  }
  return M;
}

Eigen::VectorXd SymmetricOperator::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(dim_);
  for (int i = 0; i < dim_; ++i) y(i) = diag_[i] * x(i);
  for (const Entry& e : off_) {
    y(e.i) += e.v * x(e.j);
    y(e.j) += e.v * x(e.i);
  }
  return y;
}

double DisorderRealization::at(int site) const {
  if (site < lo || site > hi) throw std::domain_error("DisorderRealization: site outside field");
  return omega[site - lo];
}

double DisorderRealization::config_sum(const Configuration& x) const {
  double s = 0;
  for (int u : x.sites) s += at(u);
  return s;
}

void ModelParams::validate() const {
  if (!(g > 1.0)) throw std::domain_error("ModelParams: need g > 1");
  if (!(lambda >= 0.0)) throw std::domain_error("ModelParams: need lambda >= 0");
}

namespace {

// neighbors of configuration i: one particle moved to an adjacent empty site
template <typename F>
void for_each_neighbor(const ConfigSpace& space, int i, F&& f) {
  for (int s : space.config(i).sites) {
    for (int d : {-1, 1}) {
      const int j = space.hop_index(i, s, s + d);
      if (j >= 0) f(j);
    }
  }
}

}  // namespace

SymmetricOperator build_adjacency(const ConfigSpace& space) {
  SymmetricOperator A(space.size());
  for (int i = 0; i < space.size(); ++i) {
    for_each_neighbor(space, i, [&](int j) {
      if (j > i) A.add_offdiag(i, j, 1.0);
    });
  }
  A.finalize();
  return A;
}

SymmetricOperator build_cluster_potential(const ConfigSpace& space) {
  SymmetricOperator U(space.size());
  for (int i = 0; i < space.size(); ++i) U.set_diag(i, space.sector_of(i));
  U.finalize();
  return U;
}

SymmetricOperator build_random_potential(const ConfigSpace& space,
                                         const DisorderRealization& w) {
  if (!w.covers(space.lo(), space.hi()))
    throw std::domain_error("build_random_potential: realization does not cover the lattice");
  SymmetricOperator V(space.size());
  for (int i = 0; i < space.size(); ++i) V.set_diag(i, w.config_sum(space.config(i)));
  V.finalize();
  return V;
}

SymmetricOperator build_hamiltonian(const ConfigSpace& space, const ModelParams& params,
                                    const DisorderRealization& w) {
  params.validate();
  if (!w.covers(space.lo(), space.hi()))
    throw std::domain_error("build_hamiltonian: realization does not cover the lattice");
  SymmetricOperator H(space.size());
  for (int i = 0; i < space.size(); ++i) {
    H.set_diag(i, 2.0 * params.g * space.sector_of(i) +
                      params.lambda * w.config_sum(space.config(i)));
    for_each_neighbor(space, i, [&](int j) {
      if (j > i) H.add_offdiag(i, j, -1.0);
    });
  }
  H.finalize();
  return H;
}

std::vector<int> sector_indices(const ConfigSpace& space, int k, SectorMode mode) {
  if (k < 1 || k > space.particles())
    throw std::out_of_range("sector_indices: k out of range");
  std::vector<int> idx;
  for (int i = 0; i < space.size(); ++i) {
    const int s = space.sector_of(i);
    if ((mode == SectorMode::Exactly && s == k) || (mode == SectorMode::AtLeast && s >= k))
      idx.push_back(i);
  }
  return idx;
}

SymmetricOperator restrict_to(const SymmetricOperator& op, const std::vector<int>& idx) {
  if (idx.empty()) throw std::domain_error("restrict_to: empty index set");
  std::vector<int> pos(op.dim(), -1);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (idx[a] < 0 || idx[a] >= op.dim())
      throw std::out_of_range("restrict_to: index outside operator");
    pos[idx[a]] = static_cast<int>(a);
  }
  SymmetricOperator R(static_cast<int>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a) R.set_diag(static_cast<int>(a), op.diag()[idx[a]]);
  for (const auto& e : op.offdiag()) {
    const int a = pos[e.i], b = pos[e.j];
    if (a >= 0 && b >= 0) R.add_offdiag(a, b, e.v);
  }
  R.finalize();
  R.set_parent_index(idx);
  return R;
}

ClusterAlgebra build_cluster_algebra(const ConfigSpace& space, int alpha, int beta) {
  if (alpha == beta) throw std::domain_error("build_cluster_algebra: alpha == beta");
  if (alpha < space.lo() || alpha > space.hi() || beta < space.lo() || beta > space.hi())
    throw std::domain_error("build_cluster_algebra: site outside the lattice");
  const int m = space.size();
  SymmetricOperator pa(m), pp(m), tau(m);
  for (int i = 0; i < m; ++i) {
    const bool has_a = space.occupied(i, alpha), has_b = space.occupied(i, beta);
    if (has_a) pa.set_diag(i, 1.0);
    if (has_a != has_b) {
      pp.set_diag(i, 1.0);  // exactly one of the two sites occupied
      const int j = has_a ? space.hop_index(i, alpha, beta) : space.hop_index(i, beta, alpha);
      if (j < 0) throw std::logic_error("build_cluster_algebra: missing swap partner");
      if (j > i) tau.add_offdiag(i, j, 1.0);
    } else {
      tau.set_diag(i, 1.0);  // both or neither occupied: fixed point
    }
  }
  pa.finalize();
  pp.finalize();
  tau.finalize();
  return {std::move(pa), std::move(pp), std::move(tau)};
}

OperatorIdentityResiduals verify_propA1(const ConfigSpace& space) {
  const int m = space.size();
  Eigen::MatrixXd lhs_u = 2.0 * build_cluster_potential(space).dense();
  Eigen::MatrixXd lhs_a = -build_adjacency(space).dense();

  Eigen::MatrixXd rhs_u = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd rhs_a = Eigen::MatrixXd::Zero(m, m);
  for (int a = space.lo(); a < space.hi(); ++a) {
    ClusterAlgebra ca = build_cluster_algebra(space, a, a + 1);
    const Eigen::MatrixXd pp = ca.pi_pair.dense();
    rhs_u += pp;
    rhs_a += Eigen::MatrixXd::Identity(m, m) - pp - ca.tau.dense();
  }
  // boundary occupancy terms pi_lo, pi_hi
  for (int i = 0; i < m; ++i) {
    const Configuration& x = space.config(i);
    if (x.contains(space.lo())) rhs_u(i, i) += 1.0;
    if (x.contains(space.hi())) rhs_u(i, i) += 1.0;
  }
  return {(lhs_u - rhs_u).norm(), (lhs_a - rhs_a).norm()};
}

Band droplet_band(double g, int n) {
  if (!(g > 1.0)) throw std::domain_error("droplet_band: need g > 1");
  if (n < 1) throw std::domain_error("droplet_band: need n >= 1");
  const double s = std::sqrt(g * g - 1.0);
  const double rho = std::log(g + s);
  const double h = rho * n / 2.0;
  return {2.0 * s * std::tanh(h), 2.0 * s / std::tanh(h)};
}

void export_triplets(const SymmetricOperator& op, std::ostream& os) {
  char buf[64];
  std::size_t nnz = op.offdiag().size();
  for (double d : op.diag())
    if (d != 0.0) ++nnz;
  os << op.dim() << ' ' << nnz << '\n';
  for (int i = 0; i < op.dim(); ++i) {
    if (op.diag()[i] != 0.0) {
      std::snprintf(buf, sizeof buf, "%.17g", op.diag()[i]);
      os << i << ' ' << i << ' ' << buf << '\n';
    }
  }
  for (const auto& e : op.offdiag()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.v);
    os << e.i << ' ' << e.j << ' ' << buf << '\n';
  }
}

}  // namespace hcl
