#include "hcl/xxz.hpp"

#include <cmath>
#include <stdexcept>

#include "hcl/combinatorics.hpp"

namespace hcl {

SpinSectorBasis::SpinSectorBasis(int N, int n) : N_(N), n_(n) {
  if (N < 1 || N > 62) throw std::domain_error("SpinSectorBasis: need 1 <= N <= 62");
  if (n < 0 || n > N) throw std::domain_error("SpinSectorBasis: need 0 <= n <= N");
  if (n == 0) {
    states_.push_back({});
    index_.emplace(0u, 0);
    return;
  }
  std::vector<int> c = first_combination(1, n);
  do {
    std::uint64_t w = 0;
    for (int k : c) w |= (std::uint64_t{1} << (k - 1));
    index_.emplace(w, static_cast<int>(states_.size()));
    states_.push_back(c);
  } while (next_combination(c, 1, N));
}

int SpinSectorBasis::index_of(const std::vector<int>& downs) const {
  std::uint64_t w = 0;
  for (int k : downs) {
    if (k < 1 || k > N_) throw std::out_of_range("SpinSectorBasis: position outside chain");
    w |= (std::uint64_t{1} << (k - 1));
  }
  auto it = index_.find(w);
  if (it == index_.end()) throw std::out_of_range("SpinSectorBasis: state not in sector");
  return it->second;
}

Eigen::Matrix4d build_local_bond(double delta) {
  if (delta == 0.0) throw std::domain_error("build_local_bond: Delta must be nonzero");
  // basis (uu, ud, du, dd); 1/4 - Sz Sz gives diag(0, 1/2, 1/2, 0) and
  // -(1/Delta)(Sx Sx + Sy Sy) = -(1/(2 Delta))(S+ S- + S- S+) couples ud <-> du
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  h(1, 1) = 0.5;
  h(2, 2) = 0.5;
  const double hop = -0.5 / delta;
  h(1, 2) = hop;
  h(2, 1) = hop;
  return h;
}

SymmetricOperator build_droplet_hamiltonian(const SpinSectorBasis& basis, const XxzParams& p) {
  if (p.gamma < 0) throw std::domain_error("build_droplet_hamiltonian: gamma must be >= 0");
  const int N = basis.chain_length();
  if (static_cast<int>(p.omega.size()) != N && !(p.lambda == 0.0 && p.omega.empty()))
    throw std::domain_error("build_droplet_hamiltonian: omega must cover chain sites 1..N");
  const double hop = -0.5 / p.delta;
  const double field = p.lambda * (-hop);  // lambda/(2 Delta)

  SymmetricOperator H(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    const auto& downs = basis.state(i);
    std::uint64_t w = 0;
    for (int k : downs) w |= (std::uint64_t{1} << (k - 1));

    double diag = 0;
    // bond interactions: 1/2 per bond with exactly one endpoint down
    for (int k = 1; k < N; ++k) {
      const bool a = w & (std::uint64_t{1} << (k - 1));
      const bool b = w & (std::uint64_t{1} << k);
      if (a != b) {
        diag += 0.5;
        // spin exchange across the bond
        if (a) {  // down at k hops to k+1
          std::vector<int> moved = downs;
          for (int& s : moved)
            if (s == k) s = k + 1;
          std::sort(moved.begin(), moved.end());
          const int j = basis.index_of(moved);
          if (j > i) H.add_offdiag(i, j, hop);
        }
      }
    }
    // boundary field (gamma/2)(1 - Sz_1 - Sz_N)
    int boundary_down = 0;
    if (w & 1u) ++boundary_down;
    if (N > 1 && (w & (std::uint64_t{1} << (N - 1)))) ++boundary_down;
    if (N == 1 && (w & 1u)) ++boundary_down;  // Sz_1 and Sz_N coincide
    diag += 0.5 * p.gamma * boundary_down;
    // disorder (lambda/(2 Delta)) sum_k omega(k) N_k
    if (field != 0.0)
      for (int k : downs) diag += field * p.omega[k - 1];
    H.set_diag(i, diag);
  }
  H.finalize();
  return H;
}

std::vector<int> dictionary(const ConfigSpace& space, const SpinSectorBasis& basis) {
  if (basis.chain_length() != space.num_sites() || basis.down_spins() != space.particles())
    throw std::domain_error("dictionary: sector does not match the configuration space");
  std::vector<int> map(space.size());
  std::vector<int> downs(space.particles());
  for (int i = 0; i < space.size(); ++i) {
    const Configuration& x = space.config(i);
    for (int j = 0; j < x.particles(); ++j) downs[j] = x.sites[j] - space.lo() + 1;
    map[i] = basis.index_of(downs);
  }
  return map;
}

double equivalence_residual(const ConfigSpace& space, double g, double lambda,
                            const DisorderRealization& w) {
  if (!(g > 1.0)) throw std::domain_error("equivalence_residual: need g > 1");
  const int N = space.num_sites();
  const SpinSectorBasis basis(N, space.particles());
  XxzParams p;
  p.delta = g;
  p.gamma = 1.0;
  p.lambda = lambda;
  p.omega.resize(N);
  for (int k = 1; k <= N; ++k) p.omega[k - 1] = w.at(space.lo() + k - 1);

  const Eigen::MatrixXd lhs = build_hamiltonian(space, {g, lambda}, w).dense();
  const Eigen::MatrixXd rhs = 2.0 * g * build_droplet_hamiltonian(basis, p).dense();
  const std::vector<int> map = dictionary(space, basis);

  double res = 0;
  for (int i = 0; i < space.size(); ++i)
    for (int j = 0; j < space.size(); ++j)
      res = std::max(res, std::abs(lhs(i, j) - rhs(map[i], map[j])));
  return res;
}

Eigen::MatrixXd full_chain_sector_dense(const SpinSectorBasis& basis, const XxzParams& p) {
  const int N = basis.chain_length();
  if (N > 14) throw std::domain_error("full_chain_sector_dense: validation path capped at N = 14");
  const std::size_t dim = std::size_t{1} << N;
  const Eigen::Matrix4d h = build_local_bond(p.delta);

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  // convention: bit k-1 set <=> down spin at chain site k
  for (std::size_t b = 0; b < dim; ++b) {
    for (int k = 1; k < N; ++k) {
      // bond basis (uu, ud, du, dd) with "d" = bit set; local index (la<<1)|lb
      const int la = (b >> (k - 1)) & 1, lb = (b >> k) & 1;
      const int loc_state = (la << 1) | lb;
      H(b, b) += h(loc_state, loc_state);
      for (int other = 0; other < 4; ++other) {
        if (other == loc_state) continue;
        const double v = h(other, loc_state);
        if (v == 0.0) continue;
        const int na = (other >> 1) & 1, nb = other & 1;
        std::size_t nbm = b;
        nbm = (nbm & ~(std::size_t{1} << (k - 1))) | (std::size_t(na) << (k - 1));
        nbm = (nbm & ~(std::size_t{1} << k)) | (std::size_t(nb) << k);
        H(nbm, b) += v;
      }
    }
    int boundary_down = (b & 1) ? 1 : 0;
    if (N > 1 && ((b >> (N - 1)) & 1)) ++boundary_down;
    if (N == 1 && (b & 1)) ++boundary_down;  // Sz_1 and Sz_N coincide
    H(b, b) += 0.5 * p.gamma * boundary_down;
    if (p.lambda != 0.0) {
      double dis = 0;
      for (int k = 1; k <= N; ++k)
        if ((b >> (k - 1)) & 1) dis += p.omega[k - 1];
      H(b, b) += p.lambda / (2.0 * p.delta) * dis;
    }
  }

  Eigen::MatrixXd sector(basis.size(), basis.size());
  std::vector<std::size_t> masks(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    std::size_t w = 0;
    for (int k : basis.state(i)) w |= (std::size_t{1} << (k - 1));
    masks[i] = w;
  }
  for (int i = 0; i < basis.size(); ++i)
    for (int j = 0; j < basis.size(); ++j) sector(i, j) = H(masks[i], masks[j]);
  return sector;
}

}  // namespace hcl
