#include "hcl/bounds.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace hcl {

double CtParams::delta_k(int k) const { return 2.0 * k * (g - std::exp(mu_T)) - E; }

bool CtParams::admissible() const { return 4.0 * g - E > 12.0 * std::exp(mu_T); }

void CtParams::require_admissible() const {
  if (admissible()) return;
  std::ostringstream os;
  os << "Combes-Thomas condition violated: need 4g - E > 12 e^{mu_T}, got 4g - E = "
     << 4.0 * g - E << " vs 12 e^{mu_T} = " << 12.0 * std::exp(mu_T);
  throw std::domain_error(os.str());
}

double ct_constant(const CtParams& p) {
  p.require_admissible();
  const double d2 = p.delta_k(2);
  return (2.0 / d2) / (1.0 - 8.0 * std::exp(p.mu_T) / d2);
}

namespace {

// dense inverse of (H^(k) - E) on the at-least-k sector, embedded into the
// parent space (zero outside the sector)
Eigen::MatrixXd embedded_resolvent(const ConfigSpace& space, const SymmetricOperator& H,
                                   int k, double E) {
  const std::vector<int> idx = sector_indices(space, k, SectorMode::AtLeast);
  const SymmetricOperator Hk = restrict_to(H, idx);
  Eigen::MatrixXd M = Hk.dense();
  M.diagonal().array() -= E;
  const Eigen::MatrixXd R = M.inverse();
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(space.size(), space.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) full(idx[a], idx[b]) = R(a, b);
  return full;
}

}  // namespace

CtVerifyReport ct_verify(const ConfigSpace& space, const ModelParams& params,
                         const DisorderRealization& w, const CtParams& p) {
  p.require_admissible();
  if (space.particles() < 2)
    throw std::domain_error("ct_verify: need n >= 2 for the two-cluster sector");
  const std::vector<int> idx = sector_indices(space, 2, SectorMode::AtLeast);
  const SymmetricOperator Hk = restrict_to(build_hamiltonian(space, params, w), idx);
  Eigen::MatrixXd M = Hk.dense();
  M.diagonal().array() -= p.E;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("ct_verify: H^(2) - E is not positive definite");
  const int m = Hk.dim();
  const Eigen::MatrixXd R = llt.solve(Eigen::MatrixXd::Identity(m, m));

  CtVerifyReport rep;
  rep.c_t = ct_constant(p);
  rep.worst_ratio = 0;
  rep.x_ordinal = rep.y_ordinal = -1;
  rep.pairs_checked = 0;
  for (int a = 0; a < m; ++a) {
    const Configuration& xa = space.config(idx[a]);
    for (int b = a; b < m; ++b) {
      const double d = l1_distance(xa, space.config(idx[b]));
      const double ratio = std::abs(R(a, b)) * std::exp(p.mu_T * d);
      ++rep.pairs_checked;
      if (ratio > rep.worst_ratio) {
        rep.worst_ratio = ratio;
        rep.x_ordinal = idx[a];
        rep.y_ordinal = idx[b];
      }
    }
  }
  rep.pass = rep.worst_ratio <= rep.c_t + 1e-10;
  return rep;
}

BlockNormReport ct_block_norms(const ConfigSpace& space, const ModelParams& params,
                               const DisorderRealization& w, const CtParams& p,
                               const Configuration& y) {
  p.require_admissible();
  const int K = space.max_clusters();
  if (K < 2) throw std::domain_error("ct_block_norms: need at least two cluster sectors");
  const SymmetricOperator H = build_hamiltonian(space, params, w);
  const int m = space.size();

  Eigen::VectorXd mexp(m), minv(m);
  for (int i = 0; i < m; ++i) {
    const double d = l1_distance(space.config(i), y);
    mexp(i) = std::exp(p.mu_T * d);
    minv(i) = std::exp(-p.mu_T * d);
  }

  std::vector<Eigen::MatrixXd> resolvent(K + 1);
  for (int l = 2; l <= K; ++l) resolvent[l] = embedded_resolvent(space, H, l, p.E);

  auto block_norm = [&](int k, int j, int l) {
    const auto& pk = space.sector_members(k);
    const auto& pj = space.sector_members(j);
    Eigen::MatrixXd B(pk.size(), pj.size());
    for (std::size_t a = 0; a < pk.size(); ++a)
      for (std::size_t b = 0; b < pj.size(); ++b)
        B(a, b) = mexp(pk[a]) * resolvent[l](pk[a], pj[b]) * minv(pj[b]);
    return B.jacobiSvd().singularValues()(0);
  };

  BlockNormReport rep;
  rep.pass = true;
  const double ct = ct_constant(p);
  for (int k = 2; k <= K; ++k) {
    for (int j = 2; j <= K; ++j) {
      // with l in {j,k}, only l = min(j,k) gives a non-vanishing block
      const int l = std::min(j, k);
      const double nrm = block_norm(k, j, l);
      const double bound = 2.0 / p.delta_k(l);
      rep.ct1.push_back({k, j, l, nrm, bound, nrm <= bound + 1e-10});
      const double nrm2 = block_norm(k, j, 2);
      rep.ct2.push_back({k, j, 2, nrm2, ct, nrm2 <= ct + 1e-10});
    }
  }
  {
    // top sector: ||M R^(K) M^{-1}|| <= 1/delta_K
    const auto& pk = space.sector_members(K);
    Eigen::MatrixXd B(pk.size(), pk.size());
    for (std::size_t a = 0; a < pk.size(); ++a)
      for (std::size_t b = 0; b < pk.size(); ++b)
        B(a, b) = mexp(pk[a]) * resolvent[K](pk[a], pk[b]) * minv(pk[b]);
    rep.base_norm = B.jacobiSvd().singularValues()(0);
    rep.base_bound = 1.0 / p.delta_k(K);
  }
  for (const auto& r : rep.ct1) rep.pass = rep.pass && r.pass;
  for (const auto& r : rep.ct2) rep.pass = rep.pass && r.pass;
  rep.pass = rep.pass && rep.base_norm <= rep.base_bound + 1e-10;
  return rep;
}

InequalityReport resolvent_expansion_check(const SymmetricOperator& H,
                                           const std::vector<int>& q_idx,
                                           const std::vector<int>& p_idx, int x_ordinal,
                                           int y_ordinal, double E) {
  if (q_idx.empty() || p_idx.empty())
    throw std::domain_error("resolvent_expansion_check: projections must be non-trivial");
  std::vector<char> in_q(H.dim(), 0), in_p(H.dim(), 0);
  for (int i : q_idx) in_q[i] = 1;
  for (int i : p_idx) in_p[i] = 1;
  for (int i = 0; i < H.dim(); ++i)
    if (in_q[i] + in_p[i] != 1)
      throw std::domain_error("resolvent_expansion_check: (Q,P) must be complementary");
  if (!in_q[x_ordinal] || !in_p[y_ordinal])
    throw std::domain_error("resolvent_expansion_check: need x in ran Q, y in ran P");

  Eigen::MatrixXd M = H.dense();
  M.diagonal().array() -= E;
  const Eigen::MatrixXd G = M.inverse();

  const SymmetricOperator Hp = restrict_to(H, p_idx);
  Eigen::MatrixXd Mp = Hp.dense();
  Mp.diagonal().array() -= E;
  const Eigen::MatrixXd Gp = Mp.inverse();
  std::vector<int> pos(H.dim(), -1);
  for (std::size_t a = 0; a < p_idx.size(); ++a) pos[p_idx[a]] = static_cast<int>(a);

  double rhs = 0;
  for (const auto& e : H.offdiag()) {
    // H couples (e.i, e.j); count the orientations crossing Q -> P
    for (auto [u, v] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
      if (in_q[u] && in_p[v])
        rhs += std::abs(G(x_ordinal, u)) * std::abs(e.v) *
               std::abs(Gp(pos[v], pos[y_ordinal]));
    }
  }
  const double lhs = std::abs(G(x_ordinal, y_ordinal));
  return {lhs, rhs, lhs <= rhs + 1e-10 * (1.0 + rhs)};
}

InequalityReport resolvent_expansion_check(const ConfigSpace& space, const ModelParams& params,
                                           const DisorderRealization& w,
                                           const std::vector<int>& q_idx,
                                           const std::vector<int>& p_idx, int x_ordinal,
                                           int y_ordinal, double E) {
  return resolvent_expansion_check(build_hamiltonian(space, params, w), q_idx, p_idx,
                                   x_ordinal, y_ordinal, E);
}

PerturbativeReport perturbative_correlator_check(const SpectralData& sd, const ConfigSpace& space,
                                                 const CtParams& p, int x_ordinal, int y_ordinal,
                                                 EnergyWindow I) {
  if (space.is_clustered(x_ordinal))
    throw std::domain_error("perturbative_correlator_check: x must not be clustered");
  CtParams at_sup = p;
  at_sup.E = I.hi;  // C_T(I) = C_T(g, mu_T, sup I)
  const double ct_i = ct_constant(at_sup);

  const double lhs = eigenfunction_correlator(sd, x_ordinal, y_ordinal, I);
  double rhs = 0, best = -1;
  int argmax = -1;
  const Configuration& x = space.config(x_ordinal);
  for (int wi : space.clustered()) {
    const double term = std::exp(-p.mu_T * l1_distance(x, space.config(wi))) *
                        eigenfunction_correlator(sd, wi, y_ordinal, I);
    rhs += term;
    if (term > best) {
      best = term;
      argmax = wi;
    }
  }
  rhs *= 2.0 * ct_i * std::exp(p.mu_T);
  return {lhs, rhs, lhs <= rhs + 1e-10 * (1.0 + rhs), argmax};
}

double dynamical_amplitude_sup(const SpectralData& sd, int x, int y, EnergyWindow I,
                               const std::vector<double>& times) {
  double sup = 0;
  for (double t : times) {
    std::complex<double> amp = 0;
    for (std::size_t g = 0; g < sd.groups().size(); ++g) {
      const int gi = static_cast<int>(g);
      const double e = sd.group_energy(gi);
      if (!I.contains(e)) continue;
      amp += std::exp(std::complex<double>(0.0, -t * e)) * sd.projector_element(gi, x, y);
    }
    sup = std::max(sup, std::abs(amp));
  }
  return sup;
}

EnvelopeFitReport combined_envelope_check(const std::vector<EnvelopeRow>& rows, double s1,
                                          double s2, double s3, double c_rate, double mu) {
  EnvelopeFitReport rep;
  rep.weights_valid = s1 >= 0 && s2 >= 0 && s3 >= 0 && std::abs(s1 + s2 + s3 - 1.0) < 1e-12;
  if (!rep.weights_valid)
    throw std::domain_error("combined_envelope_check: weights must be nonnegative and sum to 1");
  double c = 0;
  auto envelope = [&](const EnvelopeRow& r) {
    double env = std::exp(-s1 * c_rate * r.n) * std::exp(-s2 * mu * r.dbar_xy);
    env *= s3 > 0 ? r.f_s3mu : 1.0;
    return env;
  };
  for (const auto& r : rows) {
    const double env = envelope(r);
    if (env > 0) c = std::max(c, r.mean / env);
  }
  rep.c_calibrated = c;
  rep.violations = 0;
  for (const auto& r : rows)
    if (r.mean > c * envelope(r) * (1.0 + 1e-9)) ++rep.violations;
  return rep;
}

}  // namespace hcl
