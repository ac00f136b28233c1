#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "hcl/disorder.hpp"
#include "hcl/spectral.hpp"
#include "hcl/xxz.hpp"
#include "oracles.hpp"

using hcl::ConfigSpace;
using hcl::SpinSectorBasis;
using hcl::XxzParams;

namespace {

XxzParams plain(double delta, int N) {
  XxzParams p;
  p.delta = delta;
  p.gamma = 0.0;
  p.lambda = 0.0;
  p.omega.assign(N, 0.0);
  return p;
}

}  // namespace

TEST_CASE("local bond matrix") {
  const Eigen::Matrix4d h = hcl::build_local_bond(2.0);
  // diagonal from 1/4 - Sz Sz on (uu, ud, du, dd)
  CHECK(h(0, 0) == 0.0);
  CHECK(h(1, 1) == 0.5);
  CHECK(h(2, 2) == 0.5);
  CHECK(h(3, 3) == 0.0);
  // exchange coupling from the ladder-operator expansion
  CHECK(h(1, 2) == -0.25);
  CHECK(h(2, 1) == -0.25);
  CHECK((h - h.transpose()).norm() == 0.0);
  // Ising point: purely diagonal
  const Eigen::Matrix4d hi = hcl::build_local_bond(std::numeric_limits<double>::infinity());
  CHECK(hi(1, 2) == 0.0);
  CHECK(hi(1, 1) == 0.5);
  CHECK_THROWS_AS(hcl::build_local_bond(0.0), std::domain_error);
}

TEST_CASE("local bond equals the spin-matrix expansion") {
  // independent oracle: assemble from explicit 2x2 spin matrices
  Eigen::Matrix2d sx, sy_im, sz, id;  // sy stored as imaginary part (real model)
  sx << 0, 0.5, 0.5, 0;
  sy_im << 0, -0.5, 0.5, 0;  // Sy = i * sy_im with this sign layout
  sz << 0.5, 0, 0, -0.5;
  id.setIdentity();
  auto kron = [](const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
    Eigen::Matrix4d k;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return k;
  };
  const double delta = 3.0;
  // Sy x Sy = (i sy_im) x (i sy_im) = - sy_im x sy_im (real)
  const Eigen::Matrix4d oracle_h = -(1.0 / delta) * (kron(sx, sx) - kron(sy_im, sy_im)) +
                                   (0.25 * kron(id, id) - kron(sz, sz));
  CHECK((hcl::build_local_bond(delta) - oracle_h).norm() < 1e-15);
}

TEST_CASE("spin sector basis mirrors the configuration ordering") {
  const ConfigSpace sp(2, 2);
  const SpinSectorBasis basis(5, 2);
  CHECK(basis.size() == sp.size());
  const auto map = hcl::dictionary(sp, basis);
  for (int i = 0; i < sp.size(); ++i) CHECK(map[i] == i);  // identity permutation
  // round trip on the basis labels
  for (int i = 0; i < basis.size(); ++i) CHECK(basis.index_of(basis.state(i)) == i);
}

TEST_CASE("droplet hamiltonian small cases") {
  SUBCASE("N=2, n=1 with boundary and disorder matches the hand expansion") {
    SpinSectorBasis basis(2, 1);
    XxzParams p;
    p.delta = 2.0;  // g
    p.gamma = 1.0;
    p.lambda = 3.0;
    p.omega = {0.25, 0.75};
    const auto H = hcl::build_droplet_hamiltonian(basis, p);
    // scaled by 2g this must be diag(2g + lambda omega) with hop -1
    const Eigen::MatrixXd M = 2.0 * p.delta * H.dense();
    CHECK(M(0, 0) == doctest::Approx(2.0 * 2.0 + 3.0 * 0.25));
    CHECK(M(1, 1) == doctest::Approx(2.0 * 2.0 + 3.0 * 0.75));
    CHECK(M(0, 1) == doctest::Approx(-1.0));
  }
  SUBCASE("all spins up has energy zero") {
    SpinSectorBasis basis(4, 0);
    const auto H = hcl::build_droplet_hamiltonian(basis, plain(2.0, 4));
    CHECK(H.dim() == 1);
    CHECK(H.diag()[0] == 0.0);
  }
  SUBCASE("omega = 0 and gamma = 0 reduce to the plain sector") {
    SpinSectorBasis basis(4, 2);
    auto p = plain(2.0, 4);
    p.lambda = 5.0;  // field multiplies omega = 0
    const auto a = hcl::build_droplet_hamiltonian(basis, p);
    const auto b = hcl::build_droplet_hamiltonian(basis, plain(2.0, 4));
    CHECK((a.dense() - b.dense()).norm() == 0.0);
  }
}

TEST_CASE("sector build agrees with the projected full chain") {
  oracle::Rng rng(808);
  for (int N : {2, 3, 5, 8, 10}) {
    XxzParams p;
    p.delta = 1.7;
    p.gamma = 0.8;
    p.lambda = 2.5;
    p.omega.resize(N);
    for (double& o : p.omega) o = rng.uniform();
    for (int n = 0; n <= N; ++n) {
      const SpinSectorBasis basis(N, n);
      const Eigen::MatrixXd direct = hcl::build_droplet_hamiltonian(basis, p).dense();
      const Eigen::MatrixXd projected = hcl::full_chain_sector_dense(basis, p);
      CHECK((direct - projected).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("unitary equivalence with the hard-core chain") {
  SUBCASE("two-site hand case") {
    const ConfigSpace sp = ConfigSpace::interval(0, 1, 1);
    const auto w = hcl::sample_disorder_interval(0, 1, "uniform", 3);
    CHECK(hcl::equivalence_residual(sp, 2.0, 1.0, w) <= 1e-12);
  }
  SUBCASE("zero disorder") {
    const ConfigSpace sp(2, 2);
    auto w = hcl::sample_disorder(2, "uniform", 4);
    for (double& o : w.omega) o = 0.0;
    CHECK(hcl::equivalence_residual(sp, 2.0, 1.0, w) <= 1e-12);
  }
  SUBCASE("random disorder across sizes and couplings") {
    oracle::Rng rng(5150);
    for (double g : {1.5, 2.0, 4.0}) {
      for (int t = 0; t < 20; ++t) {
        const auto w = hcl::sample_disorder(3, "uniform", rng.next());
        const ConfigSpace sp(3, 3);
        CHECK(hcl::equivalence_residual(sp, g, 7.0, w) <= 1e-10);
      }
    }
  }
}

TEST_CASE("spin correlation transport") {
  // the hard-core reduced density element equals the corresponding spin
  // matrix element <Phi| S-_u S+_v |Phi> under the dictionary
  const ConfigSpace sp(2, 2);
  const int N = sp.num_sites();
  const SpinSectorBasis basis(N, 2);
  const auto w = hcl::sample_disorder(2, "uniform", 21);
  const double g = 2.0, lambda = 4.0;

  const auto sd = hcl::diagonalize(hcl::build_hamiltonian(sp, {g, lambda}, w));

  XxzParams p;
  p.delta = g;
  p.gamma = 1.0;
  p.lambda = lambda;
  p.omega.resize(N);
  for (int k = 1; k <= N; ++k) p.omega[k - 1] = w.at(sp.lo() + k - 1);
  const auto sd_spin = hcl::diagonalize(hcl::build_droplet_hamiltonian(basis, p));

  for (int col : {0, 2}) {
    for (int u = sp.lo(); u <= sp.hi(); ++u) {
      for (int v = sp.lo(); v <= sp.hi(); ++v) {
        const double rdm = hcl::reduced_density_element(sd, col, sp, u, v);
        // spin side: sum over sector states containing v-down, flip to u
        const int ku = u - sp.lo() + 1, kv = v - sp.lo() + 1;
        double spin = 0;
        for (int i = 0; i < basis.size(); ++i) {
          const auto& downs = basis.state(i);
          const bool has_v = std::find(downs.begin(), downs.end(), kv) != downs.end();
          if (!has_v) continue;
          if (ku != kv && std::find(downs.begin(), downs.end(), ku) != downs.end()) continue;
          std::vector<int> flipped = downs;
          if (ku != kv) {
            for (int& d : flipped)
              if (d == kv) d = ku;
            std::sort(flipped.begin(), flipped.end());
          }
          spin += sd_spin.eigenvectors()(i, col) *
                  sd_spin.eigenvectors()(basis.index_of(flipped), col);
        }
        // eigenvectors are defined up to a global sign; compare magnitudes
        CHECK(std::abs(std::abs(rdm) - std::abs(spin)) <= 1e-10);
      }
    }
  }
}
