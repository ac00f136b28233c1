#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "hcl/disorder.hpp"
#include "hcl/spectral.hpp"
#include "oracles.hpp"

using hcl::ConfigSpace;
using hcl::Configuration;
using hcl::EnergyWindow;

namespace {

hcl::SymmetricOperator scalar_op(double c) {
  hcl::SymmetricOperator op(1);
  op.set_diag(0, c);
  op.finalize();
  return op;
}

struct Instance {
  ConfigSpace space;
  hcl::DisorderRealization w;
  hcl::SymmetricOperator H;
  hcl::SpectralData sd;
};

Instance make_instance(int L, int n, double g, double lambda, std::uint64_t seed) {
  ConfigSpace space(L, n);
  auto w = hcl::sample_disorder(L, "uniform", seed);
  auto H = hcl::build_hamiltonian(space, {g, lambda}, w);
  auto sd = hcl::diagonalize(H);
  return {std::move(space), std::move(w), std::move(H), std::move(sd)};
}

}  // namespace

TEST_CASE("diagonalize basics") {
  SUBCASE("1x1 operator") {
    const auto sd = hcl::diagonalize(scalar_op(3.25));
    CHECK(sd.eigenvalues()(0) == 3.25);
    CHECK(std::abs(sd.eigenvectors()(0, 0)) == 1.0);
  }
  SUBCASE("diagonal operator: sorted diagonal") {
    hcl::SymmetricOperator op(4);
    op.set_diag(0, 2.0);
    op.set_diag(1, -1.0);
    op.set_diag(2, 5.0);
    op.set_diag(3, 0.5);
    op.finalize();
    const auto sd = hcl::diagonalize(op);
    CHECK(sd.eigenvalues()(0) == -1.0);
    CHECK(sd.eigenvalues()(1) == 0.5);
    CHECK(sd.eigenvalues()(2) == 2.0);
    CHECK(sd.eigenvalues()(3) == 5.0);
  }
  SUBCASE("capacity cap raises an explicit error") {
    hcl::SymmetricOperator op(10);
    CHECK_THROWS_AS(hcl::diagonalize(op, 5), hcl::CapacityError);
  }
  SUBCASE("threshold at k=1 for the disordered Hamiltonian") {
    const auto inst = make_instance(3, 3, 2.0, 1.0, 42);
    CHECK(inst.sd.eigenvalues()(0) >= 2.0 * (2.0 - 1.0) - 1e-9);
  }
}

TEST_CASE("reconstruction and orthonormality invariants") {
  const auto inst = make_instance(3, 3, 2.0, 5.0, 7);
  const Eigen::MatrixXd Hd = inst.H.dense();
  const auto& Q = inst.sd.eigenvectors();
  const Eigen::MatrixXd R = Q * inst.sd.eigenvalues().asDiagonal() * Q.transpose() - Hd;
  CHECK(R.cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + inst.H.max_abs()));
  const Eigen::MatrixXd I = Q.transpose() * Q - Eigen::MatrixXd::Identity(Q.cols(), Q.cols());
  CHECK(I.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("spectral projectors resolve the identity") {
  const auto inst = make_instance(3, 2, 2.0, 3.0, 29);
  const int m = inst.space.size();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t g = 0; g < inst.sd.groups().size(); ++g)
    for (int x = 0; x < m; ++x)
      for (int y = 0; y < m; ++y)
        sum(x, y) += inst.sd.projector_element(static_cast<int>(g), x, y);
  CHECK((sum - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("green function") {
  SUBCASE("1x1 scalar resolvent") {
    const double c = 4.5;
    const auto sd = hcl::diagonalize(scalar_op(c));
    const auto g = hcl::green(sd, 0, 0, {1.0, 0.5});
    const std::complex<double> expect = 1.0 / (c - std::complex<double>{1.0, 0.5});
    CHECK(std::abs(g - expect) < 1e-15);
  }
  SUBCASE("resolvent decay at large |z|") {
    const auto inst = make_instance(3, 2, 2.0, 1.0, 3);
    const auto g = hcl::green(inst.sd, 0, 1, {1e9, 0.0});
    CHECK(std::abs(g) < 1e-8);
  }
  SUBCASE("conjugation symmetry") {
    const auto inst = make_instance(3, 2, 2.0, 1.0, 3);
    const std::complex<double> z{1.0, 0.7};
    const auto a = hcl::green(inst.sd, 2, 5, z);
    const auto b = hcl::green(inst.sd, 2, 5, std::conj(z));
    CHECK(std::abs(a - std::conj(b)) < 1e-12);
  }
  SUBCASE("eigendecomposition agrees with a direct dense solve") {
    const auto inst = make_instance(3, 3, 2.0, 2.0, 11);
    const Eigen::MatrixXcd Hc = inst.H.dense().cast<std::complex<double>>();
    oracle::Rng rng(555);
    for (int t = 0; t < 100; ++t) {
      const int x = rng.uniform_int(0, inst.space.size() - 1);
      const int y = rng.uniform_int(0, inst.space.size() - 1);
      const std::complex<double> z{8.0 * rng.uniform() - 2.0, rng.uniform() + 0.1};
      Eigen::MatrixXcd M = Hc;
      M.diagonal().array() -= z;
      Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(inst.space.size());
      rhs(y) = 1.0;
      const std::complex<double> direct = M.partialPivLu().solve(rhs)(x);
      const auto g = hcl::green(inst.sd, x, y, z);
      // relative agreement, with an absolute floor for cancellation-limited
      // nearly-zero entries
      CHECK(std::abs(g - direct) <= 1e-9 * (std::abs(direct) + 1e-6));
    }
  }
  SUBCASE("real energy at an eigenvalue raises a singularity error") {
    const auto sd = hcl::diagonalize(scalar_op(2.0));
    CHECK_THROWS_AS(hcl::green(sd, 0, 0, {2.0, 0.0}), hcl::SingularityError);
    CHECK_NOTHROW(hcl::green(sd, 0, 0, {2.0, 1e-6}));
  }
}

TEST_CASE("green_restricted") {
  SUBCASE("one-dimensional top sector matches the scalar formula") {
    const ConfigSpace sp(1, 2);
    const auto w = hcl::sample_disorder(1, "uniform", 17);
    const hcl::ModelParams mp{2.0, 1.5};
    const Configuration x{{-1, 1}};  // the only 2-cluster configuration
    const double direct = hcl::green_restricted(sp, mp, w, 2, x, x, 0.0);
    const double diag = 2.0 * 2.0 * 2.0 + 1.5 * (w.at(-1) + w.at(1));
    CHECK(direct == doctest::Approx(1.0 / diag).epsilon(1e-12));
  }
  SUBCASE("E = 0 is well-defined on the two-cluster sector") {
    const ConfigSpace sp(3, 2);
    const auto w = hcl::sample_disorder(3, "uniform", 23);
    CHECK_NOTHROW(hcl::green_restricted(sp, {2.0, 1.0}, w, 2, {{-2, 0}}, {{0, 2}}, 0.0));
  }
  SUBCASE("configurations outside the sector are rejected") {
    const ConfigSpace sp(3, 2);
    const auto w = hcl::sample_disorder(3, "uniform", 23);
    CHECK_THROWS_AS(hcl::green_restricted(sp, {2.0, 1.0}, w, 2, {{0, 1}}, {{0, 2}}, 0.0),
                    std::domain_error);
  }
  SUBCASE("energies at or above the sector spectrum are rejected") {
    const ConfigSpace sp(2, 2);
    const auto w = hcl::sample_disorder(2, "uniform", 29);
    CHECK_THROWS_AS(hcl::green_restricted(sp, {2.0, 0.0}, w, 2, {{-2, 0}}, {{0, 2}}, 100.0),
                    std::domain_error);
  }
}

TEST_CASE("eigenfunction correlator identities") {
  const auto inst = make_instance(3, 3, 2.0, 4.0, 13);
  const int m = inst.space.size();
  const EnergyWindow whole{inst.sd.eigenvalues()(0) - 1, inst.sd.eigenvalues()(m - 1) + 1};
  oracle::Rng rng(999);
  for (int t = 0; t < 300; ++t) {
    const int x = rng.uniform_int(0, m - 1);
    const int y = rng.uniform_int(0, m - 1);
    const double a = 20.0 * rng.uniform() - 2.0;
    const EnergyWindow I{a, a + 6.0 * rng.uniform()};
    const double qxy = hcl::eigenfunction_correlator(inst.sd, x, y, I);
    const double qxx = hcl::eigenfunction_correlator(inst.sd, x, x, I);
    const double qyy = hcl::eigenfunction_correlator(inst.sd, y, y, I);
    // Cauchy-Schwarz form
    CHECK(qxy <= std::sqrt(qxx * qyy) + 1e-10);
    // diagonal correlator equals the spectral measure of the window
    double pixx = 0;
    for (std::size_t gi = 0; gi < inst.sd.groups().size(); ++gi)
      if (I.contains(inst.sd.group_energy(static_cast<int>(gi))))
        pixx += inst.sd.projector_element(static_cast<int>(gi), x, x);
    CHECK(qxx == doctest::Approx(pixx).epsilon(1e-10));
    CHECK(qxx <= 1.0 + 1e-10);
  }
  // completeness
  for (int x = 0; x < m; ++x)
    CHECK(hcl::eigenfunction_correlator(inst.sd, x, x, whole) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("interpolated correlator") {
  const auto inst = make_instance(3, 2, 2.0, 3.0, 19);
  const EnergyWindow I{2.0, 7.0};
  const int x = 4, y = 11;
  SUBCASE("s = 0 degenerates to the diagonal correlator") {
    CHECK(hcl::interpolated_correlator(inst.sd, x, y, I, 0.0) ==
          doctest::Approx(hcl::eigenfunction_correlator(inst.sd, x, x, I)).epsilon(1e-12));
  }
  SUBCASE("interpolation bound at s = 1/2") {
    const double q = hcl::eigenfunction_correlator(inst.sd, x, y, I);
    const double qs = hcl::interpolated_correlator(inst.sd, x, y, I, 0.5);
    const double qs_rev = hcl::interpolated_correlator(inst.sd, y, x, I, 0.5);
    CHECK(q <= std::sqrt(qs * qs_rev) + 1e-10);
  }
  SUBCASE("always at most one") {
    oracle::Rng rng(321);
    for (int t = 0; t < 200; ++t) {
      const int a = rng.uniform_int(0, inst.space.size() - 1);
      const int b = rng.uniform_int(0, inst.space.size() - 1);
      const double s = rng.uniform();
      CHECK(hcl::interpolated_correlator(inst.sd, a, b, I, s) <= 1.0 + 1e-10);
    }
  }
  SUBCASE("s outside [0,1] is rejected") {
    CHECK_THROWS_AS(hcl::interpolated_correlator(inst.sd, x, y, I, 1.5), std::domain_error);
    CHECK_THROWS_AS(hcl::interpolated_correlator(inst.sd, x, y, I, -0.1), std::domain_error);
  }
}

TEST_CASE("window correlator") {
  const auto inst = make_instance(3, 2, 2.0, 2.0, 31);
  SUBCASE("window without eigenvalues gives zero") {
    CHECK(hcl::window_correlator(inst.sd, inst.space, {-3, -1}, {1, 3},
                                 {-100.0, -50.0}) == 0.0);
  }
  SUBCASE("full windows and full spectrum dominate the diagonal") {
    const int m = inst.space.size();
    const EnergyWindow whole{inst.sd.eigenvalues()(0) - 1, inst.sd.eigenvalues()(m - 1) + 1};
    CHECK(hcl::window_correlator(inst.sd, inst.space, {-3, 3}, {-3, 3}, whole) >=
          static_cast<double>(m) - 1e-8);
  }
}

TEST_CASE("reduced density matrix elements") {
  const auto inst = make_instance(3, 3, 4.0, 0.0, 1);
  const int m = inst.space.size();
  for (int col : {0, 1, m / 2}) {
    SUBCASE("diagonal occupation lies in [0,1] and sums to n") {
      double sum = 0;
      for (int u = -3; u <= 3; ++u) {
        const double occ = hcl::reduced_density_element(inst.sd, col, inst.space, u, u);
        CHECK(occ >= -1e-12);
        CHECK(occ <= 1.0 + 1e-12);
        sum += occ;
      }
      CHECK(sum == doctest::Approx(3.0).epsilon(1e-10));
    }
  }
  SUBCASE("ground-state off-diagonal decays with |u - v| at strong coupling") {
    const double e01 = std::abs(hcl::reduced_density_element(inst.sd, 0, inst.space, 0, 1));
    const double e03 = std::abs(hcl::reduced_density_element(inst.sd, 0, inst.space, -3, 3));
    CHECK(e03 < e01);
  }
}

TEST_CASE("heat kernel diagonal") {
  SUBCASE("t = 0 gives 1") {
    const auto inst = make_instance(2, 2, 2.0, 1.0, 5);
    for (int x = 0; x < inst.space.size(); ++x)
      CHECK(hcl::heat_kernel_diag(inst.sd, x, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("1x1 closed form") {
    const auto sd = hcl::diagonalize(scalar_op(4.75));
    CHECK(hcl::heat_kernel_diag(sd, 0, 1.3) == doctest::Approx(std::exp(-1.3 * 4.75)));
  }
  SUBCASE("correlator is dominated by the tilted heat kernel") {
    const auto inst = make_instance(3, 3, 2.0, 8.0, 77);
    const EnergyWindow I{0.0, 9.5};
    for (double t : {0.5, 1.0, 2.0}) {
      for (int x = 0; x < inst.space.size(); x += 7) {
        const double q = hcl::eigenfunction_correlator(inst.sd, x, x, I);
        const double hk = hcl::heat_kernel_diag(inst.sd, x, t);
        CHECK(q <= std::exp(t * I.hi) * hk + 1e-9);
      }
    }
  }
}

TEST_CASE("singular limit probe") {
  SUBCASE("1x1 closed form") {
    const double e0 = 3.0;
    const auto sd = hcl::diagonalize(scalar_op(e0));
    const EnergyWindow I{e0 - 1.0, e0 + 2.0};
    const std::vector<double> grid{0.5, 0.9, 0.99};
    const auto res = hcl::singular_limit_probe(sd, 0, 0, I, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double s = grid[i];
      const double expect = 0.5 * (std::pow(1.0, 1.0 - s) + std::pow(2.0, 1.0 - s));
      CHECK(res.value[i] == doctest::Approx(expect).epsilon(1e-6));
      CHECK(res.converged[i]);
    }
    CHECK(res.correlator == doctest::Approx(1.0));
  }
  SUBCASE("windows without spectral weight stay near zero") {
    const auto sd = hcl::diagonalize(scalar_op(10.0));
    const auto res = hcl::singular_limit_probe(sd, 0, 0, {0.0, 1.0}, {0.9, 0.99});
    CHECK(res.correlator == 0.0);
    CHECK(std::abs(res.value.back()) < 0.01);
  }
  SUBCASE("probe approaches the correlator on a 6-dim instance") {
    hcl::SymmetricOperator op(6);
    oracle::Rng rng(2024);
    for (int i = 0; i < 6; ++i) op.set_diag(i, 4.0 * rng.uniform());
    for (int i = 0; i < 5; ++i) op.add_offdiag(i, i + 1, -1.0);
    op.finalize();
    const auto sd = hcl::diagonalize(op);
    const EnergyWindow I{sd.eigenvalues()(0) - 0.5, sd.eigenvalues()(3) + 0.1};
    const std::vector<double> grid{0.8, 0.9, 0.97};
    const auto res = hcl::singular_limit_probe(sd, 1, 4, I, grid);
    const double q = res.correlator;
    double prev = 1e30;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double err = std::abs(res.value[i] - q);
      CHECK(err < prev + 1e-12);
      prev = err;
    }
    CHECK(std::abs(res.value.back() - q) < 0.05 * (1.0 + q));
  }
  SUBCASE("s outside (0,1) is rejected") {
    const auto sd = hcl::diagonalize(scalar_op(1.0));
    CHECK_THROWS_AS(hcl::singular_limit_probe(sd, 0, 0, {0.0, 2.0}, {1.0}),
                    std::domain_error);
  }
}
