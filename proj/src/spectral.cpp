#include "hcl/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hcl {

SpectralData::SpectralData(Eigen::VectorXd eigval, Eigen::MatrixXd eigvec,
                           std::vector<int> parent, double scale)
    : eigval_(std::move(eigval)), eigvec_(std::move(eigvec)), parent_(std::move(parent)) {
  const double tol = 1e-8 * (1.0 + scale);
  int begin = 0;
  for (int i = 1; i <= dim(); ++i) {
    if (i == dim() || eigval_(i) - eigval_(i - 1) > tol) {
      groups_.emplace_back(begin, i);
      begin = i;
    }
  }
}

double SpectralData::group_energy(int gidx) const {
  const auto [b, e] = groups_[gidx];
  double s = 0;
  for (int i = b; i < e; ++i) s += eigval_(i);
  return s / (e - b);
}

double SpectralData::projector_element(int gidx, int x, int y) const {
  const auto [b, e] = groups_[gidx];
  double s = 0;
  for (int i = b; i < e; ++i) s += eigvec_(x, i) * eigvec_(y, i);
  return s;
}

SpectralData diagonalize(const SymmetricOperator& op, int dim_cap) {
  if (op.dim() > dim_cap)
    throw CapacityError("diagonalize: dimension " + std::to_string(op.dim()) +
                        " exceeds cap " + std::to_string(dim_cap));
  Eigen::MatrixXd M = op.dense();
  Eigen::VectorXd w(op.dim());
  const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', op.dim(), M.data(), op.dim(),
                                  w.data());
  if (info != 0)
    throw std::runtime_error("diagonalize: dsyevd failed with info " + std::to_string(info));
  return SpectralData(std::move(w), std::move(M), op.parent_index(), op.max_abs());
}

std::complex<double> green(const SpectralData& sd, int x, int y, std::complex<double> z,
                           double floor) {
  if (z.imag() == 0.0) {
    double dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sd.dim(); ++i)
      dist = std::min(dist, std::abs(sd.eigenvalues()(i) - z.real()));
    if (dist < floor)
      throw SingularityError("green: real energy within " + std::to_string(floor) +
                             " of an eigenvalue");
  }
  std::complex<double> g = 0;
  for (int i = 0; i < sd.dim(); ++i)
    g += sd.eigenvectors()(x, i) * sd.eigenvectors()(y, i) / (sd.eigenvalues()(i) - z);
  return g;
}

double green_restricted(const ConfigSpace& space, const ModelParams& params,
                        const DisorderRealization& w, int k, const Configuration& x,
                        const Configuration& y, double E) {
  const std::vector<int> idx = sector_indices(space, k, SectorMode::AtLeast);
  const int xi = space.index_of(x), yi = space.index_of(y);
  std::vector<int> pos(space.size(), -1);
  for (std::size_t a = 0; a < idx.size(); ++a) pos[idx[a]] = static_cast<int>(a);
  if (pos[xi] < 0 || pos[yi] < 0)
    throw std::domain_error("green_restricted: configuration outside the at-least-k sector");

  const SymmetricOperator Hk = restrict_to(build_hamiltonian(space, params, w), idx);
  Eigen::MatrixXd M = Hk.dense();
  M.diagonal().array() -= E;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("green_restricted: E is not below the spectrum of H^(k)");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Hk.dim());
  rhs(pos[yi]) = 1.0;
  return llt.solve(rhs)(pos[xi]);
}

double eigenfunction_correlator(const SpectralData& sd, int x, int y, EnergyWindow I) {
  double q = 0;
  for (std::size_t g = 0; g < sd.groups().size(); ++g)
    if (I.contains(sd.group_energy(static_cast<int>(g))))
      q += std::abs(sd.projector_element(static_cast<int>(g), x, y));
  return q;
}

double interpolated_correlator(const SpectralData& sd, int x, int y, EnergyWindow I, double s) {
  if (s < 0.0 || s > 1.0)
    throw std::domain_error("interpolated_correlator: s must lie in [0,1]");
  double q = 0;
  for (std::size_t g = 0; g < sd.groups().size(); ++g) {
    const int gi = static_cast<int>(g);
    if (!I.contains(sd.group_energy(gi))) continue;
    const double pxx = std::abs(sd.projector_element(gi, x, x));
    const double pxy = std::abs(sd.projector_element(gi, x, y));
    q += std::pow(pxx, 1.0 - s) * std::pow(pxy, s);  // pow(0,0) == 1 at the s edges
  }
  return q;
}

double window_correlator(const SpectralData& sd, const ConfigSpace& space, SiteInterval U,
                         SiteInterval V, EnergyWindow I) {
  std::vector<int> xs, ys;
  for (int i = 0; i < space.size(); ++i) {
    if (meets(space.config(i), U)) xs.push_back(i);
    if (meets(space.config(i), V)) ys.push_back(i);
  }
  double q = 0;
  for (std::size_t g = 0; g < sd.groups().size(); ++g) {
    const int gi = static_cast<int>(g);
    if (!I.contains(sd.group_energy(gi))) continue;
    for (int xi : xs)
      for (int yi : ys) q += std::abs(sd.projector_element(gi, xi, yi));
  }
  return q;
}

double reduced_density_element(const SpectralData& sd, int col, const ConfigSpace& space,
                               int u, int v) {
  const auto& phi = sd.eigenvectors();
  double s = 0;
  if (u == v) {
    for (int i = 0; i < space.size(); ++i)
      if (space.config(i).contains(u)) s += phi(i, col) * phi(i, col);
    return s;
  }
  for (int i = 0; i < space.size(); ++i) {
    const Configuration& x = space.config(i);
    if (!x.contains(v) || x.contains(u)) continue;
    Configuration y = x;
    *std::find(y.sites.begin(), y.sites.end(), v) = u;
    std::sort(y.sites.begin(), y.sites.end());
    s += phi(i, col) * phi(space.index_of(y), col);
  }
  return s;
}

double heat_kernel_diag(const SpectralData& sd, int x, double t) {
  if (t < 0) throw std::domain_error("heat_kernel_diag: t must be >= 0");
  double s = 0;
  for (int i = 0; i < sd.dim(); ++i)
    s += std::exp(-t * sd.eigenvalues()(i)) * sd.eigenvectors()(x, i) * sd.eigenvectors()(x, i);
  return s;
}

namespace {

// 16-point Gauss-Legendre nodes/weights on (-1, 1)
constexpr int kGL = 16;
constexpr double kGLx[kGL] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGLw[kGL] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

// integral of |G|^s over the half-interval anchored at `a` (which may sit on
// an eigenvalue) up to the midpoint m.  The substitution E = a + w^{1/(1-s)}
// flattens the integrable singularity; the innermost offset range
// u < u_cut is handled in closed form through the pole coefficient.
double half_integral(const SpectralData& sd, int x, int y, double a, double m, double s,
                     int gl_panels) {
  const double sign = m >= a ? 1.0 : -1.0;
  const double len = std::abs(m - a);
  if (len == 0) return 0;

  // eigenvalue offsets from the anchor; exact zeros mark pole terms
  const int dim = sd.dim();
  std::vector<double> offset(dim), coeff(dim);
  double pole = 0;
  for (int i = 0; i < dim; ++i) {
    offset[i] = sign * (sd.eigenvalues()(i) - a);
    coeff[i] = sd.eigenvectors()(x, i) * sd.eigenvectors()(y, i);
    if (offset[i] == 0) pole += coeff[i];
  }
  auto abs_green_pow_at = [&](double u) {  // u = sign (E - a) > 0
    double g = 0;
    for (int i = 0; i < dim; ++i) g += coeff[i] / (offset[i] - u);
    return std::pow(std::abs(g), s);
  };

  const double p = 1.0 / (1.0 - s);
  const double wmax = std::pow(len, 1.0 - s);
  const double u_cut = 1e-18 * (1.0 + std::abs(a));
  const double w_cut = std::pow(u_cut, 1.0 - s);

  double acc = 0;
  double hi = wmax;
  while (hi > w_cut) {
    const double lo = std::max(hi * 0.5, w_cut);
    const double panel = (hi - lo) / gl_panels;
    for (int pp = 0; pp < gl_panels; ++pp) {
      const double c = lo + (pp + 0.5) * panel, h = 0.5 * panel;
      for (int q = 0; q < kGL; ++q) {
        const double w = c + h * kGLx[q];
        const double u = std::pow(w, p);
        const double jac = p * std::pow(w, p - 1.0);
        acc += kGLw[q] * h * abs_green_pow_at(u) * jac;
      }
    }
    hi = lo;
  }
  // closed-form pole sliver on u in (0, w_cut^p]
  if (pole != 0.0) acc += std::pow(std::abs(pole), s) * w_cut / (1.0 - s);
  return acc;
}

double probe_integral(const SpectralData& sd, int x, int y, EnergyWindow I, double s,
                      int gl_panels) {
  // split at eigenvalue-group energies inside the window
  std::vector<double> cuts{I.lo};
  for (std::size_t g = 0; g < sd.groups().size(); ++g) {
    const double e = sd.group_energy(static_cast<int>(g));
    if (e > I.lo && e < I.hi) cuts.push_back(e);
  }
  cuts.push_back(I.hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a <= 0) continue;
    const double m = 0.5 * (a + b);
    total += half_integral(sd, x, y, a, m, s, gl_panels);
    total += half_integral(sd, x, y, b, m, s, gl_panels);
  }
  return total;
}

}  // namespace

SingularLimitResult singular_limit_probe(const SpectralData& sd, int x, int y, EnergyWindow I,
                                         const std::vector<double>& s_grid,
                                         int panels_per_interval) {
  SingularLimitResult res;
  res.s_grid = s_grid;
  res.correlator = eigenfunction_correlator(sd, x, y, I);
  const int gl_panels = std::max(1, panels_per_interval / kGL);
  for (double s : s_grid) {
    if (s <= 0.0 || s >= 1.0)
      throw std::domain_error("singular_limit_probe: s_grid must lie in (0,1)");
    const double coarse = probe_integral(sd, x, y, I, s, gl_panels);
    const double fine = probe_integral(sd, x, y, I, s, 2 * gl_panels);
    const double val = 0.5 * (1.0 - s) * fine;
    res.value.push_back(val);
    const double err = 0.5 * (1.0 - s) * std::abs(fine - coarse);
    res.converged.push_back(err <= 1e-8 * (1.0 + std::abs(val)));
  }
  return res;
}

}  // namespace hcl
