#include "hcl/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hcl/disorder.hpp"
#include "hcl/rng.hpp"

namespace hcl {

void McPlan::validate() const {
  params.validate();
  if (realizations < 1) throw std::domain_error("McPlan: realizations must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("McPlan: s must lie in (0,1)");
  if (!(mu > 0.0 && mu < mu_T)) throw std::domain_error("McPlan: need 0 < mu < mu_T");
  if (window.lo > window.hi) throw std::domain_error("McPlan: empty window");
}

DisorderRealization McPlan::realization(int r) const {
  return sample_disorder(L, distribution, derive_seed(seed_root, static_cast<std::uint64_t>(r)),
                         omega_max);
}

McEstimate make_estimate(const std::vector<double>& samples) {
  McEstimate e;
  e.count = static_cast<long>(samples.size());
  if (samples.empty()) return e;
  double sum = 0;
  for (double v : samples) {
    sum += v;
    e.min = std::min(e.min, v);
    e.max = std::max(e.max, v);
  }
  e.mean = sum / static_cast<double>(e.count);
  if (e.count > 1) {
    double ss = 0;
    for (double v : samples) ss += (v - e.mean) * (v - e.mean);
    e.stderr_ = std::sqrt(ss / static_cast<double>(e.count - 1)) /
                std::sqrt(static_cast<double>(e.count));
  }
  return e;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::domain_error("fit_line: need at least two points");
  const int n = static_cast<int>(x.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::domain_error("fit_line: degenerate abscissae");
  LineFit f;
  f.npoints = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ss = 0;
    for (int i = 0; i < n; ++i) {
      const double r = y[i] - (f.intercept + f.slope * x[i]);
      ss += r * r;
    }
    f.slope_se = std::sqrt(ss / (n - 2) / sxx);
  }
  return f;
}

void parallel_for(int count, const std::function<void(int)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

// Per-realization Lemma-1.1 guard at k = 1: with lambda V >= 0 the spectrum
// must sit above 2(g-1).  A breach means a build bug, so abort rather than
// average over it.
void guard_spectrum(const McPlan& plan, double min_eigenvalue, int r) {
  if (!plan.guard_thresholds) return;
  const double floor = 2.0 * (plan.params.g - 1.0) - 1e-9;
  if (min_eigenvalue < floor) {
    std::ostringstream os;
    os << "realization " << r << " (seed root " << plan.seed_root << "): min eigenvalue "
       << min_eigenvalue << " breaches the cluster threshold " << floor;
    throw std::runtime_error(os.str());
  }
}

}  // namespace

DecayTable estimate_correlator_decay(const McPlan& plan) {
  plan.validate();
  const double threshold = fock_threshold(plan.params.g, plan.mu_T);
  if (!(threshold > 0.0) || plan.window.lo < 0.0 || !(plan.window.hi < threshold)) {
    std::ostringstream os;
    os << "estimate_correlator_decay: window [" << plan.window.lo << ", " << plan.window.hi
       << "] must lie inside [0, E(g,mu_T)) with E(g,mu_T) = 4g - 12 e^{mu_T} = " << threshold;
    throw std::domain_error(os.str());
  }

  const ConfigSpace space(plan.L, plan.n);
  const auto& cl = space.clustered();
  const int ncl = static_cast<int>(cl.size());

  // clustered ordered pairs grouped by separation |x_1 - y_1|
  std::vector<std::vector<std::pair<int, int>>> pairs_by_sep(ncl);
  for (int a = 0; a < ncl; ++a)
    for (int b = 0; b < ncl; ++b) {
      const int sep = std::abs(space.config(cl[a]).sites[0] - space.config(cl[b]).sites[0]);
      pairs_by_sep[sep].emplace_back(cl[a], cl[b]);
    }

  std::vector<std::vector<double>> sep_samples(ncl, std::vector<double>(plan.realizations, 0.0));
  std::vector<char> has_weight(plan.realizations, 0);

  parallel_for(plan.realizations, [&](int r) {
    const DisorderRealization w = plan.realization(r);
    const SpectralData sd = diagonalize(build_hamiltonian(space, plan.params, w));
    guard_spectrum(plan, sd.eigenvalues()(0), r);
    bool any = false;
    for (int i = 0; i < sd.dim(); ++i)
      if (plan.window.contains(sd.eigenvalues()(i))) {
        any = true;
        break;
      }
    has_weight[r] = any ? 1 : 0;
    if (!any) return;  // every correlator vanishes identically
    for (int sep = 0; sep < ncl; ++sep) {
      double acc = 0;
      for (const auto& [xi, yi] : pairs_by_sep[sep])
        acc += eigenfunction_correlator(sd, xi, yi, plan.window);
      sep_samples[sep][r] = acc / static_cast<double>(pairs_by_sep[sep].size());
    }
  });

  DecayTable table;
  table.n = plan.n;
  for (char h : has_weight) table.realizations_with_weight += h;
  std::vector<double> xs, ys;
  for (int sep = 0; sep < ncl; ++sep) {
    DecaySeparationRow row;
    row.separation = sep;
    row.pair_count = static_cast<long>(pairs_by_sep[sep].size());
    row.est = make_estimate(sep_samples[sep]);
    if (row.est.mean > 0) {
      xs.push_back(sep);
      ys.push_back(std::log(row.est.mean));
    }
    table.per_separation.push_back(row);
    table.pairs.push_back(
        {pairs_by_sep[sep].front().first, pairs_by_sep[sep].front().second, sep, true, row.est});
  }

  if (xs.size() >= 2) {
    const LineFit f = fit_line(xs, ys);
    table.mu_fit = -f.slope;
    table.mu_fit_se = f.slope_se;
    table.log_c_fit = f.intercept;
    double c = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      c = std::max(c, std::exp(ys[i] + table.mu_fit * xs[i]));
    table.c_envelope = c;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (std::exp(ys[i]) > c * std::exp(-table.mu_fit * xs[i]) * (1.0 + 1e-9))
        ++table.violations;
  }
  return table;
}

namespace {

double green_entry_lu(const SymmetricOperator& H, double E, int xi, int yi) {
  Eigen::MatrixXd M = H.dense();
  M.diagonal().array() -= E;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(H.dim());
  rhs(yi) = 1.0;
  return lu.solve(rhs)(xi);
}

}  // namespace

McEstimate fractional_moment_probe(const McPlan& plan, const Configuration& x,
                                   const Configuration& y,
                                   std::optional<std::pair<int, int>> conditioning) {
  plan.validate();
  const ConfigSpace space(plan.L, plan.n);
  const int xi = space.index_of(x), yi = space.index_of(y);
  if (conditioning) {
    const auto [u, v] = *conditioning;
    if (!x.contains(u) || !y.contains(v))
      throw std::domain_error(
          "fractional_moment_probe: conditioning sites must satisfy u in x, v in y");
  }
  const DisorderRealization base = sample_disorder(
      plan.L, plan.distribution, derive_seed(plan.seed_root ^ 0x5eedULL, 0), plan.omega_max);

  std::vector<double> samples(plan.realizations);
  parallel_for(plan.realizations, [&](int r) {
    DisorderRealization w = plan.realization(r);
    if (conditioning) {
      const auto [u, v] = *conditioning;
      DisorderRealization mixed = base;  // freeze the field away from u and v
      mixed.omega[u - mixed.lo] = w.omega[u - w.lo];
      mixed.omega[v - mixed.lo] = w.omega[v - w.lo];
      w = std::move(mixed);
    }
    const SymmetricOperator H = build_hamiltonian(space, plan.params, w);
    const double g = green_entry_lu(H, plan.energy, xi, yi);
    samples[r] = std::pow(std::abs(g), plan.s);
  });
  return make_estimate(samples);
}

namespace {

struct SupSumGeometry {
  SiteInterval interval;
  ConfigSpace space;
  std::vector<int> clustered;            // ordinals within the subinterval space
  std::vector<std::vector<double>> w1;   // [x][y in clustered] e^{s mu |x1-y1|}
  std::vector<std::vector<double>> w2;   // [x][all y] e^{s mu dbar}
};

}  // namespace

SupSumReport sum_S1_S2(const McPlan& plan) {
  plan.validate();

  // the sup over Lambda' ranges over subintervals, matching the proof's
  // right-truncations
  std::vector<SupSumGeometry> geoms;
  for (int a = -plan.L; a <= plan.L; ++a)
    for (int b = a + plan.n - 1; b <= plan.L; ++b) {
      SupSumGeometry g{SiteInterval{a, b}, ConfigSpace::interval(a, b, plan.n), {}, {}, {}};
      g.clustered = g.space.clustered();
      const int ncl = static_cast<int>(g.clustered.size());
      g.w1.resize(ncl);
      g.w2.resize(ncl);
      for (int xa = 0; xa < ncl; ++xa) {
        const Configuration& x = g.space.config(g.clustered[xa]);
        g.w1[xa].resize(ncl);
        for (int yb = 0; yb < ncl; ++yb) {
          const Configuration& y = g.space.config(g.clustered[yb]);
          g.w1[xa][yb] = std::exp(plan.s * plan.mu * std::abs(x.sites[0] - y.sites[0]));
        }
        g.w2[xa].resize(g.space.size());
        for (int yi = 0; yi < g.space.size(); ++yi)
          g.w2[xa][yi] =
              std::exp(plan.s * plan.mu * dbar(x, g.space.config(yi), g.space));
      }
      geoms.push_back(std::move(g));
    }

  // per-(Lambda', x) sums, one sample per realization
  struct Cell {
    std::vector<double> s1, s2;
  };
  std::vector<std::vector<Cell>> cells(geoms.size());
  for (std::size_t gi = 0; gi < geoms.size(); ++gi) {
    cells[gi].resize(geoms[gi].clustered.size());
    for (auto& c : cells[gi]) {
      c.s1.assign(plan.realizations, 0.0);
      c.s2.assign(plan.realizations, 0.0);
    }
  }

  parallel_for(plan.realizations, [&](int r) {
    const DisorderRealization w = plan.realization(r);
    for (std::size_t gi = 0; gi < geoms.size(); ++gi) {
      const auto& g = geoms[gi];
      const SymmetricOperator H = build_hamiltonian(g.space, plan.params, w);
      Eigen::MatrixXd M = H.dense();
      M.diagonal().array() -= plan.energy;
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
      for (std::size_t xa = 0; xa < g.clustered.size(); ++xa) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(g.space.size());
        rhs(g.clustered[xa]) = 1.0;
        const Eigen::VectorXd col = lu.solve(rhs);  // row of G by symmetry
        double t1 = 0, t2 = 0;
        for (std::size_t yb = 0; yb < g.clustered.size(); ++yb)
          t1 += g.w1[xa][yb] * std::pow(std::abs(col(g.clustered[yb])), plan.s);
        for (int yi = 0; yi < g.space.size(); ++yi)
          t2 += g.w2[xa][yi] * std::pow(std::abs(col(yi)), plan.s);
        cells[gi][xa].s1[r] = t1;
        cells[gi][xa].s2[r] = t2;
      }
    }
  });

  SupSumReport rep;
  bool first = true;
  for (std::size_t gi = 0; gi < geoms.size(); ++gi) {
    for (std::size_t xa = 0; xa < geoms[gi].clustered.size(); ++xa) {
      const McEstimate e1 = make_estimate(cells[gi][xa].s1);
      const McEstimate e2 = make_estimate(cells[gi][xa].s2);
      const int xo = geoms[gi].clustered[xa];
      if (first || e1.mean > rep.s1.est.mean)
        rep.s1 = {geoms[gi].interval, xo, e1};
      if (first || e2.mean > rep.s2.est.mean)
        rep.s2 = {geoms[gi].interval, xo, e2};
      first = false;
    }
  }
  return rep;
}

WindowAverage window_correlator_average(const McPlan& plan, SiteInterval U, SiteInterval V) {
  plan.validate();
  if (interval_distance(U, V) == 0)
    throw std::domain_error("window_correlator_average: windows must be disjoint");
  const ConfigSpace space(plan.L, plan.n);
  std::vector<double> samples(plan.realizations);
  parallel_for(plan.realizations, [&](int r) {
    const DisorderRealization w = plan.realization(r);
    const SpectralData sd = diagonalize(build_hamiltonian(space, plan.params, w));
    guard_spectrum(plan, sd.eigenvalues()(0), r);
    samples[r] = window_correlator(sd, space, U, V, plan.window);
  });
  return {U, V, interval_distance(U, V), make_estimate(samples)};
}

}  // namespace hcl
