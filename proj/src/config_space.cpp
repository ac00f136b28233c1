#include "hcl/config_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hcl/combinatorics.hpp"

namespace hcl {

bool Configuration::contains(int site) const {
  return std::binary_search(sites.begin(), sites.end(), site);
}

std::string to_string(const Configuration& x) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < x.sites.size(); ++i) {
    if (i) os << ',';
    os << x.sites[i];
  }
  os << '}';
  return os.str();
}

int cluster_count(const Configuration& x) {
  if (x.sites.empty()) throw std::domain_error("cluster_count: empty configuration");
  int k = 1;
  for (std::size_t i = 1; i < x.sites.size(); ++i)
    if (x.sites[i] - x.sites[i - 1] > 1) ++k;
  return k;
}

int l1_distance(const Configuration& x, const Configuration& y) {
  if (x.sites.size() != y.sites.size())
    throw std::domain_error("l1_distance: mismatched particle numbers");
  int d = 0;
  for (std::size_t i = 0; i < x.sites.size(); ++i) d += std::abs(x.sites[i] - y.sites[i]);
  return d;
}

ConfigSpace::ConfigSpace(int lo, int hi, int n, int) : lo_(lo), hi_(hi), n_(n) {
  const int sites = hi - lo + 1;
  if (sites < 1) throw std::domain_error("ConfigSpace: empty interval");
  if (n < 1 || n > sites)
    throw std::domain_error("ConfigSpace: need 1 <= n <= number of sites");
  max_clusters_ = std::min(n, sites - n + 1);
  const bool use_words = sites <= 64;

  const auto count = binomial(sites, n);
  if (count > (std::uint64_t{1} << 26))
    throw std::domain_error("ConfigSpace: space too large to enumerate");
  configs_.reserve(count);
  if (use_words) words_.reserve(count);
  sector_members_.assign(max_clusters_, {});

  std::vector<int> c = first_combination(lo, n);
  do {
    Configuration x{c};
    const int k = cluster_count(x);
    const int idx = static_cast<int>(configs_.size());
    if (use_words) {
      std::uint64_t w = 0;
      for (int s : c) w |= (std::uint64_t{1} << (s - lo));
      index_.emplace(w, idx);
      words_.push_back(w);
    }
    sector_.push_back(k);
    sector_members_[k - 1].push_back(idx);
    configs_.push_back(std::move(x));
  } while (next_combination(c, lo, hi));
}

ConfigSpace::ConfigSpace(int L, int n) : ConfigSpace(-L, L, n, 0) {
  if (L < 0) throw std::domain_error("ConfigSpace: L must be >= 0");
}

ConfigSpace ConfigSpace::interval(int lo, int hi, int n) { return ConfigSpace(lo, hi, n, 0); }

ConfigSpace enumerate_configs(int L, int n) { return ConfigSpace(L, n); }

std::uint64_t ConfigSpace::word_of(const Configuration& x) const {
  std::uint64_t w = 0;
  for (int s : x.sites) {
    if (s < lo_ || s > hi_) throw std::out_of_range("ConfigSpace: site outside interval");
    w |= (std::uint64_t{1} << (s - lo_));
  }
  return w;
}

bool ConfigSpace::valid(const Configuration& x) const {
  if (x.particles() != n_) return false;
  for (std::size_t i = 0; i < x.sites.size(); ++i) {
    if (x.sites[i] < lo_ || x.sites[i] > hi_) return false;
    if (i && x.sites[i] <= x.sites[i - 1]) return false;
  }
  return true;
}

int ConfigSpace::index_of(const Configuration& x) const {
  if (x.particles() != n_)
    throw std::out_of_range("ConfigSpace: wrong particle number");
  if (has_words()) {
    auto it = index_.find(word_of(x));
    if (it == index_.end()) throw std::out_of_range("ConfigSpace: configuration not in space");
    return it->second;
  }
  if (!valid(x)) throw std::out_of_range("ConfigSpace: configuration not in space");
  auto it = std::lower_bound(configs_.begin(), configs_.end(), x,
                             [](const Configuration& a, const Configuration& b) {
                               return a.sites < b.sites;
                             });
  return static_cast<int>(it - configs_.begin());
}

bool ConfigSpace::occupied(int i, int site) const {
  if (site < lo_ || site > hi_) return false;
  if (has_words()) return words_[i] & (std::uint64_t{1} << (site - lo_));
  return configs_[i].contains(site);
}

int ConfigSpace::hop_index(int i, int from, int to) const {
  if (to < lo_ || to > hi_ || occupied(i, to) || !occupied(i, from)) return -1;
  if (has_words()) {
    const std::uint64_t nw = (words_[i] ^ (std::uint64_t{1} << (from - lo_))) |
                             (std::uint64_t{1} << (to - lo_));
    return index_.at(nw);
  }
  Configuration y = configs_[i];
  *std::find(y.sites.begin(), y.sites.end(), from) = to;
  std::sort(y.sites.begin(), y.sites.end());
  return index_of(y);
}

const std::vector<int>& ConfigSpace::sector_members(int k) const {
  if (k < 1 || k > max_clusters_) {
    static const std::vector<int> empty;
    if (k >= 1 && k <= n_) return empty;  // legal k that happens not to occur
    throw std::out_of_range("ConfigSpace: sector index out of range");
  }
  return sector_members_[k - 1];
}

int dbar(const Configuration& x, const Configuration& y, const ConfigSpace& space) {
  if (x.particles() != y.particles())
    throw std::domain_error("dbar: mismatched particle numbers");
  const auto& cl = space.clustered();
  int best = -1;
  for (int wi : cl) {
    const Configuration& w = space.config(wi);
    const int dxw = l1_distance(x, w);
    for (int vi : cl) {
      const Configuration& v = space.config(vi);
      const int t = dxw + std::abs(w.sites[0] - v.sites[0]) + l1_distance(v, y);
      if (best < 0 || t < best) best = t;
    }
  }
  return best;
}

int dist_D(const Configuration& x, const Configuration& y, const ConfigSpace& space) {
  return std::min(l1_distance(x, y), dbar(x, y, space));
}

EnvelopeCase envelope_case(const Configuration& x, const Configuration& y) {
  const bool cx = cluster_count(x) == 1, cy = cluster_count(y) == 1;
  if (cx && cy) return EnvelopeCase::BothClustered;
  if (cx || cy) return EnvelopeCase::OneClustered;
  return EnvelopeCase::NoneClustered;
}

double envelope_F(const Configuration& x, const Configuration& y,
                  const DecayEnvelope& env, const ConfigSpace& space) {
  if (env.mu <= 0) throw std::domain_error("envelope_F: mu must be > 0");
  const double mu = env.mu;
  const bool cx = cluster_count(x) == 1, cy = cluster_count(y) == 1;
  if (cx && cy) return std::exp(-mu * std::abs(x.sites[0] - y.sites[0]));

  const auto& cl = space.clustered();
  if (cx != cy) {
    // one clustered: sum over clustered w against the non-clustered one
    const Configuration& a = cx ? y : x;  // not clustered
    const Configuration& b = cx ? x : y;  // clustered
    double sum = 0;
    for (int wi : cl) {
      const Configuration& w = space.config(wi);
      sum += std::exp(-mu * (l1_distance(a, w) + std::abs(w.sites[0] - b.sites[0])));
    }
    return sum;
  }
  double sum = 0;
  for (int wi : cl) {
    const Configuration& w = space.config(wi);
    const double dxw = l1_distance(x, w);
    for (int vi : cl) {
      const Configuration& v = space.config(vi);
      sum += std::exp(-mu * (dxw + l1_distance(v, y) + std::abs(w.sites[0] - v.sites[0])));
    }
  }
  return sum;
}

double c_infinity(double mu, int K) {
  if (mu <= 0) throw std::domain_error("c_infinity: mu must be > 0");
  if (K < 1) throw std::domain_error("c_infinity: K must be >= 1");
  const double q = std::exp(-mu);
  double log_v = -std::log1p(-q);
  for (int k = 1; k <= K; ++k) log_v -= 2.0 * std::log1p(-std::exp(-k * mu));
  return std::exp(log_v);
}

namespace {

// shells of non-decreasing n-tuples y with sum |y_i| == d; the tail over
// d > R is bounded by term(R+1)/(1-rho) with shell(d) <= (d+1)^(2n-1) and
// rho = e^-mu (1 + 1/(R+2))^(2n-1) once rho < 1.
double b2_tail_bound(int n, double mu, int R) {
  const double p = 2.0 * n - 1.0;
  const double rho = std::exp(-mu) * std::pow(1.0 + 1.0 / (R + 2.0), p);
  if (rho >= 1.0) return std::numeric_limits<double>::infinity();
  const double first = std::pow(R + 2.0, p) * std::exp(-mu * (R + 1.0));
  return first / (1.0 - rho);
}

double b2_sum_recursive(int slot, int n, int prev, int budget, double mu) {
  if (slot == n) return 1.0;
  double acc = 0;
  for (int y = prev; y <= budget; ++y) {
    const int cost = std::abs(y);
    int rem = budget;
    if (y >= 0) {
      // remaining slots are >= y >= 0, each costs at least y
      if (cost > budget) break;
      rem = budget - cost;
    } else {
      if (cost > budget) continue;
      rem = budget - cost;
    }
    acc += std::exp(-mu * cost) * b2_sum_recursive(slot + 1, n, y, rem, mu);
  }
  return acc;
}

}  // namespace

BruteSumB2 brute_sum_B2(int n, double mu, int radius) {
  if (n < 1) throw std::domain_error("brute_sum_B2: n must be >= 1");
  if (mu <= 0) throw std::domain_error("brute_sum_B2: mu must be > 0");
  int R = radius;
  if (R <= 0) {
    R = static_cast<int>(std::ceil(4.0 * n / mu));
    while (b2_tail_bound(n, mu, R) > 1e-10) ++R;
  }
  // substitute y_k = v_k - k: v strictly increasing <=> y non-decreasing,
  // and d(droplet, v) = sum |y_k|
  double value = b2_sum_recursive(0, n, -R, R, mu);
  return {value, R, b2_tail_bound(n, mu, R)};
}

int interval_distance(SiteInterval U, SiteInterval V) {
  if (U.a > V.b) return U.a - V.b;
  if (V.a > U.b) return V.a - U.b;
  return 0;
}

bool meets(const Configuration& x, SiteInterval U) {
  for (int s : x.sites)
    if (U.contains(s)) return true;
  return false;
}

WindowSumReport sum_F_over_windows(SiteInterval U, SiteInterval V, double mu,
                                   const ConfigSpace& space) {
  if (mu <= 0) throw std::domain_error("sum_F_over_windows: mu must be > 0");
  if (U.a > U.b || V.a > V.b)
    throw std::domain_error("sum_F_over_windows: malformed window");
  if (U.a < space.lo() || U.b > space.hi() || V.a < space.lo() || V.b > space.hi())
    throw std::domain_error("sum_F_over_windows: window outside the lattice");
  if (interval_distance(U, V) == 0)
    throw std::domain_error("sum_F_over_windows: windows must be disjoint");

  const int n = space.particles();
  const DecayEnvelope env{mu};

  std::vector<int> xs, ys;
  for (int i = 0; i < space.size(); ++i) {
    if (meets(space.config(i), U)) xs.push_back(i);
    if (meets(space.config(i), V)) ys.push_back(i);
  }
  double sum = 0;
  for (int xi : xs)
    for (int yi : ys)
      sum += envelope_F(space.config(xi), space.config(yi), env, space);

  // Constant assembled from the per-case bounds in the summability proof:
  //   clustered/clustered : e^-mu/(1-e^-mu)^2 + (n-1) coth(mu/2)
  //   mixed (x2)          : ((n-2)+coth(mu/4)) coth(mu/4) C_inf(mu/2)
  //   neither clustered   : ((n-2)+coth(mu/4)) coth(mu/4) C_inf(mu/2)^2
  // Writing the total as a + b n, any C_mu >= max{b, (a+2b)/3} gives
  // total <= C_mu (n+1) for all n >= 2.
  const double e = std::exp(-mu);
  const double coth2 = 1.0 / std::tanh(mu / 2.0);
  const double coth4 = 1.0 / std::tanh(mu / 4.0);
  const int K = std::max(200, static_cast<int>(std::ceil(30.0 / (mu / 2.0))));
  const double ci = c_infinity(mu / 2.0, K);
  const double mixed = coth4 * ci * (2.0 + ci);
  const double b = coth2 + mixed;
  const double a = e / ((1.0 - e) * (1.0 - e)) - coth2 + (coth4 - 2.0) * mixed;
  const double c_mu = std::max(b, (a + 2.0 * b) / 3.0);
  return {sum, c_mu, c_mu * (n + 1)};
}

}  // namespace hcl
