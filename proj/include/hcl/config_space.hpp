#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

// Hard-core configuration spaces on an integer interval, their cluster-sector
// partition, and the distance functions d, dbar, D together with the
// summability constants they feed into.

namespace hcl {

// A hard-core configuration: strictly increasing occupied sites.
struct Configuration {
  std::vector<int> sites;

  int particles() const { return static_cast<int>(sites.size()); }
  bool contains(int site) const;
  bool operator==(const Configuration&) const = default;
};

std::string to_string(const Configuration& x);

// Number of maximal blocks of consecutive occupied sites.
int cluster_count(const Configuration& x);

// l1 distance under the canonical increasing labeling; throws on mismatched
// particle numbers.
int l1_distance(const Configuration& x, const Configuration& y);

class ConfigSpace {
 public:
  // Lambda = [-L, L]
  ConfigSpace(int L, int n);
  // general integer interval [lo, hi]
  static ConfigSpace interval(int lo, int hi, int n);

  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int num_sites() const { return hi_ - lo_ + 1; }
  int particles() const { return n_; }
  int size() const { return static_cast<int>(configs_.size()); }

  const Configuration& config(int i) const { return configs_[i]; }
  const std::vector<Configuration>& configs() const { return configs_; }

  // Ordinal of a configuration; throws std::out_of_range if absent.
  int index_of(const Configuration& x) const;
  bool valid(const Configuration& x) const;

  // Cluster count of configuration i.
  int sector_of(int i) const { return sector_[i]; }
  // Largest cluster count that occurs in this space: min(n, |Lambda|-n+1).
  int max_clusters() const { return max_clusters_; }
  // Ordinals with exactly k clusters, ascending.
  const std::vector<int>& sector_members(int k) const;
  // The clustered set C (k = 1).
  const std::vector<int>& clustered() const { return sector_members(1); }
  bool is_clustered(int i) const { return sector_[i] == 1; }

  // the occupancy word drives O(1) lookups for lattices of at most 64 sites;
  // wider lattices fall back to binary search on the lexicographic order
  bool has_words() const { return !words_.empty(); }
  std::uint64_t word(int i) const { return words_[i]; }
  std::uint64_t word_of(const Configuration& x) const;

  bool occupied(int i, int site) const;
  // ordinal reached from configuration i by moving a particle from site
  // `from` to the adjacent empty site `to`; -1 if the move is invalid
  int hop_index(int i, int from, int to) const;

 private:
  ConfigSpace(int lo, int hi, int n, int);
  int lo_, hi_, n_;
  int max_clusters_;
  std::vector<Configuration> configs_;
  std::vector<std::uint64_t> words_;
  std::vector<int> sector_;
  std::vector<std::vector<int>> sector_members_;
  std::unordered_map<std::uint64_t, int> index_;
};

ConfigSpace enumerate_configs(int L, int n);

// dbar(x,y) = min over clustered w,v of d(x,w) + |w_1 - v_1| + d(v,y).
// Not a metric (not definite, no triangle inequality in general).
int dbar(const Configuration& x, const Configuration& y, const ConfigSpace& space);

// D(x,y) = min{ d(x,y), dbar(x,y) }; a metric.
int dist_D(const Configuration& x, const Configuration& y, const ConfigSpace& space);

enum class EnvelopeCase { BothClustered, OneClustered, NoneClustered };

struct DecayEnvelope {
  double mu;  // > 0
};

EnvelopeCase envelope_case(const Configuration& x, const Configuration& y);

// The three-case decay envelope F_mu(x,y); sums run over the clustered set of
// the space.  Symmetric in (x, y).
double envelope_F(const Configuration& x, const Configuration& y,
                  const DecayEnvelope& env, const ConfigSpace& space);

// C_inf(mu) = (1-e^-mu)^-1 * prod_{k>=1} (1-e^-k mu)^-2, truncated at K.
// Dropped factors satisfy log(tail) <= 2 e^{-(K+1)mu} / ((1-e^-mu)(1-e^-(K+1)mu)),
// so the default K = 200 keeps the absolute error below 1e-12 for mu >= 0.2
// and double round-off dominates.  For smaller mu pass K >= 30/mu.
double c_infinity(double mu, int K = 200);

// Truncated evaluation of sup_x sum_v e^{-mu d(x,v)} over the infinite
// lattice, with x the canonical droplet {1..n} (the sup is attained there by
// translation invariance).  Sums all v with d(x,v) <= radius.
struct BruteSumB2 {
  double value;
  int radius;       // truncation radius actually used
  double tail_bound;  // analytic bound on the discarded part
};
BruteSumB2 brute_sum_B2(int n, double mu, int radius = 0);  // radius 0 = auto

// Connected window of sites [a, b].
struct SiteInterval {
  int a, b;
  bool contains(int s) const { return a <= s && s <= b; }
  int length() const { return b - a + 1; }
};

int interval_distance(SiteInterval U, SiteInterval V);
bool meets(const Configuration& x, SiteInterval U);

// Sum of F_mu(x,y) over x meeting U and y meeting V (disjoint connected
// windows), together with the constant C_mu for which the sum is provably
// <= C_mu * (n+1).
struct WindowSumReport {
  double sum;
  double c_mu;
  double bound;  // c_mu * (n+1)
};
WindowSumReport sum_F_over_windows(SiteInterval U, SiteInterval V, double mu,
                                   const ConfigSpace& space);

}  // namespace hcl
