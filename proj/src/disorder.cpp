#include "hcl/disorder.hpp"

#include <stdexcept>

#include "hcl/rng.hpp"

namespace hcl {

const std::map<std::string, DisorderLaw>& distribution_registry() {
  static const std::map<std::string, DisorderLaw> registry = {
      {"uniform",
       [](std::uint64_t seed, std::uint64_t counter, double omega_max) {
         return to_unit_interval(stream_value(seed, counter)) * omega_max;
       }},
  };
  return registry;
}

DisorderRealization sample_disorder_interval(int lo, int hi, const std::string& distribution_id,
                                             std::uint64_t seed, double omega_max) {
  if (hi < lo) throw std::domain_error("sample_disorder: empty interval");
  if (!(omega_max > 0)) throw std::domain_error("sample_disorder: omega_max must be > 0");
  const auto& reg = distribution_registry();
  auto it = reg.find(distribution_id);
  if (it == reg.end())
    throw std::domain_error("sample_disorder: unknown distribution '" + distribution_id + "'");
  DisorderRealization w;
  w.lo = lo;
  w.hi = hi;
  w.seed = seed;
  w.distribution_id = distribution_id;
  w.omega_max = omega_max;
  w.omega.resize(hi - lo + 1);
  for (int i = 0; i <= hi - lo; ++i)
    w.omega[i] = it->second(seed, static_cast<std::uint64_t>(i), omega_max);
  return w;
}

DisorderRealization sample_disorder(int L, const std::string& distribution_id,
                                    std::uint64_t seed, double omega_max) {
  return sample_disorder_interval(-L, L, distribution_id, seed, omega_max);
}

}  // namespace hcl
