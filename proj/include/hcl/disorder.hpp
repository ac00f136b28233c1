#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "hcl/operators.hpp"

namespace hcl {

// Registered site-field laws.  Each sampler maps (seed, site counter) to a
// value in [0, omega_max]; "uniform" is the default (density 1/omega_max on
// the support, so assumptions A1-A2 hold).
using DisorderLaw = std::function<double(std::uint64_t seed, std::uint64_t counter, double omega_max)>;

const std::map<std::string, DisorderLaw>& distribution_registry();

DisorderRealization sample_disorder_interval(int lo, int hi, const std::string& distribution_id,
                                             std::uint64_t seed, double omega_max = 1.0);

// Field over Lambda = [-L, L].
DisorderRealization sample_disorder(int L, const std::string& distribution_id,
                                    std::uint64_t seed, double omega_max = 1.0);

}  // namespace hcl
