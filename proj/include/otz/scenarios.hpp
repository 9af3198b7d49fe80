#pragma once

#include <cstdint>

#include "otz/instance.hpp"

namespace otz {

// Deterministic uniform draws decoupled from std::uniform_real_distribution
// (whose stream is implementation-defined). Values are strictly inside (0,1):
// ((x >> 11) + 0.5) * 2^-53 from a seeded mt19937_64.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed);
  ~UniformStream();
  UniformStream(const UniformStream&) = delete;
  UniformStream& operator=(const UniformStream&) = delete;
  double next();            // (0,1)
  std::uint64_t next_raw();

 private:
  struct Impl;
  Impl* impl_;
};

// Fleet charging assignment scenario: m vehicles, n providers, uniform
// marginals and costs, all-ones ideal plan. Vehicles at odd 0-based rows
// (the 2nd, 4th, ... vehicles) cannot use providers at odd 0-based columns,
// so |pattern| = floor(m/2)*floor(n/2) (= mn/4 for even m, n).
// Draw order with one stream per seed: u_tilde, v_tilde, then costs row-major
// over all m*n pairs (draws on forbidden pairs are discarded). Same seed,
// same instance, bit for bit.
struct EvScenarioConfig {
  int m = 10000, n = 10;
  std::uint64_t seed = 1;
  double gamma0 = 1.99;
  double gamma = 1.005;
};
ProblemInstance generate_ev_instance(const EvScenarioConfig& cfg);

// Random valid instance: uniform marginals and costs drawn as above, then
// floor(zero_density*m*n) forbidden pairs sampled uniformly without
// replacement. Patterns leaving a row or column without support are redrawn,
// up to 1000 attempts (PatternSamplingFailed after that).
struct RandomInstanceConfig {
  int m = 0, n = 0;
  double zero_density = 0.0;
  std::uint64_t seed = 1;
  double gamma0 = 1.0;
  double gamma = 1.0;
};
ProblemInstance generate_random_instance(const RandomInstanceConfig& cfg);

}  // namespace otz
