#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "mactl/types.hpp"

namespace mactl {

enum class DisturbanceProfile { gaussian, random_walk, sinusoidal, zero, custom };

DisturbanceProfile parse_profile(std::string_view name);
std::string_view profile_name(DisturbanceProfile p);

/// Oblivious disturbance trace. w[t] perturbs the transition out of x_t;
/// e[i][t] (optional, per agent) perturbs agent i's observation at time t.
struct DisturbanceTrace {
  Trajectoryd w;
  std::vector<Trajectoryd> e;
  std::uint64_t seed = 0;
  DisturbanceProfile profile = DisturbanceProfile::zero;

  std::size_t horizon() const { return w.size(); }
  double max_norm() const;
};

/// Phase offsets of the sinusoidal profile (cycled for d_x != 5).
inline constexpr double kSinusoidPhases[] = {12.0, 21.0, 3.0, 42.0, 1.0};

/// Standard normal variates from a 64-bit Mersenne Twister via the Box-Muller
/// transform. Both halves of each transform are used. The sequence depends only
/// on the seed, unlike std::normal_distribution whose algorithm is
/// implementation defined.
class GaussianSource {
public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double operator()();
  double uniform();  // in (0, 1)

private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Full trace of length T for the given profile; a pure function of
/// (profile, seed, T, d_x).
DisturbanceTrace generate_disturbances(DisturbanceProfile profile, std::uint64_t seed, std::size_t T,
                                       Index dx);

/// Observation noise for agents with d_{y_i}-dimensional observations, same
/// profile semantics, drawn from an independent stream derived from the seed.
std::vector<Trajectoryd> generate_observation_noise(DisturbanceProfile profile, std::uint64_t seed,
                                                    std::size_t T, const std::vector<Index>& dims,
                                                    double scale = 1.0);

}  // namespace mactl
