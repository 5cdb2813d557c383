#include "mactl/disturbance.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mactl {

DisturbanceProfile parse_profile(std::string_view name) {
  if (name == "gaussian") return DisturbanceProfile::gaussian;
  if (name == "random_walk") return DisturbanceProfile::random_walk;
  if (name == "sinusoidal") return DisturbanceProfile::sinusoidal;
  if (name == "zero") return DisturbanceProfile::zero;
  if (name == "custom") return DisturbanceProfile::custom;
  throw InvalidInput("unknown disturbance profile '" + std::string(name) + "'");
}

std::string_view profile_name(DisturbanceProfile p) {
  switch (p) {
    case DisturbanceProfile::gaussian: return "gaussian";
    case DisturbanceProfile::random_walk: return "random_walk";
    case DisturbanceProfile::sinusoidal: return "sinusoidal";
    case DisturbanceProfile::zero: return "zero";
    case DisturbanceProfile::custom: return "custom";
  }
  return "unknown";
}

double DisturbanceTrace::max_norm() const {
  double m = 0.0;
  for (const auto& wt : w) m = std::max(m, wt.norm());
  return m;
}

double GaussianSource::uniform() {
  // 53 random bits mapped to the open interval (0, 1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianSource::operator()() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

namespace {

Trajectoryd profile_samples(DisturbanceProfile profile, GaussianSource& rng, std::size_t T, Index dim) {
  Trajectoryd w(T, VectorXd::Zero(dim));
  switch (profile) {
    case DisturbanceProfile::zero:
      break;
    case DisturbanceProfile::gaussian:
      for (auto& wt : w)
        for (Index i = 0; i < dim; ++i) wt(i) = rng();
      break;
    case DisturbanceProfile::random_walk: {
      VectorXd prev = VectorXd::Zero(dim);
      for (auto& wt : w) {
        for (Index i = 0; i < dim; ++i) wt(i) = prev(i) + rng();
        prev = wt;
      }
      break;
    }
    case DisturbanceProfile::sinusoidal: {
      constexpr std::size_t nphases = std::size(kSinusoidPhases);
      for (std::size_t t = 0; t < T; ++t)
        for (Index i = 0; i < dim; ++i)
          w[t](i) = std::sin(2.0 * static_cast<double>(t) + kSinusoidPhases[static_cast<std::size_t>(i) % nphases]);
      break;
    }
    case DisturbanceProfile::custom:
      throw InvalidInput("generate_disturbances: the custom profile has no generator; build the trace directly");
  }
  return w;
}

}  // namespace

DisturbanceTrace generate_disturbances(DisturbanceProfile profile, std::uint64_t seed, std::size_t T,
                                       Index dx) {
  require(T >= 1, "generate_disturbances: T must be at least 1");
  require(dx >= 1, "generate_disturbances: state dimension must be positive");
  GaussianSource rng(seed);
  DisturbanceTrace trace;
  trace.w = profile_samples(profile, rng, T, dx);
  trace.seed = seed;
  trace.profile = profile;
  return trace;
}

std::vector<Trajectoryd> generate_observation_noise(DisturbanceProfile profile, std::uint64_t seed,
                                                    std::size_t T, const std::vector<Index>& dims,
                                                    double scale) {
  std::vector<Trajectoryd> e;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    // splitmix-style decorrelation of the per-agent streams
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (i + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    GaussianSource rng(z ^ (z >> 31));
    auto samples = profile_samples(profile, rng, T + 1, dims[i]);
    for (auto& s : samples) s *= scale;
    e.push_back(std::move(samples));
  }
  return e;
}

}  // namespace mactl
