// Samplers for every (P_X, P_Y) pair of the simulation study: mean shift,
// contamination, correlated Gaussians, t-copula, the two blob mixtures and
// the level-check catalog.
#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "core/common.hpp"
#include "core/rng.hpp"

namespace rfts::scenarios {

enum class Family {
  MeanShift,
  Contamination,
  CorrelatedGaussian,
  TCopula,
  BlobCorrelation,
  BlobVariance,
  LevelCheck,
};

enum class LevelDist {
  RNorm,
  RBinom,
  RT,
  RPois,
  RF,
  RUnif,
  RMvt,
  RExp,
  RBeta,
  MvrNorm,
  RLnorm,
  RTCopula,
  RWeibull,
  RMixture,
  ContDist,
};

std::string family_name(Family f);
Family family_from_name(const std::string& name);
std::string level_dist_name(LevelDist d);
LevelDist level_dist_from_name(const std::string& name);
// all fifteen catalog entries, in catalog order
const std::vector<LevelDist>& level_dist_catalog();

// The meaning of `d` depends on the family: affected coordinate count for
// MeanShift/Contamination/TCopula, number of correlated off-diagonal slots
// for CorrelatedGaussian, and the blob base-vector length (centers drawn
// from the first d entries of (1,2,3)) for BlobCorrelation.
//
// `knob` is the family parameter: delta, lambda, rho, nu, 0/1 for the
// BlobCorrelation alternative, or the middle-component sd for BlobVariance.
struct ScenarioSpec {
  Family family = Family::LevelCheck;
  int p = 1;
  int d = 1;
  double knob = 0.0;
  LevelDist level_dist = LevelDist::RNorm;
  int n_per_class = 100;
  std::uint64_t sigma_seed = 0;  // BlobCorrelation: shared correlation draw

  void validate() const;
  bool is_null_case() const;

  nlohmann::json to_json() const;
  static ScenarioSpec from_json(const nlohmann::json& j);
};

struct SamplePair {
  Matrix x;
  Matrix y;
};

SamplePair sample(const ScenarioSpec& spec, numkit::RngStream& rng);

SamplePair sample_mean_shift(const ScenarioSpec& spec, numkit::RngStream& rng);
SamplePair sample_contamination(const ScenarioSpec& spec, numkit::RngStream& rng);
SamplePair sample_correlated_gaussian(const ScenarioSpec& spec, numkit::RngStream& rng);
SamplePair sample_t_copula(const ScenarioSpec& spec, numkit::RngStream& rng);
SamplePair sample_blob_correlation(const ScenarioSpec& spec, numkit::RngStream& rng);
SamplePair sample_blob_variance(const ScenarioSpec& spec, numkit::RngStream& rng);
SamplePair sample_level_check(const ScenarioSpec& spec, numkit::RngStream& rng);

// Random correlation matrix with unit diagonal whose eigenvalue ratio
// lambda_min / lambda_max is at most ratio_bound; bounded retries.
Matrix random_correlation(int p, double ratio_bound, numkit::RngStream& rng);

}  // namespace rfts::scenarios
