#pragma once

// Randomized verification campaigns: every (dim, norm target, trial) triple
// gets its own idempotent, drawn from a seed derived from the master seed and
// the triple's index, so results do not depend on thread scheduling.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "projgeo/geodesic.hpp"

namespace projgeo {

struct CampaignConfig {
  std::vector<Eigen::Index> dims{2, 4, 8, 16, 32, 64};
  Eigen::Index trials_per_dim = 200;
  std::vector<double> norm_targets{0.1, 1.0, 5.0, 10.0};
  std::uint64_t seed = 0;
  /// Residual thresholds are tol * n.
  double tol = 1e-8;
  /// Random projections compared against m(E) per instance.
  Eigen::Index minimality_samples = 100;
  std::string output_path;

  /// Throws ErrorKind::Input when dims is empty, trials < 1 or tol <= 0.
  void validate() const;
};

struct InstanceSpec {
  std::size_t index = 0;
  Eigen::Index n = 0;
  Eigen::Index r = 0;
  double norm_target = 0.0;
  std::uint64_t seed = 0;
};

struct InstanceResult {
  InstanceSpec spec;
  AnalysisReport report;
  double coincidence = 0.0;       // max of the four midpoint residuals
  double spectrum = 0.0;          // sup distance to the predicted spectrum
  double norm_theorem = 0.0;      // | ||P-Q|| - ||B||/sqrt(1+||B||^2) |
  double matched_distance = 0.0;  // | ||E-m|| - formula |
  double minimality = 0.0;        // largest violation, clamped at 0
  double naturality = 0.0;
  bool passed = false;
  std::string error;              // set when the instance threw
};

struct CampaignResult {
  std::vector<InstanceResult> instances;
  std::size_t passed = 0;
  double max_residual = 0.0;

  bool ok() const { return passed == instances.size(); }
  std::string summary() const;
};

/// SplitMix64 step; used to derive per-instance seeds.
std::uint64_t splitmix64(std::uint64_t x);

std::vector<InstanceSpec> campaign_instances(const CampaignConfig& config);
InstanceResult run_instance(const InstanceSpec& spec, const CampaignConfig& config);
/// Runs all instances on up to `threads` workers (0 = from PROJGEO_THREADS or
/// the hardware).
CampaignResult run_campaign(const CampaignConfig& config, unsigned threads = 0);

unsigned thread_budget();

nlohmann::json to_json(const CampaignResult& result);

}  // namespace projgeo
