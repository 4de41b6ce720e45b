#include "projgeo/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace projgeo {

void CampaignConfig::validate() const {
  if (dims.empty()) throw Error(ErrorKind::Input, "dims must not be empty");
  for (auto n : dims) {
    if (n < 2) throw Error(ErrorKind::Input, "every dimension must be at least 2");
  }
  if (trials_per_dim < 1) throw Error(ErrorKind::Input, "trials must be at least 1");
  if (norm_targets.empty()) throw Error(ErrorKind::Input, "norm targets must not be empty");
  for (double t : norm_targets) {
    if (!(t >= 0.0)) throw Error(ErrorKind::Input, "norm targets must be non-negative");
  }
  if (!(tol > 0.0)) throw Error(ErrorKind::Input, "tol must be positive");
  if (minimality_samples < 0) throw Error(ErrorKind::Input, "samples must be non-negative");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::vector<InstanceSpec> campaign_instances(const CampaignConfig& config) {
  config.validate();
  std::vector<InstanceSpec> out;
  std::size_t index = 0;
  for (Eigen::Index n : config.dims) {
    for (double target : config.norm_targets) {
      for (Eigen::Index trial = 0; trial < config.trials_per_dim; ++trial, ++index) {
        InstanceSpec spec;
        spec.index = index;
        spec.n = n;
        spec.norm_target = target;
        spec.seed = splitmix64(config.seed ^ splitmix64(index));
        spec.r = 1 + static_cast<Eigen::Index>(splitmix64(spec.seed) % static_cast<std::uint64_t>(n - 1));
        out.push_back(spec);
      }
    }
  }
  return out;
}

InstanceResult run_instance(const InstanceSpec& spec, const CampaignConfig& config) {
  InstanceResult out;
  out.spec = spec;
  const double threshold = config.tol * static_cast<double>(spec.n);
  try {
    const Idempotent e = random_idempotent(spec.r, spec.n - spec.r, spec.norm_target, spec.seed);
    const CoincidenceAnalysis analysis = coincidence_analysis(e);
    out.report = analysis.report;
    out.report.seed = spec.seed;
    out.report.norm_target = spec.norm_target;
    out.coincidence = analysis.residuals.max();

    const BlockForm bf = block_form(e);
    const RealVector predicted = predicted_difference_spectrum(bf);
    out.spectrum = (out.report.spectrum - predicted).cwiseAbs().maxCoeff();
    const double nb = bf.norm_b();
    out.norm_theorem = std::abs(out.report.norm_diff - nb / std::sqrt(1.0 + nb * nb));

    const double norm_e = operator_norm(e.matrix());
    out.matched_distance = std::abs(out.report.norm_E_minus_mE - matched_distance_formula(norm_e));

    const ComplexMatrix m = matched_projection(e).m.matrix();
    const ComplexMatrix one_minus_m = identity(spec.n) - m;
    const double lower = out.report.norm_E_minus_mE;
    const double upper = operator_norm(one_minus_m - e.matrix());
    for (Eigen::Index s = 0; s < config.minimality_samples; ++s) {
      const OrthogonalProjection p =
          random_projection(spec.n, splitmix64(spec.seed + 1 + static_cast<std::uint64_t>(s)));
      const double dist = operator_norm(p.matrix() - e.matrix());
      out.minimality = std::max({out.minimality, lower - dist, dist - upper});
    }

    out.naturality = naturality_check(e, splitmix64(~spec.seed)).max();

    const double worst = std::max({out.coincidence, out.spectrum, out.norm_theorem,
                                   out.matched_distance, out.minimality, out.naturality});
    out.passed = worst <= threshold;
  } catch (const Error& err) {
    out.error = err.what();
    out.passed = false;
  }
  return out;
}

unsigned thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PROJGEO_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) hw = std::min(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

CampaignResult run_campaign(const CampaignConfig& config, unsigned threads) {
  const std::vector<InstanceSpec> specs = campaign_instances(config);
  CampaignResult result;
  result.instances.resize(specs.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads == 0 ? thread_budget() : threads,
                                      static_cast<unsigned>(specs.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      result.instances[i] = run_instance(specs[i], config);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& inst : result.instances) {
    if (inst.passed) ++result.passed;
    result.max_residual =
        std::max({result.max_residual, inst.coincidence, inst.spectrum, inst.norm_theorem,
                  inst.matched_distance, inst.minimality, inst.naturality});
  }
  return result;
}

std::string CampaignResult::summary() const {
  std::ostringstream os;
  os << (ok() ? "PASS " : "FAIL ") << passed << "/" << instances.size();
  if (!ok()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), " (max residual %.3e)", max_residual);
    os << buf;
  }
  return os.str();
}

nlohmann::json to_json(const CampaignResult& result) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& inst : result.instances) {
    if (!inst.error.empty()) {
      out.push_back({{"n", inst.spec.n},
                     {"seed", inst.spec.seed},
                     {"norm_target", inst.spec.norm_target},
                     {"error", inst.error}});
      continue;
    }
    out.push_back(to_json(inst.report));
  }
  return out;
}

}  // namespace projgeo
