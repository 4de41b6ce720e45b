#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "projgeo/campaign.hpp"
#include "projgeo/geodesic.hpp"
#include "projgeo/matrix_json.hpp"
#include "projgeo/szego.hpp"

namespace {

enum Exit : int {
  kOk = 0,
  kVerifyFailed = 1,
  kIo = 2,
  kUsage = 64,
  kDataErr = 65,
};

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  try {
    projgeo::write_file_atomic(path, text);
  } catch (const std::exception& e) {
    throw IoFailure(e.what());
  }
}

int cmd_gen(long long r, long long k, double norm_b, std::uint64_t seed, const std::string& out) {
  if (r < 0 || k < 0 || r + k < 1 || !std::isfinite(norm_b) || norm_b < 0.0) {
    std::cerr << "gen: need r, k >= 0 with r + k >= 1 and norm-b >= 0\n";
    return kUsage;
  }
  const auto e = projgeo::random_idempotent(r, k, norm_b, seed);
  write_out(out, projgeo::matrix_to_json(e.matrix()).dump(2) + "\n");
  return kOk;
}

int cmd_analyze(const std::string& in, const std::string& out, double tol) {
  if (!(tol > 0.0)) {
    std::cerr << "analyze: tol must be positive\n";
    return kUsage;
  }
  std::string text;
  try {
    text = projgeo::read_file(in);
  } catch (const std::exception& e) {
    std::cerr << "analyze: " << e.what() << "\n";
    return kIo;
  }
  projgeo::ComplexMatrix a;
  try {
    a = projgeo::matrix_from_json(nlohmann::json::parse(text));
  } catch (const std::exception& e) {
    std::cerr << "analyze: malformed input: " << e.what() << "\n";
    return kDataErr;
  }
  const auto e = [&] {
    try {
      return std::optional(projgeo::Idempotent::validate(a));
    } catch (const projgeo::Error& err) {
      std::cerr << "analyze: " << err.what() << "\n";
      return std::optional<projgeo::Idempotent>();
    }
  }();
  if (!e) return kDataErr;
  const auto report = projgeo::coincidence_report(*e);
  write_out(out, projgeo::to_json(report).dump(2) + "\n");
  return report.max_residual() <= tol * static_cast<double>(report.n) ? kOk : kVerifyFailed;
}

int cmd_verify(projgeo::CampaignConfig config) {
  try {
    config.validate();
  } catch (const projgeo::Error& err) {
    std::cerr << "verify: " << err.what() << "\n";
    return kUsage;
  }
  const auto result = projgeo::run_campaign(config);
  if (!config.output_path.empty()) {
    write_out(config.output_path, projgeo::to_json(result).dump(2) + "\n");
  }
  std::cout << result.summary() << "\n";
  return result.ok() ? kOk : kVerifyFailed;
}

int cmd_szego(const std::vector<double>& a_values, const std::vector<long long>& n_values,
              const std::string& out) {
  for (double a : a_values) {
    if (!(std::abs(a) < 1.0)) {
      std::cerr << "szego: |a| must be below 1 (got " << a << ")\n";
      return kUsage;
    }
  }
  std::vector<Eigen::Index> ns;
  for (long long n : n_values) {
    if (n < 1) {
      std::cerr << "szego: N must be at least 1\n";
      return kUsage;
    }
    ns.push_back(static_cast<Eigen::Index>(n));
  }
  std::vector<projgeo::szego::SweepRow> rows;
  try {
    rows = projgeo::szego::run_sweep(a_values, ns);
  } catch (const projgeo::Error& err) {
    std::cerr << "szego: " << err.what() << "\n";
    return kVerifyFailed;
  }
  std::ostringstream csv;
  csv << projgeo::szego::csv_header() << "\n";
  for (const auto& row : rows) {
    csv << projgeo::szego::csv_row(row) << "\n";
    const auto& c = row.check;
    const double worst = std::max({c.abs_err_vs_a, c.abs_err_normB, c.abs_err_fiber});
    if (worst > 1e-2) {
      std::fprintf(stderr, "szego: warning: a=%g N=%lld error %.3e; the section is too coarse here\n",
                   row.a, static_cast<long long>(row.N), worst);
    }
  }
  write_out(out, csv.str());
  const bool ok = projgeo::szego::sweep_trends_ok(rows);
  if (!ok) std::cerr << "szego: an error column does not decrease along N\n";
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Idempotents, their matched projections and the geodesics between range projections"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Write a random idempotent as matrix JSON");
  long long r = 1;
  long long k = 1;
  double norm_b = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  gen->add_option("--r", r, "rank of E")->required();
  gen->add_option("--k", k, "dimension of the kernel")->required();
  gen->add_option("--norm-b", norm_b, "operator norm of the off-diagonal block")->required();
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out, "output file (stdout when omitted)");

  auto* analyze = app.add_subcommand("analyze", "Coincidence report for one idempotent");
  std::string in;
  std::string analyze_out;
  double analyze_tol = 1e-8;
  analyze->add_option("--in", in, "matrix JSON")->required();
  analyze->add_option("--out", analyze_out, "report file (stdout when omitted)");
  analyze->add_option("--tol", analyze_tol, "residual threshold per dimension");

  auto* verify = app.add_subcommand("verify", "Randomized verification campaign");
  projgeo::CampaignConfig config;
  std::vector<long long> dims;
  verify->add_option("--dims", dims, "dimensions")->delimiter(',');
  verify->add_option("--trials", config.trials_per_dim, "trials per dimension and norm target");
  verify->add_option("--norm-targets", config.norm_targets, "target values of ||B||")->delimiter(',');
  verify->add_option("--seed", config.seed, "master seed");
  verify->add_option("--tol", config.tol, "residual threshold per dimension");
  verify->add_option("--samples", config.minimality_samples, "random projections per instance");
  verify->add_option("--out", config.output_path, "JSON report file");

  auto* szego = app.add_subcommand("szego", "Finite-section sweep of the composition reflection");
  std::vector<double> a_values{0.3, 0.5, 0.7};
  std::vector<long long> n_values{16, 32, 64, 128};
  std::string csv_out;
  szego->add_option("--a", a_values, "values of a")->delimiter(',');
  szego->add_option("--n", n_values, "truncation sizes N")->delimiter(',');
  szego->add_option("--out", csv_out, "CSV file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen(r, k, norm_b, seed, out);
    if (*analyze) return cmd_analyze(in, analyze_out, analyze_tol);
    if (*verify) {
      if (!dims.empty()) config.dims.assign(dims.begin(), dims.end());
      return cmd_verify(config);
    }
    if (*szego) return cmd_szego(a_values, n_values, csv_out);
  } catch (const IoFailure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const projgeo::Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == projgeo::ErrorKind::Input ? kUsage : kVerifyFailed;
  }
  return kUsage;
}
