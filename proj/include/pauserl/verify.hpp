#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pauserl {

// One measured quantity against its bound. ok iff measured <= bound + slack.
struct CheckRecord {
  std::string check;
  std::size_t instance;
  std::uint64_t seed;  // instance seed; rebuilds the instance on its own
  double measured;
  double bound;
  double margin;  // bound + slack - measured
  bool ok;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t gap_instances = 200;
  std::size_t forecast_instances = 100;
  std::size_t regret_instances = 20;
  bool run_gap = true;
  bool run_forecast = true;
  bool run_regret = true;
  double slack = 1e-9;
  double weight_cap = 10.0;  // forecast instances with ||w||_2 above this are redrawn
  // Test hook: every bound is multiplied by this before comparison.
  double bound_scale = 1.0;
  unsigned workers = 1;

  void validate() const;
};

// Random MDP pairs (|S| <= 4, |A| <= 3, H <= 4, gamma in {0.5, 0.9}): optimal Q
// gap per step, optimal V gap and same-policy V gap against their budget bounds.
std::vector<CheckRecord> gap_suite(const VerifyOptions& opt);

// Oracle-mode forecasts of Q*_{t_{m+1}} against the forecast error bound with
// L = ||w||_2 of the fit, exact u_t and zero estimation error.
std::vector<CheckRecord> forecast_suite(const VerifyOptions& opt);

// Oracle-mode run_forl on drift MDPs against the total regret bound.
std::vector<CheckRecord> regret_suite(const VerifyOptions& opt);

std::vector<CheckRecord> run_verification(const VerifyOptions& opt);

void write_verify_csv(std::ostream& out, const std::vector<CheckRecord>& records,
                      std::uint64_t seed, const std::string& config_hash);

}  // namespace pauserl
