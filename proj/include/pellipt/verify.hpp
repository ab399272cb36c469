// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// Invariant suites. Each check is a named property evaluated on a seeded
// battery; the same checks run at desk scale under `pellipt verify` and at
// full scale in the acceptance runner.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "pellipt/complex_matrix.hpp"

namespace pellipt {

enum class CheckStatus { pass, trend, fail };
const char* status_name(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::string detail;
  nlohmann::json metrics = nlohmann::json::object();

  bool failed() const noexcept { return status == CheckStatus::fail; }
};

/// Seams for mutation testing.
struct VerifyHooks {
  std::function<double(const ComplexMatrix&, const Exponent&)> delta_p;

  double delta(const ComplexMatrix& a, const Exponent& p) const;
};

/// A + (c - lambda_min(Herm A)) I for Gaussian A, so that lambda = c with c
/// drawn from [0.05, 1.5]. Real entries when `real` is set.
ComplexMatrix random_accretive_matrix(std::mt19937_64& rng, int d, bool real);

struct Battery {
  std::vector<ComplexMatrix> matrices;
  std::vector<char> real;
};

/// Dimensions cycle through 1, 2, 3; every third matrix is real.
Battery make_battery(int count, std::uint64_t seed);

inline const std::vector<double> kBatteryExponents = {2.0, 3.0, 4.0, 8.0};

// ellipt-core and oracle
CheckResult check_oracle_equivalence(const Battery& b, const std::vector<double>& ps,
                                     const VerifyHooks& hooks, int samples = 100000);
CheckResult check_appendix_equivalence(const Battery& b, const std::vector<double>& ps,
                                       const VerifyHooks& hooks);
CheckResult check_duality(const Battery& b, const std::vector<double>& ps, const VerifyHooks& hooks);
CheckResult check_explicit_bounds(const Battery& b, const std::vector<double>& ps,
                               const VerifyHooks& hooks);
CheckResult check_closed_forms(const VerifyHooks& hooks);
CheckResult check_ratio_oracle(const Battery& b, int samples = 100000);
CheckResult check_lemma_inequality(int draws, std::uint64_t seed);
CheckResult check_expm_semigroup(std::uint64_t seed);

// ranges and field
CheckResult check_range_calculus(int random_pairs, std::uint64_t seed);
CheckResult check_field_aggregation(std::uint64_t seed);

// semigroup-lab
CheckResult check_assembly(std::uint64_t seed);
struct ContractionScale {
  std::vector<int> grids_1d = {64};
  std::vector<int> grids_2d = {8, 16};
  int trials = 20;
};
CheckResult check_l2_contraction(const ContractionScale& scale, std::uint64_t seed);
CheckResult check_schemes(std::uint64_t seed);
struct TrendScale {
  int base_1d = 32;
  int base_2d = 8;
  int levels = 3;
  int trials = 20;
};
CheckResult check_lp_trend(const TrendScale& scale, std::uint64_t seed);
CheckResult check_offdiagonal(int nodes);
CheckResult check_dissipativity(int base_cells, int levels);
CheckResult check_nittka(int competitors, std::uint64_t seed);
CheckResult check_truncation(std::uint64_t seed);
CheckResult check_ultracontractivity(int cells);

struct VerifyOptions {
  std::string suite = "core";
  std::uint64_t seed = 42;
  VerifyHooks hooks;
};

struct VerifyOutcome {
  std::vector<CheckResult> checks;
  std::optional<std::string> first_failure;
  nlohmann::json report;

  bool ok() const noexcept { return !first_failure.has_value(); }
};

/// Suites: core, lab, all. Checks run in a fixed order; the report holds no
/// timings, so identical options give identical bytes.
VerifyOutcome run_verify(const VerifyOptions& options);

nlohmann::json check_json(const CheckResult& c);

}  // namespace pellipt
