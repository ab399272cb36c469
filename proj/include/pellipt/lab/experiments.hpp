// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// Numerical experiments on assembled operators. Each returns the raw
// measurements plus a JSON report of the form
// {experiment, mesh, field_digest, parameters, per_time_records, verdicts,
//  tolerances}.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "pellipt/lab/propagate.hpp"

namespace pellipt::lab {

enum class Verdict { pass, trend, fail };
const char* verdict_name(Verdict v);

/// iid: complex Gaussian per free node. smooth: a few random Gaussian bumps
/// with a random plane-wave phase, drawn in box coordinates so the same seed
/// gives the same continuum function on every mesh. mixed: alternate.
enum class DataKind { iid, smooth, mixed };

CVector random_data(const DiscreteOperator& op, DataKind kind, std::mt19937_64& rng);

/// Minimum over cells of delta_p.
double field_delta_p(const DiscreteOperator& op, const Exponent& p);

/// Mesh descriptor {d, shape, h}.
nlohmann::json mesh_json(const Mesh& mesh);

struct ContractivityReport {
  double p = 2.0;
  int trials = 0;
  std::vector<double> times;
  double h = 0.0;
  /// max over trials of ||T(t)f||_p / ||f||_p, per time.
  std::vector<double> max_ratio_per_time;
  double max_ratio = 0.0;
  double field_delta_p = 0.0;
  /// Field delta_p < 0: contractivity is not expected.
  bool delta_warning = false;
  nlohmann::json report;
};

ContractivityReport contractivity_experiment(const Propagator& prop, const Exponent& p,
                                             int trials, const std::vector<double>& times,
                                             std::uint64_t seed = 42,
                                             DataKind kind = DataKind::mixed);

struct DissipativityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

/// lhs = Re a_h(u, u|u|^{p-2}), rhs = (2 delta_p / p) a_{I,h}(v, v) with
/// v = u|u|^{p/2-1}; u is a free vector and p >= 2.
DissipativityResult dissipativity_check(const DiscreteOperator& op, const CVector& u,
                                        const Exponent& p, double delta_p);

struct OffDiagonalResult {
  double measured = 0.0;
  double bound = 0.0;
  double dist = 0.0;
  double t = 0.0;
  double psi = 0.0;
  double C = 0.0;
  nlohmann::json report;
};

/// Norm of f -> 1_F T(z) 1_E f on L^2 with z = t e^{i psi}, against
/// e^{-dist(E,F)^2 / (4 C |z|)}. E and F are disjoint sets of free nodes.
/// The measurement is the exact operator norm, that is the supremum over
/// every E-supported f, taken from the dense propagator.
OffDiagonalResult offdiagonal_experiment(const Propagator& prop, const std::vector<std::size_t>& e,
                                         const std::vector<std::size_t>& f, double t, double psi,
                                         double C);

struct UltraReport {
  double p = 2.0;
  double eps = 0.0;
  std::vector<double> times;
  /// max over the battery of ||e^{-eps t} T(t) f||_2 / ||f||_p, per time.
  std::vector<double> norms;
  double slope = 0.0;
  /// d/4 - d/(2p).
  double expected = 0.0;
  /// Times outside the resolvable band [4 h^2, diam^2 / 25].
  std::vector<double> out_of_band;
  nlohmann::json report;
};

/// Battery: Gaussians centered in the box with `battery` geometric widths
/// between 2h and diam/4. Requires p <= 2.
UltraReport ultracontractivity_experiment(const Propagator& prop, const Exponent& p,
                                          const std::vector<double>& times, int battery = 24);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pellipt::lab
