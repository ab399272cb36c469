// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// pellipt: p-ellipticity calculator, exponent-range calculus and
// semigroup laboratory.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pellipt/cli.hpp"
#include "pellipt/report.hpp"

namespace {

using pellipt::cli::Format;
using pellipt::cli::RunConfig;

struct CommonFlags {
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* sub, RunConfig& config, CommonFlags& common) {
  sub->add_option("--seed", config.seed, "RNG seed")->capture_default_str();
  sub->add_option("--out", common.out, "Write the report to this path (atomic)");
  sub->add_option("--format", common.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-ellipticity calculator and semigroup laboratory"};
  app.set_version_flag("--version", std::string("pellipt ") + pellipt::kToolVersion);
  app.require_subcommand(1);

  RunConfig config;
  CommonFlags common;

  std::string lambda, Lambda, mu, q;
  double omega = 0.0;
  double psi = 0.0;
  int d = 0;
  std::string field;

  auto* analyze = app.add_subcommand("analyze", "Pointwise or field-level ellipticity report");
  analyze->add_option("--matrix", config.matrices, "Matrix literal, e.g. \"1+1i\" or \"2, 0.5i; 0, 1\"")
      ->expected(1);
  auto* analyze_field = analyze->add_option("--field", field, "Coefficient field file");
  analyze->add_option("--p", config.ps, "Exponent (repeatable; rational or decimal)");
  analyze->add_option("--tol", config.tol, "Tolerance of the mu bisection")->capture_default_str();
  analyze->add_flag("--oracle", config.oracle, "Cross-check against the sphere oracle");
  analyze->add_option("--oracle-samples", config.oracle_samples, "Oracle sample count")
      ->capture_default_str();
  add_common(analyze, config, common);

  auto* ranges = app.add_subcommand("ranges", "Exponent intervals and explicit constants");
  ranges->add_option("--p", config.ps, "Exponent p (rational)")->expected(1);
  auto* ranges_d = ranges->add_option("--d", d, "Dimension");
  auto* ranges_lambda = ranges->add_option("--lambda", lambda, "Ellipticity constant (rational)");
  auto* ranges_Lambda = ranges->add_option("--Lambda", Lambda, "Bound |A| <= Lambda (rational)");
  auto* ranges_mu = ranges->add_option("--mu", mu, "mu(A), or inf");
  auto* ranges_q = ranges->add_option("--q", q, "Target exponent q >= p (p -> q bounds)");
  auto* ranges_omega = ranges->add_option("--omega", omega, "Form angle in radians");
  auto* ranges_psi = ranges->add_option("--psi", psi, "Complex-time angle in radians");
  ranges->add_option("--eps", config.eps, "Shift eps >= 0 (marks intervals as shifted)");
  add_common(ranges, config, common);

  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  verify->add_option("--suite", config.suite, "core, lab or all")
      ->check(CLI::IsMember({"core", "lab", "all"}))
      ->capture_default_str();
  add_common(verify, config, common);

  auto* gen = app.add_subcommand("generate", "Write a built-in coefficient field");
  gen->add_option("--kind", config.kind, "constant, scalar, rotating or checkerboard")
      ->capture_default_str();
  gen->add_option("--matrix", config.matrices, "Cell matrix literal(s)");
  gen->add_option("--t", config.t, "scalar: cells (1 + i t) I");
  gen->add_option("--kappa", config.kappa, "rotating: angular rate");
  gen->add_option("--shape", config.shape, "Cells per axis")->delimiter(',')->required();
  gen->add_option("--spacing", config.spacing, "Cell size per axis (default 1/shape)")
      ->delimiter(',');
  gen->add_option("--bc", config.bc, "dirichlet, neumann, mixed or D/N per face (e.g. DNDD)")
      ->capture_default_str();
  gen->add_option("--encoding", config.encoding, "inline or binary")->capture_default_str();
  add_common(gen, config, common);

  auto* lab = app.add_subcommand("lab", "Run a semigroup experiment on a field");
  lab->add_option("--experiment", config.experiment,
                  "propagate, contractivity, offdiagonal, ultracontractivity, dissipativity")
      ->capture_default_str();
  auto* lab_field = lab->add_option("--field", field, "Coefficient field file")->required();
  lab->add_option("--p", config.ps, "Exponent(s)");
  lab->add_option("--times", config.times, "Output times")->delimiter(',');
  lab->add_option("--trials", config.trials, "Random initial data per run")->capture_default_str();
  lab->add_option("--scheme", config.scheme, "exponential, implicit-euler or crank-nicolson")
      ->capture_default_str();
  lab->add_option("--eps", config.eps, "Shift eps >= 0")->capture_default_str();
  auto* lab_psi = lab->add_option("--psi", psi, "Complex-time angle (offdiagonal)");
  lab->add_option("--e-max", config.e_max, "offdiagonal: E = {x_1 <= e_max L}");
  lab->add_option("--f-min", config.f_min, "offdiagonal: F = {x_1 >= f_min L}");
  add_common(lab, config, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pellipt::cli::kParseError;
  }

  CLI::App* sub = app.get_subcommands().front();
  config.command = sub->get_name();
  if (analyze_field->count() || lab_field->count()) config.field = field;
  if (ranges_d->count()) config.d = d;
  if (ranges_lambda->count()) config.lambda = lambda;
  if (ranges_Lambda->count()) config.Lambda = Lambda;
  if (ranges_mu->count()) config.mu = mu;
  if (ranges_q->count()) config.q = q;
  if (ranges_omega->count()) config.omega = omega;
  if (ranges_psi->count() || lab_psi->count()) config.psi = psi;
  if (!common.out.empty()) config.out = common.out;
  config.format = common.format == "csv" ? Format::csv : Format::json;

  const auto result = pellipt::cli::run_command(config);
  return pellipt::cli::emit(config, result, std::cout, std::cerr);
}
