// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// Command implementations behind the `pellipt` executable. Each command maps
// a RunConfig to a report string and an exit code; argument parsing and I/O
// live in the tool, so the commands are testable in-process.
//
// Exit codes: 0 success, 1 verification failure, 2 parse or usage error,
// 3 degenerate input, 4 inconsistent constants, 5 numerical failure.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pellipt/complex_matrix.hpp"
#include "pellipt/verify.hpp"

namespace pellipt::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kParseError = 2,
  kDegenerate = 3,
  kInconsistent = 4,
  kNumerical = 5,
};

enum class Format { json, csv };

struct RunConfig {
  std::string command;

  // analyze / generate
  std::vector<std::string> matrices;
  std::optional<std::filesystem::path> field;
  std::vector<std::string> ps;
  double tol = 1e-10;
  bool oracle = false;
  int oracle_samples = 100000;

  // ranges
  std::optional<int> d;
  std::optional<std::string> lambda;
  std::optional<std::string> Lambda;
  std::optional<std::string> mu;
  std::optional<std::string> q;
  std::optional<double> omega;
  std::optional<double> psi;
  double eps = 0.0;

  // verify
  std::string suite = "core";

  // generate
  std::string kind = "constant";
  double t = 0.0;
  double kappa = 0.0;
  std::vector<int> shape;
  std::vector<double> spacing;
  std::string bc = "dirichlet";
  std::string encoding = "inline";

  // lab
  std::string experiment = "contractivity";
  std::string scheme = "exponential";
  std::vector<double> times;
  int trials = 20;
  double e_max = 0.25;
  double f_min = 0.75;

  std::uint64_t seed = 42;
  std::optional<std::filesystem::path> out;
  Format format = Format::json;
};

struct CommandResult {
  int exit_code = kOk;
  /// Report text (JSON or CSV); empty when the command failed early.
  std::string output;
  /// Human-readable diagnostics for stderr.
  std::string message;
};

/// Canonical JSON of the parameters a command reads; its digest is the
/// report's input digest.
nlohmann::json config_json(const RunConfig& config);

/// Parses "a+bi; c, d" style literals: rows split on ';', entries on ',' or
/// whitespace; entries are real, imaginary (2i, -i) or complex (1-0.5i).
/// Errors carry the byte offset into the literal.
ComplexMatrix parse_matrix_literal(const std::string& text);

/// Accepts rationals ("3/2") and decimals; requires p > 1.
Exponent parse_exponent(const std::string& text);

CommandResult cmd_analyze(const RunConfig& config);
CommandResult cmd_ranges(const RunConfig& config);
CommandResult cmd_verify(const RunConfig& config, const VerifyHooks& hooks = {});
CommandResult cmd_generate(const RunConfig& config);
CommandResult cmd_lab(const RunConfig& config);

/// Dispatches on config.command.
CommandResult run_command(const RunConfig& config);

/// Writes the report to config.out (atomically) or to `out`, and the message
/// to `err`. Returns the exit code, or kNumerical when writing failed.
int emit(const RunConfig& config, const CommandResult& result, std::ostream& out,
         std::ostream& err);

}  // namespace pellipt::cli
