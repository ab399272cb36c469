// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "pellipt/cli.hpp"
#include "pellipt/ellipt_core.hpp"
#include "pellipt/error.hpp"
#include "pellipt/field.hpp"

using namespace pellipt;
using namespace pellipt::cli;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "pellipt_test_cli";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the installed binary with stdout and stderr captured to files.
Run run_binary(const std::string& args) {
  const fs::path dir = scratch();
  const std::string cmd = std::string(PELLIPT_BINARY) + " " + args + " > " +
                          (dir / "stdout").string() + " 2> " + (dir / "stderr").string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout");
  r.err = slurp(dir / "stderr");
  return r;
}

RunConfig analyze_config(const std::string& matrix, std::vector<std::string> ps) {
  RunConfig c;
  c.command = "analyze";
  c.matrices = {matrix};
  c.ps = std::move(ps);
  return c;
}

}  // namespace

TEST_CASE("matrix literals") {
  CHECK(parse_matrix_literal("1+1i").entries()(0, 0) == cplx(1.0, 1.0));
  CHECK(parse_matrix_literal(" -2.5e-1-3j ").entries()(0, 0) == cplx(-0.25, -3.0));
  CHECK(parse_matrix_literal("i")(0, 0) == cplx(0.0, 1.0));
  CHECK(parse_matrix_literal("-i")(0, 0) == cplx(0.0, -1.0));
  CHECK(parse_matrix_literal("1e+2+1e-1i")(0, 0) == cplx(100.0, 0.1));
  const ComplexMatrix m = parse_matrix_literal("2, 0.5i; 0 1");
  REQUIRE(m.dim() == 2);
  CHECK(m(0, 1) == cplx(0.0, 0.5));
  CHECK(m(1, 1) == cplx(1.0, 0.0));
  CHECK_THROWS_AS(parse_matrix_literal("1, 2; 3"), ParseError);
  CHECK_THROWS_AS(parse_matrix_literal(""), ParseError);
  try {
    parse_matrix_literal("1, 2x; 3, 4");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 3);
  }
  CHECK(parse_exponent("3/2").value() == 1.5);
  CHECK_THROWS(parse_exponent("1"));
  CHECK_THROWS_AS(parse_exponent("abc"), ParseError);
}

TEST_CASE("analyze reports the closed forms of 1 + i") {
  const CommandResult r = cmd_analyze(analyze_config("1+1i", {"4"}));
  REQUIRE(r.exit_code == kOk);
  const json j = json::parse(r.output);
  CHECK(j["tool"] == "pellipt");
  CHECK(j["command"] == "analyze");
  const json& res = j["result"];
  CHECK(res["lambda"].get<double>() == doctest::Approx(1.0));
  CHECK(res["Lambda"].get<double>() == doctest::Approx(std::sqrt(2.0)));
  CHECK(res["omega"].get<double>() == doctest::Approx(std::atan(1.0)));
  CHECK(res["omega_kind"] == "pointwise_sup");
  CHECK(res["mu"].get<double>() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(res["delta"][0]["p"] == 4.0);
  CHECK(res["delta"][0]["value"].get<double>() ==
        doctest::Approx(delta_p_point(ComplexMatrix::scalar(cplx(1, 1)), Exponent(4.0))));
  CHECK(res["delta"][0]["p_elliptic"] == true);
}

TEST_CASE("analyze exit codes") {
  CHECK(cmd_analyze(analyze_config("1+", {"2"})).exit_code == kParseError);
  CHECK(cmd_analyze(analyze_config("1i", {"2"})).exit_code == kDegenerate);
  CHECK(cmd_analyze(analyze_config("-1", {"2"})).exit_code == kDegenerate);
  CHECK(cmd_analyze(analyze_config("1", {"0.5"})).exit_code == kParseError);
}

TEST_CASE("analyze with the oracle cross-check") {
  RunConfig c = analyze_config("2, 0.5i; -0.3, 1", {"3"});
  c.oracle = true;
  c.oracle_samples = 20000;
  const CommandResult r = cmd_analyze(c);
  REQUIRE(r.exit_code == kOk);
  CHECK(std::abs(json::parse(r.output)["oracle"]["max_delta_diff"].get<double>()) < 1e-6);
}

TEST_CASE("ranges: worked examples and inconsistent constants") {
  RunConfig c;
  c.command = "ranges";
  c.ps = {"2"};
  c.d = 3;
  CommandResult r = cmd_ranges(c);
  REQUIRE(r.exit_code == kOk);
  json j = json::parse(r.output);
  CHECK(j["intervals"]["extrapolation"]["q"] == "q ∈ [6/5, 6]");
  CHECK(j["intervals"]["extrapolation"]["exact"]["lo_inv"] == "1/6");

  c.ps = {"6"};
  j = json::parse(cmd_ranges(c).output);
  CHECK(j["intervals"]["extrapolation"]["exact"]["lo_inv"] == "1/18");

  c.ps = {"2"};
  c.lambda = "1";
  c.Lambda = "2";
  j = json::parse(cmd_ranges(c).output);
  CHECK(j["intervals"]["generic"]["exact"]["lo_inv"] == "1/12");
  CHECK(j["intervals"]["generic"]["exact"]["hi_inv"] == "11/12");

  RunConfig bad = c;
  bad.lambda = "3";
  CHECK(cmd_ranges(bad).exit_code == kInconsistent);
  bad = c;
  bad.mu = "0.1";
  CHECK(cmd_ranges(bad).exit_code == kInconsistent);
  bad = c;
  bad.omega = 1.0;
  bad.psi = 1.0;
  CHECK(cmd_ranges(bad).exit_code == kInconsistent);
  bad = c;
  bad.ps = {"1"};
  CHECK(cmd_ranges(bad).exit_code == kInconsistent);
}

TEST_CASE("verify detects a corrupted delta_p") {
  RunConfig c;
  c.command = "verify";
  c.suite = "core";
  VerifyHooks hooks;
  // Drops the coupling between real and imaginary parts.
  hooks.delta_p = [](const ComplexMatrix& a, const Exponent& p) {
    RealifiedForm f = realify(a, p);
    const int d = a.dim();
    f.matrix.topRightCorner(d, d).setZero();
    f.matrix.bottomLeftCorner(d, d).setZero();
    return f.min_eigenvalue();
  };
  const CommandResult r = cmd_verify(c, hooks);
  CHECK(r.exit_code == kVerifyFailed);
  CHECK(r.message.find("oracle_equivalence") != std::string::npos);
  CHECK(json::parse(r.output)["ok"] == false);
}

TEST_CASE("generate writes a loadable field and rejects bad boundary specs") {
  const fs::path dir = scratch();
  RunConfig c;
  c.command = "generate";
  c.kind = "checkerboard";
  c.matrices = {"1", "2+1i"};
  c.shape = {4};
  c.bc = "DN";
  c.encoding = "binary";
  const CommandResult r = cmd_generate(c);
  REQUIRE(r.exit_code == kOk);
  const CoefficientField f = parse_field(r.output);
  CHECK(f.cell(1)(0, 0) == cplx(2.0, 1.0));
  CHECK(f.bc().kind(0, true) == BoundaryKind::neumann);
  CHECK(f.spacing()[0] == 0.25);
  c.bc = "DX";
  CHECK(cmd_generate(c).exit_code == kParseError);
  c.bc = "dirichlet";
  c.format = Format::csv;
  CHECK(cmd_generate(c).exit_code == kParseError);
}

TEST_CASE("emit writes atomically and reports the exit code") {
  const fs::path dir = scratch();
  RunConfig c = analyze_config("1+1i", {"4"});
  c.out = dir / "report.json";
  const CommandResult r = cmd_analyze(c);
  std::ostringstream out, err;
  CHECK(emit(c, r, out, err) == kOk);
  CHECK(out.str().empty());
  CHECK(slurp(dir / "report.json") == r.output);
  for (const auto& e : fs::directory_iterator(dir)) {
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
  }
  c.out = dir / "no_such_dir" / "x.json";
  CHECK(emit(c, r, out, err) == kNumerical);
}

TEST_CASE("CSV output is a header line and a value line") {
  RunConfig c = analyze_config("1+1i", {"4"});
  c.format = Format::csv;
  const CommandResult r = cmd_analyze(c);
  REQUIRE(r.exit_code == kOk);
  std::istringstream in(r.output);
  std::string head, values, extra;
  REQUIRE(std::getline(in, head));
  REQUIRE(std::getline(in, values));
  CHECK_FALSE(std::getline(in, extra));
  CHECK(head.find("result.lambda") != std::string::npos);
  CHECK(std::count(head.begin(), head.end(), ',') == std::count(values.begin(), values.end(), ','));
}

TEST_CASE("binary: exit codes, determinism and the field pipeline") {
  const fs::path dir = scratch();
  Run r = run_binary("analyze --matrix 1+1i --p 4");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["result"]["lambda"] == 1.0);
  CHECK(run_binary("analyze --matrix 1+1i --p 4").out == r.out);
  CHECK(run_binary("analyze --matrix 1i").code == 3);
  CHECK(run_binary("analyze --matrix 'zz'").code == 2);
  CHECK(run_binary("analyze --bogus").code == 2);
  CHECK(run_binary("ranges --p 2 --d 3 --lambda 2 --Lambda 1").code == 4);
  CHECK(run_binary("--version").code == 0);

  const std::string field = (dir / "rot.field").string();
  r = run_binary("generate --kind rotating --matrix '1+0.6i, 0.4-0.3i; -0.2+0.5i, 0.9-0.4i' "
                 "--kappa 6.283185307179586 --shape 8,8 --out " + field);
  REQUIRE(r.code == 0);
  r = run_binary("analyze --field " + field + " --p 2 --p 3");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["input"]["kind"] == "field");
  CHECK(j["result"]["lambda"].get<double>() > 0.0);
  r = run_binary("lab --experiment contractivity --field " + field +
                 " --p 2 --times 0.01,0.1 --trials 4");
  REQUIRE(r.code == 0);
  const json lab = json::parse(r.out);
  CHECK(lab["experiments"][0]["experiment"] == "contractivity");
  CHECK(lab["experiments"][0]["max_ratio"].get<double>() <= 1.0 + 1e-10);
  const std::string line = (dir / "line.field").string();
  REQUIRE(run_binary("generate --kind constant --matrix 1 --shape 128 --bc neumann --out " + line).code == 0);
  r = run_binary("lab --experiment ultracontractivity --p 1.5 --field " + line);
  REQUIRE(r.code == 0);
  const json u = json::parse(r.out)["experiments"][0];
  CHECK(u["out_of_band"].empty());
  CHECK(std::abs(u["slope"].get<double>() + 1.0 / 12) <= 0.05);
  std::ofstream(dir / "broken.field") << "{\"version\": 1,";
  CHECK(run_binary("analyze --field " + (dir / "broken.field").string()).code == 2);
}
