// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/cli.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "pellipt/ellipt_core.hpp"
#include "pellipt/error.hpp"
#include "pellipt/field.hpp"
#include "pellipt/lab/experiments.hpp"
#include "pellipt/oracle.hpp"
#include "pellipt/ranges.hpp"
#include "pellipt/rational.hpp"
#include "pellipt/report.hpp"

namespace pellipt::cli {

using nlohmann::json;

namespace {

CommandResult failure(int code, std::string message) {
  CommandResult r;
  r.exit_code = code;
  r.message = std::move(message);
  return r;
}

// Maps library exceptions onto exit codes.
template <class Body>
CommandResult guarded(Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    return failure(kParseError, std::string("parse error: ") + e.what());
  } catch (const DegenerateError& e) {
    return failure(kDegenerate, std::string("degenerate input: ") + e.what());
  } catch (const DomainError& e) {
    return failure(kParseError, std::string("invalid argument: ") + e.what());
  } catch (const ConvergenceError& e) {
    return failure(kNumerical, std::string("no convergence: ") + e.what());
  } catch (const NumericalError& e) {
    return failure(kNumerical, std::string("numerical failure: ") + e.what());
  } catch (const std::exception& e) {
    return failure(kNumerical, std::string("error: ") + e.what());
  }
}

std::string render(const RunConfig& config, const json& report) {
  return config.format == Format::csv ? to_csv(report) : dump_report(report);
}

CommandResult success(const RunConfig& config, const json& report, std::string message = {}) {
  CommandResult r;
  r.output = render(config, report);
  r.message = std::move(message);
  return r;
}

json header(const char* command, const RunConfig& config, const std::string& extra = {}) {
  const json params = config_json(config);
  return {{"tool", "pellipt"},
          {"version", kToolVersion},
          {"command", command},
          {"input_digest", digest_of(params.dump() + extra)},
          {"parameters", params}};
}

std::vector<Exponent> exponents(const RunConfig& config) {
  std::vector<Exponent> ps;
  for (const auto& s : config.ps) ps.push_back(parse_exponent(s));
  if (ps.empty()) ps.emplace_back(2.0);
  return ps;
}

std::size_t skip_space(const std::string& s, std::size_t i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return i;
}

[[noreturn]] void literal_error(const std::string& text, std::size_t offset, const std::string& why) {
  throw ParseError("matrix literal '" + text + "' at offset " + std::to_string(offset) + ": " + why,
                   offset, 1);
}

// Parses a real number in text[begin, end); returns false unless it consumes
// the whole range.
bool parse_real(const std::string& text, std::size_t begin, std::size_t end, double& value) {
  if (begin >= end) return false;
  const std::string part = text.substr(begin, end - begin);
  std::size_t used = 0;
  try {
    value = std::stod(part, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == part.size() && std::isfinite(value);
}

cplx parse_entry(const std::string& text, std::size_t begin, std::size_t end) {
  const bool imaginary = text[end - 1] == 'i' || text[end - 1] == 'j';
  if (!imaginary) {
    double re = 0.0;
    if (!parse_real(text, begin, end, re)) literal_error(text, begin, "expected a number");
    return {re, 0.0};
  }
  // Split a+bi at the last sign that does not belong to an exponent.
  std::size_t split = begin;
  for (std::size_t k = end - 1; k > begin; --k) {
    const char c = text[k];
    if ((c == '+' || c == '-') && text[k - 1] != 'e' && text[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  double re = 0.0;
  if (split > begin && !parse_real(text, begin, split, re)) {
    literal_error(text, begin, "expected a real part");
  }
  const std::size_t im_end = end - 1;
  double im = 0.0;
  const std::string coeff = text.substr(split, im_end - split);
  if (coeff.empty() || coeff == "+") {
    im = 1.0;
  } else if (coeff == "-") {
    im = -1.0;
  } else if (!parse_real(text, split, im_end, im)) {
    literal_error(text, split, "expected an imaginary coefficient");
  }
  return {re, im};
}

lab::Scheme scheme_of(const std::string& name) {
  if (name == "exponential") return lab::Scheme::exponential;
  return lab::parse_scheme(name);
}

BoundarySpec parse_bc(const std::string& text, int dim) {
  if (text == "dirichlet") return BoundarySpec::pure_dirichlet(dim);
  if (text == "neumann") return BoundarySpec::pure_neumann(dim);
  if (text == "mixed") return BoundarySpec::mixed(dim);
  // Per-face letters, low then high face for each axis: "DN", "DDNN", ...
  if (text.size() != static_cast<std::size_t>(2 * dim)) {
    throw ParseError("boundary spec '" + text +
                         "': expected dirichlet, neumann, mixed or one D/N letter per face",
                     0, 0);
  }
  BoundarySpec bc(dim, BoundaryKind::dirichlet);
  for (int face = 0; face < 2 * dim; ++face) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(text[face])));
    if (c != 'D' && c != 'N') {
      throw ParseError("boundary spec '" + text + "': unexpected letter at offset " +
                           std::to_string(face),
                       static_cast<std::size_t>(face), 0);
    }
    bc.set(face / 2, face % 2 == 1, c == 'D' ? BoundaryKind::dirichlet : BoundaryKind::neumann);
  }
  return bc;
}

// omega is the supremum of the pointwise sector angles, an upper bound on the
// angle of the form.
constexpr const char* kOmegaKind = "pointwise_sup";

json point_json(const PointReport& r) {
  json delta = json::array();
  for (const auto& [p, v] : r.delta) delta.push_back({{"p", p}, {"value", v}, {"p_elliptic", v > 0.0}});
  return {{"lambda", r.lambda},
          {"Lambda", r.Lambda},
          {"omega", r.omega},
          {"omega_kind", kOmegaKind},
          {"mu", number(r.mu)},
          {"delta", delta},
          {"p_elliptic_interval", interval_json(p_elliptic_interval(r.mu))}};
}

json oracle_json(const ComplexMatrix& a, const std::vector<Exponent>& ps,
                 const std::vector<double>& reduced, double mu, int samples) {
  json delta = json::array();
  double worst = 0.0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const double o = oracle::sphere_min_delta(a, ps[k], samples);
    worst = std::max(worst, std::abs(o - reduced[k]));
    delta.push_back({{"p", ps[k].value()}, {"oracle", o}, {"diff", o - reduced[k]}});
  }
  const double ratio = oracle::sphere_min_ratio(a, samples);
  json mu_j = {{"oracle", number(ratio)}};
  if (std::isfinite(ratio) && std::isfinite(mu)) mu_j["diff"] = ratio - mu;
  return {{"samples", samples}, {"delta", delta}, {"mu", mu_j}, {"max_delta_diff", worst}};
}

CoefficientField read_field(const RunConfig& config) {
  if (!config.field) throw DomainError("--field is required");
  return load_field(*config.field);
}

}  // namespace

json config_json(const RunConfig& c) {
  json j = {{"command", c.command}};
  if (c.command == "analyze") {
    if (!c.matrices.empty()) j["matrix"] = c.matrices.front();
    if (c.field) j["field"] = c.field->filename().string();
    j["p"] = c.ps;
    j["tol"] = c.tol;
    j["oracle"] = c.oracle;
    if (c.oracle) j["oracle_samples"] = c.oracle_samples;
  } else if (c.command == "ranges") {
    if (!c.ps.empty()) j["p"] = c.ps.front();
    if (c.d) j["d"] = *c.d;
    if (c.lambda) j["lambda"] = *c.lambda;
    if (c.Lambda) j["Lambda"] = *c.Lambda;
    if (c.mu) j["mu"] = *c.mu;
    if (c.q) j["q"] = *c.q;
    if (c.omega) j["omega"] = *c.omega;
    if (c.psi) j["psi"] = *c.psi;
    j["eps"] = c.eps;
  } else if (c.command == "verify") {
    j["suite"] = c.suite;
    j["seed"] = c.seed;
  } else if (c.command == "generate") {
    j["kind"] = c.kind;
    j["matrices"] = c.matrices;
    j["t"] = c.t;
    j["kappa"] = c.kappa;
    j["shape"] = c.shape;
    j["spacing"] = c.spacing;
    j["bc"] = c.bc;
    j["encoding"] = c.encoding;
  } else if (c.command == "lab") {
    j["experiment"] = c.experiment;
    if (c.field) j["field"] = c.field->filename().string();
    j["p"] = c.ps;
    j["scheme"] = c.scheme;
    j["eps"] = c.eps;
    if (c.psi) j["psi"] = *c.psi;
    j["times"] = c.times;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    if (c.experiment == "offdiagonal") {
      j["e_max"] = c.e_max;
      j["f_min"] = c.f_min;
    }
  }
  j["format"] = c.format == Format::csv ? "csv" : "json";
  return j;
}

ComplexMatrix parse_matrix_literal(const std::string& text) {
  std::vector<std::vector<cplx>> rows(1);
  std::size_t i = skip_space(text, 0);
  if (i == text.size()) literal_error(text, 0, "empty literal");
  bool need_entry = true;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ';') {
      if (rows.back().empty()) literal_error(text, i, "empty row");
      rows.emplace_back();
      need_entry = true;
      i = skip_space(text, i + 1);
      continue;
    }
    if (c == ',') {
      if (need_entry) literal_error(text, i, "missing entry before ','");
      need_entry = true;
      i = skip_space(text, i + 1);
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && text[end] != ';' && text[end] != ',' &&
           !std::isspace(static_cast<unsigned char>(text[end]))) {
      ++end;
    }
    rows.back().push_back(parse_entry(text, i, end));
    need_entry = false;
    i = skip_space(text, end);
  }
  if (rows.back().empty()) literal_error(text, text.size(), "empty row");
  if (need_entry) literal_error(text, text.size(), "trailing ','");
  const std::size_t n = rows.size();
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) {
      literal_error(text, 0, "row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                                 " entries; a square " + std::to_string(n) + "x" +
                                 std::to_string(n) + " matrix is required");
    }
  }
  CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) m(r, k) = rows[r][k];
  return ComplexMatrix(m);
}

Exponent parse_exponent(const std::string& text) {
  const Rational p = parse_rational(text);
  if (!(p > 1)) throw DomainError("exponent p must lie in (1, inf), got " + text);
  return Exponent(to_double(p));
}

CommandResult cmd_analyze(const RunConfig& config) {
  return guarded([&]() -> CommandResult {
    if (config.matrices.empty() == !config.field.has_value()) {
      throw DomainError("analyze needs exactly one of --matrix or --field");
    }
    const std::vector<Exponent> ps = exponents(config);
    if (!config.matrices.empty()) {
      const ComplexMatrix a = parse_matrix_literal(config.matrices.front());
      const PointReport pr = analyze_point(a, ps, config.tol);
      json report = header("analyze", config);
      report["input"] = {{"kind", "matrix"}, {"d", a.dim()}};
      report["result"] = point_json(pr);
      if (config.oracle) {
        std::vector<double> reduced;
        for (const auto& [p, v] : pr.delta) reduced.push_back(v);
        report["oracle"] = oracle_json(a, ps, reduced, pr.mu, config.oracle_samples);
      }
      return success(config, report);
    }
    const CoefficientField field = read_field(config);
    const FieldReport fr = analyze_field(field, ps, config.tol);
    json report = header("analyze", config, field.digest());
    report["input"] = {{"kind", "field"},
                       {"d", field.dim()},
                       {"shape", field.shape()},
                       {"spacing", field.spacing()},
                       {"field_digest", field.digest()},
                       {"cells", field.cell_count()},
                       {"unique_cells", fr.unique_cells}};
    json delta = json::array();
    for (std::size_t k = 0; k < fr.delta.size(); ++k) {
      delta.push_back({{"p", fr.delta[k].first},
                       {"value", fr.delta[k].second},
                       {"p_elliptic", fr.delta[k].second > 0.0},
                       {"argmin_cell", fr.argmin.delta[k]}});
    }
    report["result"] = {{"lambda", fr.lambda},
                        {"Lambda", fr.Lambda},
                        {"omega", fr.omega},
                        {"omega_kind", kOmegaKind},
                        {"mu", number(fr.mu)},
                        {"delta", delta},
                        {"argmin",
                         {{"lambda", fr.argmin.lambda},
                          {"Lambda", fr.argmin.Lambda},
                          {"omega", fr.argmin.omega},
                          {"mu", fr.argmin.mu}}},
                        {"p_elliptic_interval", interval_json(fr.p_elliptic_interval)}};
    if (config.oracle) {
      // Cross-check at the minimizing cell of each delta_p.
      json checks = json::array();
      double worst = 0.0;
      for (std::size_t k = 0; k < ps.size(); ++k) {
        const ComplexMatrix& a = field.cell(fr.argmin.delta[k]);
        const double o = oracle::sphere_min_delta(a, ps[k], config.oracle_samples);
        worst = std::max(worst, std::abs(o - fr.delta[k].second));
        checks.push_back({{"p", ps[k].value()},
                          {"cell", fr.argmin.delta[k]},
                          {"oracle", o},
                          {"diff", o - fr.delta[k].second}});
      }
      report["oracle"] = {{"samples", config.oracle_samples},
                          {"delta", checks},
                          {"max_delta_diff", worst}};
    }
    return success(config, report);
  });
}

CommandResult cmd_ranges(const RunConfig& config) {
  return guarded([&]() -> CommandResult {
    json report = header("ranges", config);
    json intervals = json::object();
    json constants = json::object();
    json notes = json::array();
    const bool shifted = config.eps > 0.0;
    if (config.eps < 0.0) return failure(kInconsistent, "eps must be >= 0");
    if (config.d && *config.d < 1) return failure(kInconsistent, "d must be >= 1");
    const bool have_d3 = config.d && *config.d >= 3;
    bool any = false;

    std::optional<Rational> p;
    if (!config.ps.empty()) {
      p = parse_rational(config.ps.front());
      if (!(*p > 1)) return failure(kInconsistent, "p must lie in (1, inf), got " + config.ps.front());
      any = true;
      intervals["contraction"] = interval_json(contraction_interval(*p));
      if (have_d3) {
        intervals["extrapolation"] = interval_json(extrapolation_interval(*p, *config.d, shifted));
      } else if (config.d) {
        notes.push_back("extrapolation interval requires d >= 3; skipped for d = " +
                        std::to_string(*config.d));
      }
    }

    if (config.lambda.has_value() != config.Lambda.has_value()) {
      throw DomainError("--lambda and --Lambda must be given together");
    }
    std::optional<Rational> lambda;
    std::optional<Rational> Lambda;
    if (config.lambda) {
      lambda = parse_rational(*config.lambda);
      Lambda = parse_rational(*config.Lambda);
      if (!(*lambda > 0) || !(*lambda <= *Lambda)) {
        return failure(kInconsistent, "inconsistent constants: requires 0 < lambda <= Lambda, got lambda = " +
                                          to_string(*lambda) + ", Lambda = " + to_string(*Lambda));
      }
      any = true;
      if (have_d3) {
        intervals["generic"] = interval_json(generic_interval(*lambda, *Lambda, *config.d));
      } else {
        notes.push_back("generic interval requires d >= 3");
      }
      constants["lambda_over_Lambda"] = to_double(*lambda / *Lambda);
    }

    if (config.omega || config.psi) {
      const double omega = config.omega.value_or(0.0);
      const double psi = config.psi.value_or(0.0);
      if (!lambda) throw DomainError("--omega/--psi need --lambda and --Lambda");
      if (!(omega >= 0.0) || !(psi >= 0.0) || !(psi + omega < std::numbers::pi / 2)) {
        return failure(kInconsistent, "inconsistent constants: requires omega, psi >= 0 and psi + omega < pi/2");
      }
      if (!(omega < std::numbers::pi / 2)) return failure(kInconsistent, "omega must be < pi/2");
      const double l = to_double(*lambda);
      const double L = to_double(*Lambda);
      constants["offdiag_C"] = offdiag_constant(l, L, omega, SectorAngle(psi));
      constants["rotated_lambda"] = rotated_lower_bound(l, omega, SectorAngle(psi));
      constants["omega"] = omega;
      constants["psi"] = psi;
      any = true;
    }

    if (config.mu) {
      double mu = 0.0;
      if (*config.mu == "inf") {
        mu = kInfinity;
      } else {
        mu = to_double(parse_rational(*config.mu));
      }
      if (!(mu >= 0.0)) return failure(kInconsistent, "mu must be >= 0, got " + *config.mu);
      if (lambda && std::isfinite(mu) && mu < to_double(*lambda / *Lambda) - 1e-15) {
        return failure(kInconsistent, "inconsistent constants: mu < lambda/Lambda");
      }
      const QInterval pe = p_elliptic_interval(mu);
      intervals["p_elliptic"] = interval_json(pe);
      if (p) constants["p_is_elliptic"] = pe.contains_inv(to_double(1 / *p));
      any = true;
    }

    if (config.q) {
      if (!p) throw DomainError("--q needs --p");
      const Rational q = parse_rational(*config.q);
      if (!(q > 1) || q < *p) return failure(kInconsistent, "q must satisfy 1 < p <= q");
      const PqExponent e = pq_exponent(*p, q, config.d.value_or(1));
      json pq = {{"exponent", to_string(e.exponent)}, {"exponent_value", to_double(e.exponent)}};
      if (e.sobolev) pq["sobolev"] = to_string(*e.sobolev);
      if (e.nash_theta) {
        pq["nash_theta"] = to_string(*e.nash_theta);
        pq["theta_degenerate"] = e.theta_degenerate;
      }
      constants["pq"] = pq;
      any = true;
    }

    if (!any) throw DomainError("ranges needs --p, --lambda/--Lambda, --mu or --omega");
    report["shifted"] = shifted;
    report["intervals"] = intervals;
    report["constants"] = constants;
    report["notes"] = notes;
    return success(config, report);
  });
}

CommandResult cmd_verify(const RunConfig& config, const VerifyHooks& hooks) {
  return guarded([&]() -> CommandResult {
    VerifyOptions options;
    options.suite = config.suite;
    options.seed = config.seed;
    options.hooks = hooks;
    const VerifyOutcome outcome = run_verify(options);
    CommandResult r = success(config, outcome.report);
    std::size_t trends = 0;
    for (const auto& c : outcome.checks) trends += c.status == CheckStatus::trend ? 1 : 0;
    if (outcome.first_failure) {
      r.exit_code = kVerifyFailed;
      std::string detail;
      for (const auto& c : outcome.checks) {
        if (c.name == *outcome.first_failure) detail = c.detail;
      }
      r.message = "verify failed: first failing invariant: " + *outcome.first_failure + " (" +
                  detail + ")";
    } else {
      r.message = "verify: " + std::to_string(outcome.checks.size()) + " checks passed" +
                  (trends ? " (" + std::to_string(trends) + " trend)" : "");
    }
    return r;
  });
}

CommandResult cmd_generate(const RunConfig& config) {
  return guarded([&]() -> CommandResult {
    if (config.format == Format::csv) throw DomainError("generate writes a field document; --format csv is not supported");
    if (config.shape.empty()) throw DomainError("--shape is required");
    const int dim = static_cast<int>(config.shape.size());
    std::vector<double> spacing = config.spacing;
    if (spacing.empty()) {
      for (int n : config.shape) {
        if (n < 1) throw DomainError("--shape entries must be >= 1");
        spacing.push_back(1.0 / n);
      }
    }
    std::vector<ComplexMatrix> ms;
    for (const auto& m : config.matrices) ms.push_back(parse_matrix_literal(m));
    FieldKind kind;
    if (config.kind == "constant") {
      kind = FieldKind::constant(ms.empty() ? ComplexMatrix::identity(dim) : ms.at(0));
    } else if (config.kind == "scalar") {
      kind = FieldKind::scalar(config.t);
    } else if (config.kind == "rotating") {
      if (ms.empty()) throw DomainError("rotating needs a seed --matrix");
      kind = FieldKind::rotating(ms[0], config.kappa);
    } else if (config.kind == "checkerboard") {
      if (ms.size() != 2) throw DomainError("checkerboard needs two --matrix values");
      kind = FieldKind::checkerboard(ms[0], ms[1]);
    } else {
      throw DomainError("unknown field kind '" + config.kind +
                        "' (expected constant, scalar, rotating or checkerboard)");
    }
    CellEncoding enc = CellEncoding::inlined;
    if (config.encoding == "binary") {
      enc = CellEncoding::binary;
    } else if (config.encoding != "inline") {
      throw DomainError("unknown encoding '" + config.encoding + "' (expected inline or binary)");
    }
    const CoefficientField field = generate(kind, config.shape, spacing, parse_bc(config.bc, dim));
    CommandResult r;
    r.output = serialize_field(field, enc);
    r.message = "generated field " + field.digest() + " with " + std::to_string(field.cell_count()) +
                " cells" + (field.degenerate() ? " (degenerate)" : "");
    return r;
  });
}

CommandResult cmd_lab(const RunConfig& config) {
  return guarded([&]() -> CommandResult {
    const CoefficientField field = read_field(config);
    const lab::DiscreteOperator op = lab::assemble(field);
    const std::vector<double> times =
        config.times.empty() ? std::vector<double>{0.01, 0.1, 1.0} : config.times;
    const std::vector<Exponent> ps = exponents(config);
    if (config.eps < 0.0) throw DomainError("--eps must be >= 0");
    json report = header("lab", config, field.digest());
    report["field_digest"] = field.digest();
    const std::string& e = config.experiment;
    json experiments = json::array();

    if (e == "propagate") {
      const lab::Propagator prop(op, config.eps);
      std::mt19937_64 rng(config.seed);
      const CVector f = lab::random_data(op, lab::DataKind::smooth, rng);
      lab::SemigroupRun run;
      run.scheme = scheme_of(config.scheme);
      run.times = times;
      run.eps = config.eps;
      run.qs.clear();
      for (const auto& p : ps) run.qs.push_back(p.value());
      const lab::GridFunction g{op.mesh_ptr(), op.to_nodes(f)};
      const lab::SemigroupRun done = lab::propagate(prop, g, run);
      json records = json::array();
      for (const auto& rec : done.records) {
        json norms = json::array();
        for (const auto& [q, v] : rec.norms) norms.push_back({{"q", q}, {"norm", v}});
        records.push_back({{"t", rec.t}, {"norms", norms}});
      }
      experiments.push_back({{"experiment", "propagate"},
                             {"mesh", lab::mesh_json(op.mesh())},
                             {"field_digest", field.digest()},
                             {"parameters", {{"scheme", config.scheme}, {"eps", config.eps}}},
                             {"per_time_records", records}});
    } else if (e == "contractivity") {
      if (config.scheme != "exponential") throw DomainError("contractivity uses the exponential scheme");
      const lab::Propagator prop(op, config.eps);
      for (const auto& p : ps) {
        experiments.push_back(
            lab::contractivity_experiment(prop, p, config.trials, times, config.seed).report);
      }
    } else if (e == "offdiagonal") {
      const lab::Propagator prop(op, config.eps);
      const double psi = config.psi.value_or(0.0);
      const double C = offdiag_constant(op.field_lambda(), op.field_Lambda(), op.field_omega(),
                                        SectorAngle(psi));
      const double len = op.mesh().cell_shape()[0] * op.mesh().spacing()[0];
      std::vector<std::size_t> es;
      std::vector<std::size_t> fs;
      for (std::size_t node : op.free_nodes()) {
        const double x = op.mesh().node_coords(node)[0];
        if (x <= config.e_max * len) es.push_back(node);
        if (x >= config.f_min * len) fs.push_back(node);
      }
      if (es.empty() || fs.empty()) throw DomainError("offdiagonal: E or F has no free nodes");
      for (double t : times) experiments.push_back(lab::offdiagonal_experiment(prop, es, fs, t, psi, C).report);
    } else if (e == "ultracontractivity") {
      const lab::Propagator prop(op, config.eps);
      // Without --times, nine log-spaced times across the resolvable band
      // [4 h^2, diam^2 / 25].
      std::vector<double> band = config.times;
      if (band.empty()) {
        const double lo = 4.0 * op.h() * op.h();
        const double hi = op.mesh().diameter() * op.mesh().diameter() / 25.0;
        if (!(lo < hi)) throw DomainError("mesh too coarse for a resolvable time band");
        for (int k = 0; k < 9; ++k) band.push_back(lo * std::pow(hi / lo, k / 8.0));
      }
      for (const auto& p : ps) {
        experiments.push_back(lab::ultracontractivity_experiment(prop, p, band).report);
      }
    } else if (e == "dissipativity") {
      std::mt19937_64 rng(config.seed);
      json records = json::array();
      for (int k = 0; k < config.trials; ++k) {
        const CVector u = lab::random_data(op, lab::DataKind::smooth, rng);
        for (const auto& p : ps) {
          const double dp = lab::field_delta_p(op, p);
          const auto r = lab::dissipativity_check(op, u, p, dp);
          records.push_back({{"trial", k}, {"p", p.value()}, {"delta_p", dp}, {"lhs", r.lhs},
                             {"rhs", r.rhs}, {"gap", r.gap}});
        }
      }
      experiments.push_back({{"experiment", "dissipativity"},
                             {"mesh", lab::mesh_json(op.mesh())},
                             {"field_digest", field.digest()},
                             {"per_trial_records", records}});
    } else {
      throw DomainError("unknown experiment '" + e +
                        "' (expected propagate, contractivity, offdiagonal, ultracontractivity "
                        "or dissipativity)");
    }
    report["experiments"] = experiments;
    return success(config, report);
  });
}

CommandResult run_command(const RunConfig& config) {
  if (config.command == "analyze") return cmd_analyze(config);
  if (config.command == "ranges") return cmd_ranges(config);
  if (config.command == "verify") return cmd_verify(config);
  if (config.command == "generate") return cmd_generate(config);
  if (config.command == "lab") return cmd_lab(config);
  return failure(kParseError, "unknown command '" + config.command + "'");
}

int emit(const RunConfig& config, const CommandResult& result, std::ostream& out,
         std::ostream& err) {
  if (!result.output.empty()) {
    if (config.out) {
      try {
        write_file_atomically(*config.out, result.output);
      } catch (const std::exception& e) {
        err << "cannot write " << config.out->string() << ": " << e.what() << "\n";
        return kNumerical;
      }
    } else {
      out << result.output;
      out.flush();
    }
  }
  if (!result.message.empty()) err << result.message << "\n";
  return result.exit_code;
}

}  // namespace pellipt::cli
