// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include <doctest.h>

#include "pellipt/error.hpp"
#include "pellipt/field.hpp"
#include "pellipt/verify.hpp"

using namespace pellipt;

namespace {

ComplexMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return ComplexMatrix(m);
}

CoefficientField random_field(std::mt19937_64& rng, std::vector<int> shape) {
  const int d = static_cast<int>(shape.size());
  std::size_t count = 1;
  for (int n : shape) count *= static_cast<std::size_t>(n);
  std::vector<ComplexMatrix> cells;
  for (std::size_t c = 0; c < count; ++c) cells.push_back(random_accretive_matrix(rng, d, false));
  std::vector<double> spacing(shape.size(), 0.125);
  return CoefficientField(shape, spacing, cells, BoundarySpec::mixed(d));
}

}  // namespace

TEST_CASE("inline and binary encodings round-trip exactly") {
  std::mt19937_64 rng(31);
  for (const auto& shape : {std::vector<int>{5}, std::vector<int>{3, 4}, std::vector<int>{2, 2, 3}}) {
    const CoefficientField f = random_field(rng, shape);
    for (auto enc : {CellEncoding::inlined, CellEncoding::binary}) {
      const CoefficientField g = parse_field(serialize_field(f, enc));
      CHECK(g == f);
      CHECK(g.digest() == f.digest());
      CHECK(g.bc() == f.bc());
    }
  }
}

TEST_CASE("save and load through the filesystem") {
  const auto dir = std::filesystem::temp_directory_path() / "pellipt_test_field";
  std::filesystem::create_directories(dir);
  const CoefficientField f = generate(FieldKind::scalar(0.7), {4, 4}, {0.25, 0.25});
  save_field(f, dir / "f.json", CellEncoding::binary);
  CHECK(load_field(dir / "f.json") == f);
  CHECK_THROWS_AS(load_field(dir / "missing.json"), ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("parse errors carry byte offsets") {
  try {
    parse_field("{\"version\": 1, \"d\": 1,, }");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 22);
    CHECK(e.line() == 1);
  }
  try {
    parse_field("   x");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 3);
  }
  const CoefficientField f = generate(FieldKind::scalar(1.0), {3}, {1.0 / 3});
  std::string bin = serialize_field(f, CellEncoding::binary);
  bin.resize(bin.size() - 5);
  try {
    parse_field(bin);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == bin.size());
    CHECK(std::string(e.what()).find("missing 5 bytes") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_field("{\"version\": 1, \"d\": 1"), ParseError);
  CHECK_THROWS_AS(parse_field("{\"version\": 2}"), ParseError);
  CHECK_THROWS_AS(
      parse_field(R"({"version":1,"d":1,"shape":[2],"spacing":[0.5],"cells":"inline","data":[[[[1,0]]]]})"),
      ParseError);
}

TEST_CASE("faces that are not listed default to Dirichlet") {
  const CoefficientField f = parse_field(
      R"({"version":1,"d":2,"shape":[1,1],"spacing":[1,1],"cells":"inline",)"
      R"("bc":{"faces":[{"axis":1,"side":"high","kind":"neumann"}]},)"
      R"("data":[[[[1,0],[0,0]],[[0,0],[1,0]]]]})");
  CHECK(f.bc().kind(0, false) == BoundaryKind::dirichlet);
  CHECK(f.bc().kind(0, true) == BoundaryKind::dirichlet);
  CHECK(f.bc().kind(1, false) == BoundaryKind::dirichlet);
  CHECK(f.bc().kind(1, true) == BoundaryKind::neumann);
  const CoefficientField g = parse_field(
      R"({"version":1,"d":1,"shape":[1],"spacing":[1],"cells":"inline","data":[[[[2,0]]]]})");
  CHECK(g.bc() == BoundarySpec::pure_dirichlet(1));
}

TEST_CASE("degenerate cells are flagged and rejected by the analysis") {
  std::vector<ComplexMatrix> cells(4, ComplexMatrix::identity(1));
  cells[2] = ComplexMatrix::scalar(cplx(0.0, 1.0));
  const CoefficientField f({4}, {0.25}, cells, BoundarySpec::pure_dirichlet(1));
  REQUIRE(f.degenerate());
  CHECK(*f.first_degenerate_cell() == 2);
  try {
    analyze_field(f, {Exponent(2.0)});
    FAIL("expected DegenerateError");
  } catch (const DegenerateError& e) {
    CHECK(e.cell() == 2);
  }
}

TEST_CASE("generators") {
  const auto c = generate(FieldKind::checkerboard(ComplexMatrix::identity(2),
                                                  ComplexMatrix::scalar(cplx(2.0, 0.0), 2)),
                          {3, 3}, {1.0 / 3, 1.0 / 3});
  for (std::size_t k = 0; k < c.cell_count(); ++k) {
    const auto idx = c.cell_index(k);
    const double expect = (idx[0] + idx[1]) % 2 == 0 ? 1.0 : 2.0;
    CHECK(c.cell(k)(0, 0).real() == expect);
  }
  CHECK(c.bc() == BoundarySpec::pure_dirichlet(2));

  // Rotating: the spectrum of the Hermitian part is preserved cell by cell.
  const ComplexMatrix seed = mat2({2.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0});
  const auto r = generate(FieldKind::rotating(seed, 2.0), {4, 2}, {0.25, 0.5});
  for (std::size_t k = 0; k < r.cell_count(); ++k) {
    const auto b = bounds_point(r.cell(k));
    CHECK(b.lambda == doctest::Approx(1.0));
    CHECK(b.Lambda == doctest::Approx(2.0));
    const double angle = 2.0 * r.cell_center(k)[0];
    CHECK(r.cell(k)(0, 0).real() ==
          doctest::Approx(2.0 * std::cos(angle) * std::cos(angle) + std::sin(angle) * std::sin(angle)));
  }
  CHECK_THROWS_AS(generate(FieldKind::constant(ComplexMatrix::identity(3)), {2, 2}, {0.5, 0.5}),
                  DomainError);
  CHECK_THROWS_AS(generate(FieldKind::scalar(0.0), {0}, {1.0}), DomainError);
}

TEST_CASE("field aggregates are cellwise extremes with lowest-index argmin") {
  std::vector<ComplexMatrix> cells = {
      ComplexMatrix::scalar(cplx(2.0, 0.0)), ComplexMatrix::scalar(cplx(1.0, 1.0)),
      ComplexMatrix::scalar(cplx(3.0, 0.0)), ComplexMatrix::scalar(cplx(1.0, 1.0))};
  const CoefficientField f({4}, {0.25}, cells, BoundarySpec::pure_dirichlet(1));
  const FieldReport r = analyze_field(f, {Exponent(4.0)});
  CHECK(r.lambda == doctest::Approx(1.0));
  CHECK(r.Lambda == doctest::Approx(3.0));
  CHECK(r.omega == doctest::Approx(std::atan(1.0)));
  CHECK(r.mu == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
  CHECK(r.argmin.lambda == 1);
  CHECK(r.argmin.mu == 1);
  CHECK(r.argmin.omega == 1);
  CHECK(r.argmin.Lambda == 2);
  CHECK(r.argmin.delta[0] == 1);
  CHECK(r.unique_cells == 3);
  CHECK(r.delta[0].second == doctest::Approx(delta_p_point(cells[1], Exponent(4.0))));
}

TEST_CASE("digest depends on every stored component") {
  const auto a = generate(FieldKind::scalar(0.5), {4}, {0.25});
  CHECK(a.digest() == generate(FieldKind::scalar(0.5), {4}, {0.25}).digest());
  CHECK(a.digest() != generate(FieldKind::scalar(0.5), {4}, {0.5}).digest());
  CHECK(a.digest() != generate(FieldKind::scalar(0.6), {4}, {0.25}).digest());
  CHECK(a.digest() !=
        generate(FieldKind::scalar(0.5), {4}, {0.25}, BoundarySpec::pure_neumann(1)).digest());
}
