// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/field.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pellipt/error.hpp"
#include "pellipt/parallel.hpp"
#include "pellipt/report.hpp"

namespace pellipt {

using nlohmann::json;

BoundarySpec::BoundarySpec(int dim, BoundaryKind all) {
  if (dim < 1) throw DomainError("BoundarySpec: dimension must be >= 1");
  faces_.assign(static_cast<std::size_t>(2 * dim), all);
}

BoundarySpec BoundarySpec::mixed(int dim) {
  BoundarySpec bc(dim, BoundaryKind::neumann);
  bc.set(0, false, BoundaryKind::dirichlet);
  return bc;
}

BoundaryKind BoundarySpec::kind(int axis, bool high) const {
  if (axis < 0 || axis >= dim()) throw DomainError("BoundarySpec: axis out of range");
  return faces_[static_cast<std::size_t>(2 * axis + (high ? 1 : 0))];
}

void BoundarySpec::set(int axis, bool high, BoundaryKind kind) {
  if (axis < 0 || axis >= dim()) throw DomainError("BoundarySpec: axis out of range");
  faces_[static_cast<std::size_t>(2 * axis + (high ? 1 : 0))] = kind;
}

CoefficientField::CoefficientField(std::vector<int> shape, std::vector<double> spacing,
                                   std::vector<ComplexMatrix> cells, BoundarySpec bc)
    : shape_(std::move(shape)),
      spacing_(std::move(spacing)),
      cells_(std::move(cells)),
      bc_(std::move(bc)) {
  if (shape_.empty()) throw DomainError("CoefficientField: shape must be non-empty");
  if (spacing_.size() != shape_.size()) {
    throw DomainError("CoefficientField: spacing has " + std::to_string(spacing_.size()) +
                      " entries, shape has " + std::to_string(shape_.size()));
  }
  std::size_t count = 1;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (shape_[a] < 1) throw DomainError("CoefficientField: shape extents must be >= 1");
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a])) {
      throw DomainError("CoefficientField: spacing must be positive and finite");
    }
    count *= static_cast<std::size_t>(shape_[a]);
  }
  if (cells_.size() != count) {
    throw DomainError("CoefficientField: expected " + std::to_string(count) + " cells, got " +
                      std::to_string(cells_.size()));
  }
  if (bc_.dim() != dim()) {
    throw DomainError("CoefficientField: boundary spec has dimension " +
                      std::to_string(bc_.dim()) + ", field has " + std::to_string(dim()));
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].dim() != dim()) {
      throw DomainError("CoefficientField: cell " + std::to_string(i) + " is " +
                        std::to_string(cells_[i].dim()) + "x" + std::to_string(cells_[i].dim()) +
                        ", expected " + std::to_string(dim()));
    }
    if (!first_degenerate_ && !(bounds_point(cells_[i]).lambda > 0.0)) first_degenerate_ = i;
  }
}

std::vector<int> CoefficientField::cell_index(std::size_t flat) const {
  std::vector<int> idx(shape_.size());
  for (std::size_t a = shape_.size(); a-- > 0;) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(shape_[a]));
    flat /= static_cast<std::size_t>(shape_[a]);
  }
  return idx;
}

std::vector<double> CoefficientField::cell_center(std::size_t flat) const {
  const auto idx = cell_index(flat);
  std::vector<double> x(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) x[a] = (idx[a] + 0.5) * spacing_[a];
  return x;
}

std::string CoefficientField::digest() const {
  Fnv1a h;
  for (int n : shape_) h.add_int64(n);
  for (double s : spacing_) h.add_double(s);
  for (int a = 0; a < dim(); ++a) {
    h.add_int64(bc_.kind(a, false) == BoundaryKind::dirichlet ? 1 : 0);
    h.add_int64(bc_.kind(a, true) == BoundaryKind::dirichlet ? 1 : 0);
  }
  for (const auto& c : cells_) {
    for (Eigen::Index i = 0; i < c.entries().rows(); ++i) {
      for (Eigen::Index j = 0; j < c.entries().cols(); ++j) {
        h.add_double(c(i, j).real());
        h.add_double(c(i, j).imag());
      }
    }
  }
  return h.hex();
}

bool CoefficientField::operator==(const CoefficientField& other) const {
  return shape_ == other.shape_ && spacing_ == other.spacing_ && bc_ == other.bc_ &&
         cells_ == other.cells_;
}

namespace {

std::size_t line_of(const std::string& bytes, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < bytes.size(); ++i) {
    if (bytes[i] == '\n') ++line;
  }
  return line;
}

[[noreturn]] void structure_error(const std::string& what) {
  throw ParseError("field file: " + what, 0, 0);
}

// End offset (one past the closing brace) of the leading JSON object.
std::size_t header_end(const std::string& bytes) {
  std::size_t i = 0;
  while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
  if (i == bytes.size() || bytes[i] != '{') {
    throw ParseError("field file: expected '{' at offset " + std::to_string(i), i,
                     line_of(bytes, i));
  }
  int depth = 0;
  bool in_string = false;
  for (; i < bytes.size(); ++i) {
    const char c = bytes[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      if (--depth == 0) return i + 1;
    }
  }
  throw ParseError("field file: unterminated JSON header (" + std::to_string(bytes.size()) +
                       " bytes read)",
                   bytes.size(), line_of(bytes, bytes.size()));
}

json boundary_json(const BoundarySpec& bc) {
  json faces = json::array();
  for (int a = 0; a < bc.dim(); ++a) {
    for (bool high : {false, true}) {
      faces.push_back({{"axis", a},
                       {"side", high ? "high" : "low"},
                       {"kind", bc.kind(a, high) == BoundaryKind::dirichlet ? "dirichlet"
                                                                             : "neumann"}});
    }
  }
  return json{{"faces", faces}};
}

BoundarySpec boundary_from_json(const json& j, int d) {
  // Faces not listed default to Dirichlet.
  BoundarySpec bc(d, BoundaryKind::dirichlet);
  if (!j.contains("faces")) return bc;
  std::vector<int> seen(static_cast<std::size_t>(2 * d), 0);
  for (const auto& f : j.at("faces")) {
    const int axis = f.at("axis").get<int>();
    const std::string side = f.at("side").get<std::string>();
    const std::string kind = f.at("kind").get<std::string>();
    if (axis < 0 || axis >= d) structure_error("bc face axis " + std::to_string(axis) + " out of range");
    if (side != "low" && side != "high") structure_error("bc face side must be low|high");
    if (kind != "dirichlet" && kind != "neumann") {
      structure_error("bc face kind must be dirichlet|neumann");
    }
    const bool high = side == "high";
    if (seen[static_cast<std::size_t>(2 * axis + high)]++) {
      structure_error("bc face (" + std::to_string(axis) + "," + side + ") assigned twice");
    }
    bc.set(axis, high, kind == "dirichlet" ? BoundaryKind::dirichlet : BoundaryKind::neumann);
  }
  return bc;
}

void append_le_double(std::string& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

double read_le_double(const std::string& in, std::size_t at) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + b])) << (8 * b);
  }
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string serialize_field(const CoefficientField& field, CellEncoding encoding) {
  const int d = field.dim();
  json header = {{"version", 1},
                 {"d", d},
                 {"shape", field.shape()},
                 {"spacing", field.spacing()},
                 {"bc", boundary_json(field.bc())},
                 {"cells", encoding == CellEncoding::inlined ? "inline" : "binary"}};
  if (encoding == CellEncoding::inlined) {
    json data = json::array();
    for (const auto& c : field.cells()) {
      json rows = json::array();
      for (int i = 0; i < d; ++i) {
        json row = json::array();
        for (int j = 0; j < d; ++j) row.push_back({c(i, j).real(), c(i, j).imag()});
        rows.push_back(row);
      }
      data.push_back(rows);
    }
    header["data"] = data;
    return header.dump() + "\n";
  }
  std::string out = header.dump() + "\n";
  out.reserve(out.size() + field.cell_count() * 16 * d * d);
  for (const auto& c : field.cells()) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        append_le_double(out, c(i, j).real());
        append_le_double(out, c(i, j).imag());
      }
    }
  }
  return out;
}

CoefficientField parse_field(const std::string& bytes) {
  const std::size_t end = header_end(bytes);
  json header;
  try {
    header = json::parse(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(end));
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError("field file: JSON syntax error at offset " + std::to_string(offset) +
                         " (line " + std::to_string(line_of(bytes, offset)) + "): " + e.what(),
                     offset, line_of(bytes, offset));
  }

  try {
    if (header.value("version", 0) != 1) structure_error("unsupported or missing version");
    const int d = header.at("d").get<int>();
    if (d < 1) structure_error("d must be >= 1");
    auto shape = header.at("shape").get<std::vector<int>>();
    auto spacing = header.at("spacing").get<std::vector<double>>();
    if (static_cast<int>(shape.size()) != d) structure_error("shape must have d entries");
    std::size_t count = 1;
    for (int n : shape) {
      if (n < 1) structure_error("shape extents must be >= 1");
      count *= static_cast<std::size_t>(n);
    }
    BoundarySpec bc = header.contains("bc") ? boundary_from_json(header.at("bc"), d)
                                            : BoundarySpec::pure_dirichlet(d);
    const std::string encoding = header.at("cells").get<std::string>();
    std::vector<ComplexMatrix> cells;
    cells.reserve(count);

    if (encoding == "inline") {
      const json& data = header.at("data");
      if (!data.is_array() || data.size() != count) {
        structure_error("data must hold " + std::to_string(count) + " cells");
      }
      for (std::size_t c = 0; c < count; ++c) {
        const json& rows = data[c];
        if (!rows.is_array() || static_cast<int>(rows.size()) != d) {
          structure_error("data[" + std::to_string(c) + "] must have " + std::to_string(d) + " rows");
        }
        CMatrix m(d, d);
        for (int i = 0; i < d; ++i) {
          const json& row = rows[static_cast<std::size_t>(i)];
          if (!row.is_array() || static_cast<int>(row.size()) != d) {
            structure_error("data[" + std::to_string(c) + "][" + std::to_string(i) +
                            "] must have " + std::to_string(d) + " entries");
          }
          for (int j = 0; j < d; ++j) {
            const json& z = row[static_cast<std::size_t>(j)];
            if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
              structure_error("data[" + std::to_string(c) + "][" + std::to_string(i) + "][" +
                              std::to_string(j) + "] must be a [re, im] pair");
            }
            m(i, j) = cplx(z[0].get<double>(), z[1].get<double>());
          }
        }
        cells.emplace_back(std::move(m));
      }
    } else if (encoding == "binary") {
      std::size_t at = end;
      if (at < bytes.size() && bytes[at] == '\r') ++at;
      if (at < bytes.size() && bytes[at] == '\n') ++at;
      const std::size_t expected = 16 * static_cast<std::size_t>(d) * d * count;
      const std::size_t available = bytes.size() - at;
      if (available != expected) {
        const std::string detail =
            available < expected
                ? "truncated binary payload: missing " + std::to_string(expected - available) +
                      " bytes"
                : "binary payload has " + std::to_string(available - expected) + " extra bytes";
        throw ParseError("field file: " + detail + " (expected " + std::to_string(expected) +
                             ", found " + std::to_string(available) + ")",
                         bytes.size(), line_of(bytes, bytes.size()));
      }
      for (std::size_t c = 0; c < count; ++c) {
        CMatrix m(d, d);
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) {
            const double re = read_le_double(bytes, at);
            const double im = read_le_double(bytes, at + 8);
            at += 16;
            m(i, j) = cplx(re, im);
          }
        }
        cells.emplace_back(std::move(m));
      }
    } else {
      structure_error("cells must be \"inline\" or \"binary\"");
    }
    return CoefficientField(std::move(shape), std::move(spacing), std::move(cells), std::move(bc));
  } catch (const json::exception& e) {
    structure_error(e.what());
  } catch (const DomainError& e) {
    structure_error(e.what());
  }
}

void save_field(const CoefficientField& field, const std::filesystem::path& path,
                CellEncoding encoding) {
  write_file_atomically(path, serialize_field(field, encoding));
}

CoefficientField load_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("field file: cannot open " + path.string(), 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_field(ss.str());
}

CoefficientField generate(const FieldKind& kind, std::vector<int> shape,
                          std::vector<double> spacing, BoundarySpec bc) {
  const int d = static_cast<int>(shape.size());
  if (d < 1) throw DomainError("generate: shape must be non-empty");
  for (int n : shape) {
    if (n < 1) throw DomainError("generate: invalid shape extent " + std::to_string(n));
  }
  if (spacing.size() != shape.size()) throw DomainError("generate: spacing/shape size mismatch");
  if (bc.dim() == 0) bc = BoundarySpec::pure_dirichlet(d);
  std::size_t count = 1;
  for (int n : shape) count *= static_cast<std::size_t>(n);

  auto need = [&](const std::optional<ComplexMatrix>& m, const char* what) -> const ComplexMatrix& {
    if (!m) throw DomainError(std::string("generate: missing ") + what);
    if (m->dim() != d) {
      throw DomainError(std::string("generate: ") + what + " must be " + std::to_string(d) +
                        "x" + std::to_string(d));
    }
    return *m;
  };

  std::vector<ComplexMatrix> cells;
  cells.reserve(count);
  using Family = FieldKind::Family;
  switch (kind.family) {
    case Family::constant: {
      const ComplexMatrix& a = need(kind.a0, "matrix A0");
      cells.assign(count, a);
      break;
    }
    case Family::scalar:
      cells.assign(count, ComplexMatrix::scalar(cplx(1.0, kind.t), d));
      break;
    case Family::rotating: {
      const ComplexMatrix& seed = need(kind.a0, "seed matrix");
      for (std::size_t c = 0; c < count; ++c) {
        if (d == 1) {
          cells.push_back(seed);
          continue;
        }
        std::size_t rest = c;
        for (std::size_t a = shape.size(); a-- > 1;) rest /= static_cast<std::size_t>(shape[a]);
        const double x1 = (static_cast<double>(rest) + 0.5) * spacing[0];
        const double angle = kind.kappa * x1;
        RMatrix rot = RMatrix::Identity(d, d);
        rot(0, 0) = std::cos(angle);
        rot(0, 1) = -std::sin(angle);
        rot(1, 0) = std::sin(angle);
        rot(1, 1) = std::cos(angle);
        const CMatrix r = rot.cast<cplx>();
        cells.emplace_back(CMatrix(r * seed.entries() * r.transpose()));
      }
      break;
    }
    case Family::checkerboard: {
      const ComplexMatrix& even = need(kind.a0, "matrix A0");
      const ComplexMatrix& odd = need(kind.a1, "matrix A1");
      for (std::size_t c = 0; c < count; ++c) {
        std::size_t rest = c;
        int parity = 0;
        for (std::size_t a = shape.size(); a-- > 0;) {
          parity += static_cast<int>(rest % static_cast<std::size_t>(shape[a]));
          rest /= static_cast<std::size_t>(shape[a]);
        }
        cells.push_back(parity % 2 == 0 ? even : odd);
      }
      break;
    }
  }
  return CoefficientField(std::move(shape), std::move(spacing), std::move(cells), std::move(bc));
}

FieldReport analyze_field(const CoefficientField& field, const std::vector<Exponent>& ps,
                          double tol) {
  if (const auto bad = field.first_degenerate_cell()) {
    throw DegenerateError("field is degenerate: cell " + std::to_string(*bad) +
                              " is not strictly accretive",
                          *bad);
  }
  // Pointwise work is done once per distinct cell matrix.
  std::map<std::string, std::size_t> slot_of;
  std::vector<std::size_t> slot(field.cell_count());
  std::vector<std::size_t> representative;
  for (std::size_t c = 0; c < field.cell_count(); ++c) {
    const CMatrix& m = field.cell(c).entries();
    std::string key(reinterpret_cast<const char*>(m.data()),
                    static_cast<std::size_t>(m.size()) * sizeof(cplx));
    auto [it, inserted] = slot_of.emplace(std::move(key), representative.size());
    if (inserted) representative.push_back(c);
    slot[c] = it->second;
  }
  std::vector<PointReport> point(representative.size());
  parallel_for(
      representative.size(),
      [&](std::size_t k) { point[k] = analyze_point(field.cell(representative[k]), ps, tol); },
      1);

  FieldReport r;
  r.unique_cells = representative.size();
  r.delta.resize(ps.size());
  r.argmin.delta.assign(ps.size(), 0);
  for (std::size_t c = 0; c < field.cell_count(); ++c) {
    const PointReport& pt = point[slot[c]];
    if (c == 0) {
      r.lambda = pt.lambda;
      r.Lambda = pt.Lambda;
      r.omega = pt.omega;
      r.mu = pt.mu;
      for (std::size_t k = 0; k < ps.size(); ++k) r.delta[k] = pt.delta[k];
      continue;
    }
    if (pt.lambda < r.lambda) {
      r.lambda = pt.lambda;
      r.argmin.lambda = c;
    }
    if (pt.Lambda > r.Lambda) {
      r.Lambda = pt.Lambda;
      r.argmin.Lambda = c;
    }
    if (pt.omega > r.omega) {
      r.omega = pt.omega;
      r.argmin.omega = c;
    }
    if (pt.mu < r.mu) {
      r.mu = pt.mu;
      r.argmin.mu = c;
    }
    for (std::size_t k = 0; k < ps.size(); ++k) {
      if (pt.delta[k].second < r.delta[k].second) {
        r.delta[k].second = pt.delta[k].second;
        r.argmin.delta[k] = c;
      }
    }
  }
  r.p_elliptic_interval = p_elliptic_interval(r.mu);
  return r;
}

}  // namespace pellipt
