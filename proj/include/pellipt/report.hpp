// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// Report plumbing shared by the CLI and the verification suites: digests,
// JSON encoding of numbers and intervals, CSV flattening, atomic writes.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pellipt/ranges.hpp"

namespace pellipt {

inline constexpr const char* kToolVersion = "0.1.0";

/// 64-bit FNV-1a over little-endian encodings.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t size);
  void add_int64(std::int64_t v);
  void add_double(double v);
  void add_string(std::string_view s);

  std::uint64_t value() const noexcept { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string digest_of(std::string_view bytes);

/// Finite doubles as numbers; infinities as "inf" / "-inf"; NaN as "nan".
nlohmann::json number(double v);

/// {lo_inv, hi_inv, lo_closed, hi_closed, ...} plus exact endpoints and the
/// printed forms.
nlohmann::json interval_json(const QInterval& q);

/// Two-line CSV (header, values). Nested objects flatten to dotted keys;
/// intervals become lo, hi, lo_closed, hi_closed; arrays of scalars are
/// skipped, arrays of objects are indexed.
std::string to_csv(const nlohmann::json& report);

/// Pretty JSON with a trailing newline.
std::string dump_report(const nlohmann::json& report);

/// Writes to a sibling temporary and renames over `path`.
void write_file_atomically(const std::filesystem::path& path, std::string_view content);

}  // namespace pellipt
