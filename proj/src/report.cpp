// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/report.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include <unistd.h>

#include "pellipt/error.hpp"

namespace pellipt {

using nlohmann::json;

void Fnv1a::add_bytes(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h_ ^= p[i];
    h_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::add_int64(std::int64_t v) {
  const auto bits = static_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  add_bytes(b, 8);
}

void Fnv1a::add_double(double v) { add_int64(static_cast<std::int64_t>(std::bit_cast<std::uint64_t>(v))); }

void Fnv1a::add_string(std::string_view s) { add_bytes(s.data(), s.size()); }

std::string Fnv1a::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
  return buf;
}

std::string digest_of(std::string_view bytes) {
  Fnv1a h;
  h.add_string(bytes);
  return h.hex();
}

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json interval_json(const QInterval& q) {
  json j = {{"lo_inv", q.lo_inv.value},
            {"hi_inv", q.hi_inv.value},
            {"lo_closed", q.lo_closed},
            {"hi_closed", q.hi_closed},
            {"lo_clipped", q.lo_clipped},
            {"hi_clipped", q.hi_clipped},
            {"degenerate", q.degenerate},
            {"shifted", q.shifted},
            {"q", q.q_string()},
            {"inv", q.inv_string()}};
  if (q.lo_inv.exact && q.hi_inv.exact) {
    j["exact"] = {{"lo_inv", to_string(*q.lo_inv.exact)}, {"hi_inv", to_string(*q.hi_inv.exact)}};
  }
  return j;
}

namespace {

bool is_interval(const json& j) {
  return j.is_object() && j.contains("lo_inv") && j.contains("hi_inv") && j.contains("lo_closed") &&
         j.contains("hi_closed");
}

std::string cell(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  return v.dump();
}

void flatten(const json& j, const std::string& prefix, std::vector<std::string>& keys,
             std::vector<std::string>& values) {
  auto key = [&](const std::string& k) { return prefix.empty() ? k : prefix + "." + k; };
  if (is_interval(j)) {
    for (const char* k : {"lo_inv", "hi_inv", "lo_closed", "hi_closed"}) {
      keys.push_back(key(k));
      values.push_back(cell(j.at(k)));
    }
    return;
  }
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const json& v = it.value();
      if (v.is_structured()) {
        flatten(v, key(it.key()), keys, values);
      } else {
        keys.push_back(key(it.key()));
        values.push_back(cell(v));
      }
    }
    return;
  }
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (j[i].is_object()) flatten(j[i], key(std::to_string(i)), keys, values);
    }
  }
}

}  // namespace

std::string to_csv(const json& report) {
  std::vector<std::string> keys;
  std::vector<std::string> values;
  flatten(report, "", keys, values);
  std::string out;
  for (std::size_t i = 0; i < keys.size(); ++i) out += (i ? "," : "") + cell(keys[i]);
  out += "\n";
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + values[i];
  out += "\n";
  return out;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

void write_file_atomically(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path tmp =
      dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace pellipt
