#pragma once

// Census cache files (CSV rows plus a JSON sidecar) and report serialization.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <zlib.h>

#include "json.hpp"

#include "avgrank/arith.hpp"
#include "avgrank/census.hpp"
#include "avgrank/lfunc.hpp"

namespace avgrank {

inline constexpr int kCacheVersion = 1;

struct CacheError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string to_string_i128(i128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  u128 u = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  std::string s;
  while (u != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

inline std::string hex32(unsigned long v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08lx", v & 0xffffffffUL);
  return buf;
}

struct CacheHeader {
  i64 B = 0;
  int version = kCacheVersion;
  i64 rows = 0;
  std::string checksum;  // "crc32:xxxxxxxx"
};

inline std::filesystem::path census_csv_path(const std::filesystem::path& dir, i64 B) {
  return dir / ("census_B" + std::to_string(B) + ".csv");
}

inline std::filesystem::path census_sidecar_path(const std::filesystem::path& dir, i64 B) {
  return dir / ("census_B" + std::to_string(B) + ".json");
}

inline nlohmann::json to_json(const CacheHeader& h) {
  return {{"B", h.B}, {"version", h.version}, {"rows", h.rows}, {"checksum", h.checksum}};
}

/// Streams "A,b,height,disc" rows sorted by (A, b); returns row count and crc32.
template <class Source>
CacheHeader write_census_csv(const Source& src, std::ostream& os) {
  CacheHeader h;
  h.B = src.height_bound();
  uLong crc = crc32(0L, Z_NULL, 0);
  auto emit = [&](const std::string& line) {
    crc = crc32(crc, reinterpret_cast<const Bytef*>(line.data()), static_cast<uInt>(line.size()));
    os << line;
  };
  emit("A,b,height,disc\n");
  std::string line;
  for_each_curve(src, [&](const EllipticCurveQ& E) {
    line.clear();
    line += std::to_string(E.A);
    line += ',';
    line += std::to_string(E.b);
    line += ',';
    line += to_string_i128(E.height());
    line += ',';
    line += to_string_i128(E.disc());
    line += '\n';
    emit(line);
    ++h.rows;
  });
  h.checksum = "crc32:" + hex32(crc);
  return h;
}

/// Writes the cache for src into dir (through temporary files, then rename).
template <class Source>
CacheHeader write_census_cache(const Source& src, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const i64 B = src.height_bound();
  const auto csv = census_csv_path(dir, B), side = census_sidecar_path(dir, B);
  const auto csv_tmp = std::filesystem::path(csv.string() + ".tmp");
  const auto side_tmp = std::filesystem::path(side.string() + ".tmp");
  CacheHeader h;
  {
    std::ofstream os(csv_tmp, std::ios::binary);
    if (!os) throw CacheError("cannot write " + csv_tmp.string());
    h = write_census_csv(src, os);
    if (!os.flush()) throw CacheError("write failed: " + csv_tmp.string());
  }
  {
    std::ofstream os(side_tmp, std::ios::binary);
    if (!os) throw CacheError("cannot write " + side_tmp.string());
    os << to_json(h).dump(2) << '\n';
    if (!os.flush()) throw CacheError("write failed: " + side_tmp.string());
  }
  std::filesystem::rename(csv_tmp, csv);
  std::filesystem::rename(side_tmp, side);
  return h;
}

inline CacheHeader read_sidecar(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw CacheError("missing sidecar " + path.string());
  nlohmann::json j;
  try {
    is >> j;
    CacheHeader h;
    h.B = j.at("B").get<i64>();
    h.version = j.at("version").get<int>();
    h.rows = j.at("rows").get<i64>();
    h.checksum = j.at("checksum").get<std::string>();
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw CacheError("malformed sidecar " + path.string() + ": " + e.what());
  }
}

/// Loads and validates a cache; nullopt when absent, CacheError when the
/// checksum, version, row count or row contents do not validate.
inline std::optional<CensusRows> load_census_cache(const std::filesystem::path& dir, i64 B) {
  const auto csv = census_csv_path(dir, B), side = census_sidecar_path(dir, B);
  if (!std::filesystem::exists(csv) && !std::filesystem::exists(side)) return std::nullopt;
  const CacheHeader h = read_sidecar(side);
  if (h.version != kCacheVersion) throw CacheError("cache version mismatch");
  if (h.B != B) throw CacheError("cache height mismatch");
  std::ifstream is(csv, std::ios::binary);
  if (!is) throw CacheError("missing cache rows " + csv.string());
  uLong crc = crc32(0L, Z_NULL, 0);
  std::string line;
  std::vector<CensusRows::Shard> shards;
  std::vector<i64> bs;
  i64 cur_A = 0, rows = 0;
  bool have = false, header = true;
  i64 prev_A = 0, prev_b = 0;
  while (std::getline(is, line)) {
    const std::string with_nl = line + '\n';
    crc = crc32(crc, reinterpret_cast<const Bytef*>(with_nl.data()), static_cast<uInt>(with_nl.size()));
    if (header) {
      if (line != "A,b,height,disc") throw CacheError("bad cache header");
      header = false;
      continue;
    }
    i64 A = 0, b = 0;
    if (std::sscanf(line.c_str(), "%ld,%ld", &A, &b) != 2) throw CacheError("bad cache row: " + line);
    if (have && (A < prev_A || (A == prev_A && b <= prev_b))) throw CacheError("cache rows not sorted");
    if (!have || A != cur_A) {
      if (have) shards.emplace_back(cur_A, std::move(bs));
      bs = {};
      cur_A = A;
    }
    bs.push_back(b);
    have = true;
    prev_A = A;
    prev_b = b;
    ++rows;
  }
  if (have) shards.emplace_back(cur_A, std::move(bs));
  if ("crc32:" + hex32(crc) != h.checksum) throw CacheError("cache checksum mismatch");
  if (rows != h.rows) throw CacheError("cache row count mismatch");
  return CensusRows(B, std::move(shards));
}

/// Always "num/den", also for integers.
inline std::string rational_json(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline nlohmann::json to_json(const RankBoundReport& r) {
  auto terms = [](const SkResult& s) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& t : s.terms) a.push_back({{"p", t.p}, {"inner", t.inner}, {"weight", t.weight}, {"contribution", t.contribution}});
    return a;
  };
  return {{"B", r.B},
          {"nu", r.nu},
          {"degree", r.degree},
          {"census_size", r.census_size},
          {"S1", r.S1},
          {"S2", r.S2},
          {"phi0", r.phi0},
          {"phi_hat0", r.phi_hat0},
          {"rhs", r.rhs},
          {"bound", r.bound},
          {"target", r.target},
          {"gap", r.gap},
          {"formula_bound", r.formula_bound},
          {"hasse_tail_majorant", r.hasse_tail},
          {"omitted",
           {{"gamma_and_conductor_terms", r.dropped_gamma_and_conductor_terms},
            {"prime_powers_k_ge_3", r.dropped_prime_powers_k_ge_3},
            {"primes_2_and_3", r.excluded_primes_2_3}}},
          {"S1_terms", terms(r.s1)},
          {"S2_terms", terms(r.s2)}};
}

/// "k,p,inner,weight,contribution" rows for both sums.
inline std::string prime_terms_csv(const RankBoundReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "k,p,inner,weight,contribution\n";
  for (const auto* s : {&r.s1, &r.s2})
    for (const auto& t : s->terms) os << s->k << ',' << t.p << ',' << t.inner << ',' << t.weight << ',' << t.contribution << '\n';
  return os.str();
}

}  // namespace avgrank
