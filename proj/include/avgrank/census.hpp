#pragma once

// Census of minimal short Weierstrass curves over Q up to naive height B,
// sharded on A, with per-prime statistics built from residue histograms.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "avgrank/arith.hpp"
#include "avgrank/ec.hpp"
#include "avgrank/frobenius.hpp"
#include "avgrank/lattice.hpp"

namespace avgrank {

inline constexpr i64 kMaxCensusHeight = 1'000'000'000'000;

/// All curves with a fixed A: every b in [-b_max, b_max] except a sorted
/// list of excluded values (singular or non-minimal pairs).
class GeneratedShard {
 public:
  GeneratedShard(i64 A, i64 b_max, std::vector<i64> excluded) : A_(A), b_max_(b_max), excluded_(std::move(excluded)) {}

  i64 A() const { return A_; }
  i64 size() const { return 2 * b_max_ + 1 - static_cast<i64>(excluded_.size()); }
  const std::vector<i64>& excluded() const { return excluded_; }

  /// out[r] += #{b in shard : b = r mod p}
  void residue_histogram(i64 p, std::span<i64> out) const {
    for (i64 r = 0; r < p; ++r) out[static_cast<std::size_t>(r)] += detail::count_progression(-b_max_, b_max_, r, p);
    for (i64 e : excluded_) --out[static_cast<std::size_t>(mod(e, p))];
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    auto ex = excluded_.begin();
    for (i64 b = -b_max_; b <= b_max_; ++b) {
      if (ex != excluded_.end() && *ex == b) {
        ++ex;
        continue;
      }
      fn(b);
    }
  }

  template <class Fn>
  void for_each_in_class(i64 r, i64 p, Fn&& fn) const {
    i64 b = -b_max_ + mod(r + b_max_, p);
    for (; b <= b_max_; b += p)
      if (!std::binary_search(excluded_.begin(), excluded_.end(), b)) fn(b);
  }

 private:
  i64 A_;
  i64 b_max_;
  std::vector<i64> excluded_;
};

/// A shard holding its b values explicitly (loaded from a cache file).
class ExplicitShard {
 public:
  ExplicitShard(i64 A, std::vector<i64> bs) : A_(A), bs_(std::move(bs)) {}

  i64 A() const { return A_; }
  i64 size() const { return static_cast<i64>(bs_.size()); }
  const std::vector<i64>& values() const { return bs_; }

  void residue_histogram(i64 p, std::span<i64> out) const {
    for (i64 b : bs_) ++out[static_cast<std::size_t>(mod(b, p))];
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (i64 b : bs_) fn(b);
  }

  template <class Fn>
  void for_each_in_class(i64 r, i64 p, Fn&& fn) const {
    for (i64 b : bs_)
      if (mod(b, p) == r) fn(b);
  }

 private:
  i64 A_;
  std::vector<i64> bs_;
};

namespace detail {

inline void push_multiples(std::vector<i64>& out, i64 step, i64 b_max) {
  for (i64 b = -(b_max / step) * step; b <= b_max; b += step) out.push_back(b);
}

inline std::vector<i64> excluded_b(i64 A, i64 b_max) {
  std::vector<i64> ex;
  if (A == 0) {
    ex.push_back(0);
    for (i64 p = 2; checked_pow(p, 6) <= b_max; ++p)
      if (is_prime(static_cast<u64>(p))) push_multiples(ex, checked_pow(p, 6), b_max);
  } else {
    for (const auto& f : factor(A < 0 ? -A : A).factors)
      if (f.exponent >= 4 && checked_pow(f.prime, 6) <= b_max) push_multiples(ex, checked_pow(f.prime, 6), b_max);
      else if (f.exponent >= 4) ex.push_back(0);
    // 4A^3 + 27b^2 = 0 exactly when A = -3t^2, b = +-2t^3
    if (A < 0 && -A % 3 == 0 && is_square(-A / 3)) {
      const i64 t = isqrt(-A / 3);
      const i64 b = 2 * t * t * t;
      if (b <= b_max) {
        ex.push_back(b);
        ex.push_back(-b);
      }
    }
  }
  std::sort(ex.begin(), ex.end());
  ex.erase(std::unique(ex.begin(), ex.end()), ex.end());
  return ex;
}

/// Runs fn(worker, index) over [0, n) with index = worker mod workers.
template <class Fn>
void strided_parallel(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers == 0) throw std::invalid_argument("worker count must be >= 1");
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(0u, i);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned id = 0; id < workers; ++id)
    pool.emplace_back([&, id] {
      for (std::size_t i = id; i < n; i += workers) fn(id, i);
    });
}

}  // namespace detail

/// Lazily generated census at height B; shard i holds A = i - a_max.
class Census {
 public:
  using Shard = GeneratedShard;

  explicit Census(i64 B) : B_(B) {
    if (B < 1) throw std::invalid_argument("census height must be >= 1");
    if (B > kMaxCensusHeight) throw std::overflow_error("census height exceeds 10^12 guard");
    a_max_ = icbrt(B);
    b_max_ = isqrt(B);
    shards_.reserve(static_cast<std::size_t>(2 * a_max_ + 1));
    for (i64 A = -a_max_; A <= a_max_; ++A) shards_.emplace_back(A, b_max_, detail::excluded_b(A, b_max_));
  }

  i64 height_bound() const { return B_; }
  i64 a_max() const { return a_max_; }
  i64 b_max() const { return b_max_; }
  const std::vector<Shard>& shards() const { return shards_; }

  i64 size() const {
    i64 n = 0;
    for (const auto& s : shards_) n += s.size();
    return n;
  }

 private:
  i64 B_;
  i64 a_max_ = 0, b_max_ = 0;
  std::vector<Shard> shards_;
};

/// Census rows read back from storage, grouped by A in increasing order.
class CensusRows {
 public:
  using Shard = ExplicitShard;

  CensusRows(i64 B, std::vector<Shard> shards) : B_(B), shards_(std::move(shards)) {}

  i64 height_bound() const { return B_; }
  const std::vector<Shard>& shards() const { return shards_; }

  i64 size() const {
    i64 n = 0;
    for (const auto& s : shards_) n += s.size();
    return n;
  }

 private:
  i64 B_;
  std::vector<Shard> shards_;
};

template <class Source, class Fn>
void for_each_curve(const Source& src, Fn&& fn) {
  for (const auto& s : src.shards()) s.for_each([&](i64 b) { fn(EllipticCurveQ{s.A(), b}); });
}

template <class Source>
std::vector<EllipticCurveQ> materialize(const Source& src) {
  std::vector<EllipticCurveQ> out;
  out.reserve(static_cast<std::size_t>(src.size()));
  for_each_curve(src, [&](const EllipticCurveQ& e) { out.push_back(e); });
  return out;
}

inline std::vector<EllipticCurveQ> enumerate_census(i64 B) { return materialize(Census(B)); }

/// Counts of (A mod p, b mod p) over the census, indexed (A mod p) * p + (b mod p).
template <class Source>
std::vector<i64> residue_histogram(const Source& src, i64 p) {
  std::vector<i64> h(static_cast<std::size_t>(p * p), 0);
  for (const auto& s : src.shards()) {
    const std::size_t off = static_cast<std::size_t>(mod(s.A(), p) * p);
    s.residue_histogram(p, std::span<i64>(h).subspan(off, static_cast<std::size_t>(p)));
  }
  return h;
}

/// Reduction kind and trace of a residue cell mod p (the kind of a minimal
/// curve at p >= 5 depends only on (A, b) mod p).
struct CellData {
  ReductionKind kind;
  i64 trace;
};

inline std::vector<CellData> cell_table(i64 p) {
  require_prime_at_least_5(p);
  const LegendreTable chi(p);
  const auto traces = trace_table(chi);
  std::vector<CellData> out(static_cast<std::size_t>(p * p));
  for (i64 A = 0; A < p; ++A) {
    for (i64 b = 0; b < p; ++b) {
      const std::size_t idx = static_cast<std::size_t>(A * p + b);
      const i64 d = (4 * A * A % p * A + 27 * b * b) % p;
      if (d != 0) {
        out[idx] = {ReductionKind::good, traces[idx]};
      } else if (A != 0) {
        // node at r = -3b/(2A)
        const i64 r = mod(-3 * b % p * mod_inverse(2 * A % p, p), p);
        const int s = legendre(3 * r, p);
        out[idx] = {s == 1 ? ReductionKind::split_multiplicative : ReductionKind::nonsplit_multiplicative, s};
      } else {
        out[idx] = {ReductionKind::additive, 0};
      }
    }
  }
  return out;
}

struct LocalStatistics {
  i64 p = 0;
  i64 total = 0;
  std::map<ReductionKind, i64> by_kind;
  std::map<KodairaType, i64> by_kodaira;
  std::map<i64, i64> by_trace;  // good reduction only

  friend bool operator==(const LocalStatistics&, const LocalStatistics&) = default;
};

namespace detail {

inline void merge_into(LocalStatistics& into, const LocalStatistics& from) {
  into.total += from.total;
  for (const auto& [k, n] : from.by_kind) into.by_kind[k] += n;
  for (const auto& [k, n] : from.by_kodaira) into.by_kodaira[k] += n;
  for (const auto& [k, n] : from.by_trace) into.by_trace[k] += n;
}

}  // namespace detail

/// Kind and trace from the mod-p histogram; Kodaira types by classifying
/// only the curves in singular cells.
template <class Source>
LocalStatistics local_statistics(const Source& src, i64 p, unsigned workers = 1) {
  const auto cells = cell_table(p);
  const auto& shards = src.shards();
  std::vector<LocalStatistics> part(workers);
  std::vector<std::vector<i64>> hist(workers, std::vector<i64>(static_cast<std::size_t>(p * p), 0));
  detail::strided_parallel(shards.size(), workers, [&](unsigned id, std::size_t i) {
    const auto& s = shards[i];
    const i64 a = mod(s.A(), p);
    s.residue_histogram(p, std::span<i64>(hist[id]).subspan(static_cast<std::size_t>(a * p), static_cast<std::size_t>(p)));
    for (i64 r = 0; r < p; ++r) {
      if (cells[static_cast<std::size_t>(a * p + r)].kind == ReductionKind::good) continue;
      s.for_each_in_class(r, p, [&](i64 b) { ++part[id].by_kodaira[kodaira_type(EllipticCurveQ{s.A(), b}, p)]; });
    }
  });
  LocalStatistics out;
  out.p = p;
  for (unsigned id = 0; id < workers; ++id) {
    detail::merge_into(out, part[id]);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const i64 n = hist[id][c];
      if (n == 0) continue;
      out.total += n;
      out.by_kind[cells[c].kind] += n;
      if (cells[c].kind == ReductionKind::good) {
        out.by_trace[cells[c].trace] += n;
        out.by_kodaira[KodairaType{}] += n;
      }
    }
  }
  return out;
}

/// Reference implementation: classify every curve individually.
template <class Source>
LocalStatistics local_statistics_per_curve(const Source& src, i64 p) {
  LocalStatistics out;
  out.p = p;
  for_each_curve(src, [&](const EllipticCurveQ& E) {
    const auto r = reduction_data(E, p);
    ++out.total;
    ++out.by_kind[r.kind];
    ++out.by_kodaira[r.kodaira];
    if (r.kind == ReductionKind::good) ++out.by_trace[r.trace];
  });
  return out;
}

inline i64 count_satisfying(const LocalStatistics& st, const LocalCondition& c) {
  c.validate(st.p);
  auto kind = [&](ReductionKind k) {
    const auto it = st.by_kind.find(k);
    return it == st.by_kind.end() ? i64{0} : it->second;
  };
  switch (c.row) {
    case ConditionRow::good: return kind(ReductionKind::good);
    case ConditionRow::bad: return st.total - kind(ReductionKind::good);
    case ConditionRow::multiplicative: return kind(ReductionKind::split_multiplicative) + kind(ReductionKind::nonsplit_multiplicative);
    case ConditionRow::split: return kind(ReductionKind::split_multiplicative);
    case ConditionRow::nonsplit: return kind(ReductionKind::nonsplit_multiplicative);
    case ConditionRow::additive: return kind(ReductionKind::additive);
    case ConditionRow::trace: {
      const auto it = st.by_trace.find(c.param);
      return it == st.by_trace.end() ? 0 : it->second;
    }
    default: break;
  }
  i64 n = 0;
  ReductionData r;
  for (const auto& [t, cnt] : st.by_kodaira) {
    r.kodaira = t;
    if (satisfies(c, r)) n += cnt;
  }
  return n;
}

/// Share of the census predicted for a local condition at p: the Haar
/// density relative to the minimal pairs at p, whose measure is 1 - p^-10.
inline double expected_fraction(const LocalCondition& c, i64 p) {
  const Rational d = local_density(c, p);
  const double q10 = std::pow(static_cast<double>(p), -10.0);
  return boost::rational_cast<double>(d) / (1.0 - q10);
}

struct ConditionCount {
  i64 p = 0;
  LocalCondition condition;
  i64 count = 0;
  i64 total = 0;
  double empirical = 0;  // count / total
  double expected = 0;   // expected_fraction
  double predicted = 0;  // 4/zeta(10) * expected * B^{5/6}
};

inline double census_constant() { return 4.0 / zeta_q(10).value; }

inline ConditionCount count_with_condition(const LocalStatistics& st, const LocalCondition& c, i64 B) {
  ConditionCount out;
  out.p = st.p;
  out.condition = c;
  out.count = count_satisfying(st, c);
  out.total = st.total;
  out.empirical = st.total == 0 ? 0.0 : static_cast<double>(out.count) / static_cast<double>(st.total);
  out.expected = expected_fraction(c, st.p);
  out.predicted = census_constant() * out.expected * std::pow(static_cast<double>(B), 5.0 / 6.0);
  return out;
}

}  // namespace avgrank
