#pragma once

// Short Weierstrass curves y^2 = x^3 + A x + b over Q as points of P(4,6),
// their reduction at primes p >= 5, Frobenius data, and the local densities
// of the reduction conditions.

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "avgrank/arith.hpp"
#include "avgrank/frobenius.hpp"
#include "avgrank/hurwitz.hpp"

namespace avgrank {

struct EllipticCurveQ {
  i64 A = 0;
  i64 b = 0;

  /// -16 (4 A^3 + 27 b^2)
  i128 disc() const { return -16 * (4 * static_cast<i128>(A) * A * A + 27 * static_cast<i128>(b) * b); }
  /// max(|A|^3, b^2)
  i128 height() const {
    const i128 a3 = static_cast<i128>(A < 0 ? -A : A) * (A < 0 ? -A : A) * (A < 0 ? -A : A);
    const i128 b2 = static_cast<i128>(b) * b;
    return a3 > b2 ? a3 : b2;
  }

  friend auto operator<=>(const EllipticCurveQ&, const EllipticCurveQ&) = default;
};

/// No prime p with p^4 | A and p^6 | b.
inline bool is_minimal(i64 A, i64 b) {
  if (A == 0 && b == 0) return false;
  if (A == 0) {
    for (const auto& f : factor(b < 0 ? -b : b).factors)
      if (f.exponent >= 6) return false;
    return true;
  }
  for (const auto& f : factor(A < 0 ? -A : A).factors) {
    if (f.exponent < 4) continue;
    if (b == 0 || valuation(b, f.prime) >= 6) return false;
  }
  return true;
}

inline EllipticCurveQ make_curve(i64 A, i64 b) {
  EllipticCurveQ e{A, b};
  if (e.disc() == 0) throw std::invalid_argument("make_curve: singular curve (discriminant zero)");
  if (!is_minimal(A, b)) throw std::invalid_argument("make_curve: model is not minimal in P(4,6)");
  return e;
}

// ---------------------------------------------------------------------------
// Reduction types

enum class ReductionKind { good, split_multiplicative, nonsplit_multiplicative, additive };

inline std::string to_string(ReductionKind k) {
  switch (k) {
    case ReductionKind::good: return "good";
    case ReductionKind::split_multiplicative: return "split";
    case ReductionKind::nonsplit_multiplicative: return "nonsplit";
    case ReductionKind::additive: return "additive";
  }
  return "?";
}

enum class KodairaSymbol { good, I, II, III, IV, I_star, IV_star, III_star, II_star };

/// I_m and I_m^* carry m (I_0^* has m = 0); other symbols have m = 0.
struct KodairaType {
  KodairaSymbol symbol = KodairaSymbol::good;
  int m = 0;

  bool multiplicative() const { return symbol == KodairaSymbol::I; }
  bool additive() const { return symbol != KodairaSymbol::good && symbol != KodairaSymbol::I; }
  friend auto operator<=>(const KodairaType&, const KodairaType&) = default;
};

inline std::string to_string(const KodairaType& t) {
  switch (t.symbol) {
    case KodairaSymbol::good: return "good";
    case KodairaSymbol::I: return "I" + std::to_string(t.m);
    case KodairaSymbol::II: return "II";
    case KodairaSymbol::III: return "III";
    case KodairaSymbol::IV: return "IV";
    case KodairaSymbol::I_star: return "I" + std::to_string(t.m) + "*";
    case KodairaSymbol::IV_star: return "IV*";
    case KodairaSymbol::III_star: return "III*";
    case KodairaSymbol::II_star: return "II*";
  }
  return "?";
}

/// Tate's classification for p >= 5 from exact valuations of A, b and the
/// discriminant (zero coordinates passed as a large valuation). Returns
/// nullopt for a non-minimal valuation pair.
inline std::optional<KodairaType> kodaira_from_valuations(int vA, int vB, int vD) {
  using S = KodairaSymbol;
  if (vD == 0) return KodairaType{S::good, 0};
  if (vA == 0) return KodairaType{S::I, vD};
  if (vB == 1) return KodairaType{S::II, 0};
  if (vA == 1) return KodairaType{S::III, 0};
  if (vB == 2) return KodairaType{S::IV, 0};
  if (vA == 2 && vB == 3) return KodairaType{S::I_star, vD - 6};
  if (vA == 2 || vB == 3) return KodairaType{S::I_star, 0};
  if (vB == 4) return KodairaType{S::IV_star, 0};
  if (vA == 3) return KodairaType{S::III_star, 0};
  if (vB == 5) return KodairaType{S::II_star, 0};
  return std::nullopt;
}

inline void require_prime_at_least_5(i64 p) {
  if (p < 5 || !is_prime(static_cast<u64>(p))) throw std::invalid_argument("p must be a prime >= 5");
}

namespace detail {
constexpr int kInfiniteValuation = 1 << 20;

inline int val_or_inf(i128 x, i64 p) { return x == 0 ? kInfiniteValuation : valuation_capped(x, p, kInfiniteValuation); }
}  // namespace detail

inline KodairaType kodaira_type(const EllipticCurveQ& E, i64 p) {
  require_prime_at_least_5(p);
  const int vA = detail::val_or_inf(E.A, p);
  const int vB = detail::val_or_inf(E.b, p);
  const int vD = detail::val_or_inf(E.disc(), p);
  const auto t = kodaira_from_valuations(vA, vB, vD);
  if (!t) throw std::invalid_argument("kodaira_type: curve is not minimal at p");
  return *t;
}

/// Good-reduction trace a_p = -sum_x (x^3 + A x + b / p).
inline i64 ap(const EllipticCurveQ& E, i64 p) {
  require_prime_at_least_5(p);
  if (mod(narrow(E.disc() % p), p) == 0) throw std::invalid_argument("ap: bad reduction at p");
  return trace_of_frobenius(E.A, E.b, LegendreTable(p));
}

namespace detail {
inline void require_multiplicative(const EllipticCurveQ& E, i64 p) {
  require_prime_at_least_5(p);
  if (mod(narrow(E.disc() % p), p) != 0 || mod(E.A, p) == 0)
    throw std::invalid_argument("bp: reduction at p is not multiplicative");
}
}  // namespace detail

/// b_p = +1 for split, -1 for nonsplit multiplicative reduction: the node
/// sits at r = -3b / (2A) and its tangent slopes are the square roots of 3r.
inline int bp(const EllipticCurveQ& E, i64 p) {
  detail::require_multiplicative(E, p);
  const i64 r = mod(static_cast<i64>(static_cast<i128>(mod(-3 * E.b, p)) * mod_inverse(mod(2 * E.A, p), p) % p), p);
  return legendre(3 * r, p);
}

/// b_p = p - #E_ns(F_p), counting the smooth points and the point at infinity.
inline int bp_by_point_count(const EllipticCurveQ& E, i64 p) {
  detail::require_multiplicative(E, p);
  // The reduced cubic has exactly one singular point, the node (r, 0).
  const i64 total = count_points_naive(E.A, E.b, p);
  return static_cast<int>(p - (total - 1));
}

struct ReductionData {
  i64 p = 0;
  ReductionKind kind = ReductionKind::good;
  KodairaType kodaira;
  i64 trace = 0;  // a_p when good, b_p otherwise
};

inline ReductionData reduction_data(const EllipticCurveQ& E, i64 p) {
  ReductionData r;
  r.p = p;
  r.kodaira = kodaira_type(E, p);
  if (r.kodaira.symbol == KodairaSymbol::good) {
    r.kind = ReductionKind::good;
    r.trace = ap(E, p);
  } else if (r.kodaira.multiplicative()) {
    r.trace = bp(E, p);
    r.kind = r.trace == 1 ? ReductionKind::split_multiplicative : ReductionKind::nonsplit_multiplicative;
  } else {
    r.kind = ReductionKind::additive;
    r.trace = 0;
  }
  return r;
}

/// a-hat at p^k: alpha^k + beta^k for good reduction, b_p^k otherwise.
inline i64 ap_hat(ReductionKind kind, i64 trace, i64 p, int k) {
  if (k < 1) throw std::invalid_argument("ap_hat: k must be positive");
  switch (kind) {
    case ReductionKind::good: {
      i64 s0 = 2, s1 = trace;
      for (int j = 2; j <= k; ++j) {
        const i64 s2 = checked_add(checked_mul(trace, s1), -checked_mul(p, s0));
        s0 = s1;
        s1 = s2;
      }
      return s1;
    }
    case ReductionKind::split_multiplicative: return 1;
    case ReductionKind::nonsplit_multiplicative: return k % 2 == 0 ? 1 : -1;
    case ReductionKind::additive: return 0;
  }
  return 0;
}

inline i64 ap_hat(const EllipticCurveQ& E, i64 p, int k) {
  const auto r = reduction_data(E, p);
  return ap_hat(r.kind, r.trace, p, k);
}

// ---------------------------------------------------------------------------
// Local conditions and their densities

enum class ConditionRow {
  good, bad, multiplicative, split, nonsplit, additive, trace,
  I_m, II, III, IV, I0_star, Im_star, II_star, III_star, IV_star
};

struct LocalCondition {
  ConditionRow row = ConditionRow::good;
  int param = 0;  // m for I_m / I_m^*, a for the trace row

  static LocalCondition trace_equals(int a) { return {ConditionRow::trace, a}; }
  static LocalCondition I(int m) { return {ConditionRow::I_m, m}; }
  static LocalCondition I_star(int m) { return m == 0 ? LocalCondition{ConditionRow::I0_star, 0} : LocalCondition{ConditionRow::Im_star, m}; }

  bool is_kodaira_row() const {
    return row >= ConditionRow::I_m;
  }

  void validate(i64 p) const {
    require_prime_at_least_5(p);
    if ((row == ConditionRow::I_m || row == ConditionRow::Im_star) && param < 1)
      throw std::invalid_argument("LocalCondition: m must be >= 1");
    if (row == ConditionRow::trace && static_cast<i64>(param) * param > 4 * p)
      throw std::invalid_argument("LocalCondition: trace outside the Hasse bound");
  }

  std::string name() const {
    switch (row) {
      case ConditionRow::good: return "good";
      case ConditionRow::bad: return "bad";
      case ConditionRow::multiplicative: return "multiplicative";
      case ConditionRow::split: return "split";
      case ConditionRow::nonsplit: return "nonsplit";
      case ConditionRow::additive: return "additive";
      case ConditionRow::trace: return "trace=" + std::to_string(param);
      case ConditionRow::I_m: return "I" + std::to_string(param);
      case ConditionRow::II: return "II";
      case ConditionRow::III: return "III";
      case ConditionRow::IV: return "IV";
      case ConditionRow::I0_star: return "I0*";
      case ConditionRow::Im_star: return "I" + std::to_string(param) + "*";
      case ConditionRow::II_star: return "II*";
      case ConditionRow::III_star: return "III*";
      case ConditionRow::IV_star: return "IV*";
    }
    return "?";
  }

  static LocalCondition parse(const std::string& s) {
    static const std::map<std::string, ConditionRow> fixed = {
        {"good", ConditionRow::good},         {"bad", ConditionRow::bad},
        {"multiplicative", ConditionRow::multiplicative}, {"split", ConditionRow::split},
        {"nonsplit", ConditionRow::nonsplit}, {"additive", ConditionRow::additive},
        {"II", ConditionRow::II},             {"III", ConditionRow::III},
        {"IV", ConditionRow::IV},             {"I0*", ConditionRow::I0_star},
        {"II*", ConditionRow::II_star},       {"III*", ConditionRow::III_star},
        {"IV*", ConditionRow::IV_star}};
    if (auto it = fixed.find(s); it != fixed.end()) return {it->second, 0};
    try {
      if (s.rfind("trace=", 0) == 0) return trace_equals(std::stoi(s.substr(6)));
      if (s.size() >= 2 && s[0] == 'I') {
        std::size_t used = 0;
        const bool star = s.back() == '*';
        const std::string digits = s.substr(1, s.size() - 1 - (star ? 1 : 0));
        const int m = std::stoi(digits, &used);
        if (used == digits.size()) return star ? I_star(m) : I(m);
      }
    } catch (const std::logic_error&) {
    }
    throw std::invalid_argument("unknown local condition: " + s);
  }
};

/// Haar density kappa_L of the condition among (A, b) in Z_p^2.
inline Rational local_density(const LocalCondition& c, i64 p) {
  c.validate(p);
  const Rational q(p);
  auto qpow = [p](int e) { return Rational(checked_pow(p, static_cast<unsigned>(e))); };
  const Rational u = Rational(1) - Rational(1) / q;  // 1 - 1/q
  switch (c.row) {
    case ConditionRow::good: return (q * q - q) / (q * q);
    case ConditionRow::bad: return (qpow(10) - q) / qpow(11);
    case ConditionRow::multiplicative: return (q - 1) / (q * q);
    case ConditionRow::split:
    case ConditionRow::nonsplit: return (q - 1) / (2 * q * q);
    // (q^8 - 1) / q^10: bad minus multiplicative, equivalently the sum of
    // all additive Kodaira rows.
    case ConditionRow::additive: return (qpow(8) - 1) / qpow(10);
    case ConditionRow::trace: return (q - 1) * hurwitz_H(static_cast<i64>(c.param) * c.param - 4 * p) / (q * q);
    case ConditionRow::I_m: return u * u / qpow(c.param);
    case ConditionRow::II: return u / qpow(2);
    case ConditionRow::III: return u / qpow(3);
    case ConditionRow::IV: return u / qpow(4);
    case ConditionRow::I0_star: return u / qpow(5);
    case ConditionRow::Im_star: return u * u / qpow(c.param + 5);
    case ConditionRow::II_star: return u / qpow(9);
    case ConditionRow::III_star: return u / qpow(8);
    case ConditionRow::IV_star: return u / qpow(7);
  }
  return Rational(0);
}

/// Whether reduction data at p satisfies the condition.
inline bool satisfies(const LocalCondition& c, const ReductionData& r) {
  using S = KodairaSymbol;
  const auto& t = r.kodaira;
  switch (c.row) {
    case ConditionRow::good: return r.kind == ReductionKind::good;
    case ConditionRow::bad: return r.kind != ReductionKind::good;
    case ConditionRow::multiplicative: return t.multiplicative();
    case ConditionRow::split: return r.kind == ReductionKind::split_multiplicative;
    case ConditionRow::nonsplit: return r.kind == ReductionKind::nonsplit_multiplicative;
    case ConditionRow::additive: return r.kind == ReductionKind::additive;
    case ConditionRow::trace: return r.kind == ReductionKind::good && r.trace == c.param;
    case ConditionRow::I_m: return t.symbol == S::I && t.m == c.param;
    case ConditionRow::II: return t.symbol == S::II;
    case ConditionRow::III: return t.symbol == S::III;
    case ConditionRow::IV: return t.symbol == S::IV;
    case ConditionRow::I0_star: return t.symbol == S::I_star && t.m == 0;
    case ConditionRow::Im_star: return t.symbol == S::I_star && t.m == c.param;
    case ConditionRow::II_star: return t.symbol == S::II_star;
    case ConditionRow::III_star: return t.symbol == S::III_star;
    case ConditionRow::IV_star: return t.symbol == S::IV_star;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Exact residue-class counting mod p^N

/// Outcome of classifying a residue pair (A, b) mod p^k: a Kodaira type fixed
/// by every lift, a pair whose every lift is non-minimal, or undecided.
struct ResidueClass {
  enum class Status { decided, nonminimal, undecided } status = Status::undecided;
  KodairaType type;
};

/// Classifies (A, b) mod p^k (representatives in [0, p^k)). Valuations below
/// k are exact; A^3 is known mod p^{k + 2 v(A)} and b^2 mod p^{k + v(b)}, so
/// v(disc) is exact below the smaller of those precisions.
inline ResidueClass classify_residue(i64 A, i64 b, i64 p, int k) {
  using S = KodairaSymbol;
  using St = ResidueClass::Status;
  const int vA = valuation_capped(A, p, k);
  const int vB = valuation_capped(b, p, k);
  const bool exA = vA < k, exB = vB < k;
  const int prec = std::min(k + 2 * vA, k + vB);
  const i128 D = 4 * static_cast<i128>(A) * A * A + 27 * static_cast<i128>(b) * b;
  const int vD = valuation_capped(D, p, prec);
  const bool exD = vD < prec;
  auto decided = [](S s, int m = 0) { return ResidueClass{St::decided, KodairaType{s, m}}; };

  if (exD && vD == 0) return decided(S::good);
  if (exA && vA == 0) return exD ? decided(S::I, vD) : ResidueClass{};
  if (vA >= 1 && exB && vB == 1) return decided(S::II);
  if (exA && vA == 1 && vB >= 2) return decided(S::III);
  if (vA >= 2 && exB && vB == 2) return decided(S::IV);
  if (exA && vA == 2 && exB && vB == 3) return exD ? decided(S::I_star, vD - 6) : ResidueClass{};
  if ((exA && vA == 2 && vB >= 4) || (vA >= 3 && exB && vB == 3)) return decided(S::I_star, 0);
  if (vA >= 3 && exB && vB == 4) return decided(S::IV_star);
  if (exA && vA == 3 && vB >= 5) return decided(S::III_star);
  if (vA >= 4 && exB && vB == 5) return decided(S::II_star);
  if (vA >= 4 && vB >= 6) return {St::nonminimal, {}};
  return {};
}

struct ResidueCounts {
  i64 p = 0;
  int N = 0;
  i64 total = 0;  // p^{2N}
  std::map<KodairaType, i64> by_type;
  i64 nonminimal = 0;
  i64 undecided = 0;
};

/// Exact counts of residue pairs mod p^N by Kodaira type, refining p-adic
/// cells only while their type is still open.
inline ResidueCounts residue_kodaira_counts(i64 p, int N) {
  require_prime_at_least_5(p);
  if (N < 1) throw std::invalid_argument("residue_kodaira_counts: N must be >= 1");
  ResidueCounts out;
  out.p = p;
  out.N = N;
  out.total = checked_pow(p, static_cast<unsigned>(2 * N));
  std::vector<std::pair<i64, i64>> cells;
  for (i64 A = 0; A < p; ++A)
    for (i64 b = 0; b < p; ++b) cells.emplace_back(A, b);
  i64 pk = p;
  for (int k = 1; k <= N; ++k) {
    const i64 weight = checked_pow(p, static_cast<unsigned>(2 * (N - k)));
    std::vector<std::pair<i64, i64>> open;
    for (const auto& [A, b] : cells) {
      const auto c = classify_residue(A, b, p, k);
      switch (c.status) {
        case ResidueClass::Status::decided: out.by_type[c.type] += weight; break;
        case ResidueClass::Status::nonminimal: out.nonminimal += weight; break;
        case ResidueClass::Status::undecided:
          if (k == N) {
            out.undecided += 1;
          } else {
            for (i64 i = 0; i < p; ++i)
              for (i64 j = 0; j < p; ++j) open.emplace_back(A + i * pk, b + j * pk);
          }
          break;
      }
    }
    cells.swap(open);
    if (k < N) pk *= p;
  }
  return out;
}

/// Density of a Kodaira row among residues mod p^N, as an exact rational.
inline Rational residue_density(const LocalCondition& c, const ResidueCounts& counts) {
  if (!c.is_kodaira_row()) throw std::invalid_argument("residue_density: not a Kodaira row");
  ReductionData r;
  i64 hits = 0;
  for (const auto& [type, n] : counts.by_type) {
    r.kodaira = type;
    if (satisfies(c, r)) hits += n;
  }
  return Rational(hits, counts.total);
}

}  // namespace avgrank
