#pragma once

/**
 * @file laurent.hpp
 * @brief Sparse multivariate Laurent polynomials over arbitrary-precision integers.
 *
 * Every field element the engine touches is stored as a finite map from
 * exponent vectors to nonzero integer coefficients in some fixed cluster
 * (x_1, ..., x_n).  The operations here are the exact primitives the rest of
 * the library is built on:
 *
 *   - ring arithmetic (add, sub, mul, integer powers)
 *   - exact division, deciding divisibility in Z[x_1^{+-1}, ..., x_n^{+-1}]
 *   - denominator vectors
 *   - substitution of variables by fractions, and fraction equality by
 *     cross-multiplication (no gcd anywhere)
 *
 * Variable indices are 0-based throughout the C++ API.
 */

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace cluster {

using Coefficient = mpz_class;
using ExponentVector = std::vector<int>;

struct Term {
  ExponentVector exp;
  Coefficient coeff;

  bool operator==(const Term&) const = default;
};

class RankMismatch : public std::invalid_argument {
 public:
  RankMismatch(std::size_t a, std::size_t b)
      : std::invalid_argument("rank mismatch: " + std::to_string(a) + " vs " +
                              std::to_string(b)) {}
};

namespace detail {

inline ExponentVector add_exponents(const ExponentVector& a, const ExponentVector& b) {
  ExponentVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline ExponentVector sub_exponents(const ExponentVector& a, const ExponentVector& b) {
  ExponentVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline bool divides(const ExponentVector& d, const ExponentVector& m) {
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > m[i]) return false;
  return true;
}

// Graded lexicographic, x_1 most significant; used only inside div_exact.
struct GrlexGreater {
  bool operator()(const ExponentVector& a, const ExponentVector& b) const {
    long da = 0, db = 0;
    for (int e : a) da += e;
    for (int e : b) db += e;
    if (da != db) return da > db;
    return a > b;
  }
};

}  // namespace detail

/// Element of Z[x_1^{+-1}, ..., x_n^{+-1}].  Terms are kept sorted by
/// ascending lexicographic exponent order with no zero coefficients, so
/// structural equality is mathematical equality.
class LaurentPoly {
 public:
  LaurentPoly() = default;
  explicit LaurentPoly(std::size_t rank) : rank_(rank) {}

  static LaurentPoly zero(std::size_t rank) { return LaurentPoly(rank); }

  static LaurentPoly constant(std::size_t rank, const Coefficient& c) {
    LaurentPoly p(rank);
    if (c != 0) p.terms_.push_back({ExponentVector(rank, 0), c});
    return p;
  }

  static LaurentPoly one(std::size_t rank) { return constant(rank, 1); }

  static LaurentPoly variable(std::size_t rank, std::size_t i) {
    if (i >= rank) throw std::out_of_range("variable index out of range");
    ExponentVector e(rank, 0);
    e[i] = 1;
    return monomial(std::move(e), 1);
  }

  static LaurentPoly monomial(ExponentVector exp, const Coefficient& c) {
    LaurentPoly p(exp.size());
    if (c != 0) p.terms_.push_back({std::move(exp), c});
    return p;
  }

  /// Builds from an arbitrary term list: merges duplicate exponents and
  /// drops zero coefficients.
  static LaurentPoly from_terms(std::size_t rank, std::vector<Term> terms) {
    for (const auto& t : terms)
      if (t.exp.size() != rank) throw RankMismatch(t.exp.size(), rank);
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.exp < b.exp; });
    LaurentPoly p(rank);
    for (auto& t : terms) {
      if (!p.terms_.empty() && p.terms_.back().exp == t.exp) {
        p.terms_.back().coeff += t.coeff;
      } else {
        if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
        p.terms_.push_back(std::move(t));
      }
    }
    if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
    return p;
  }

  std::size_t rank() const { return rank_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_monomial() const { return terms_.size() == 1; }

  /// Componentwise minimum exponent over all terms (zero vector for p = 0).
  ExponentVector min_exponents() const {
    if (terms_.empty()) return ExponentVector(rank_, 0);
    ExponentVector m = terms_.front().exp;
    for (const auto& t : terms_)
      for (std::size_t i = 0; i < rank_; ++i) m[i] = std::min(m[i], t.exp[i]);
    return m;
  }

  /// Multiplication by the monomial x^shift.
  LaurentPoly shifted(const ExponentVector& shift) const {
    if (shift.size() != rank_) throw RankMismatch(shift.size(), rank_);
    LaurentPoly p(rank_);
    p.terms_.reserve(terms_.size());
    // Adding a fixed vector preserves lexicographic order.
    for (const auto& t : terms_) p.terms_.push_back({detail::add_exponents(t.exp, shift), t.coeff});
    return p;
  }

  LaurentPoly operator-() const {
    LaurentPoly p = *this;
    for (auto& t : p.terms_) t.coeff = -t.coeff;
    return p;
  }

  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
    return merge(a, b, false);
  }
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) {
    return merge(a, b, true);
  }

  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);

  LaurentPoly& operator+=(const LaurentPoly& o) { return *this = *this + o; }
  LaurentPoly& operator-=(const LaurentPoly& o) { return *this = *this - o; }
  LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }

  /// Non-negative integer power by repeated squaring.
  LaurentPoly pow(unsigned k) const {
    LaurentPoly result = one(rank_);
    LaurentPoly base = *this;
    while (k) {
      if (k & 1u) result *= base;
      k >>= 1u;
      if (k) base *= base;
    }
    return result;
  }

  bool operator==(const LaurentPoly&) const = default;

  /// Evaluates at a rational point; every variable with a negative exponent
  /// must be nonzero there.
  mpq_class evaluate(std::span<const mpq_class> point) const {
    if (point.size() != rank_) throw RankMismatch(point.size(), rank_);
    mpq_class sum = 0;
    for (const auto& t : terms_) {
      mpq_class v = t.coeff;
      for (std::size_t i = 0; i < rank_; ++i) {
        int e = t.exp[i];
        if (e == 0) continue;
        if (e < 0 && point[i] == 0) throw std::domain_error("evaluation at a pole");
        mpq_class base = e > 0 ? point[i] : mpq_class(1) / point[i];
        for (int j = 0; j < std::abs(e); ++j) v *= base;
      }
      sum += v;
    }
    return sum;
  }

  /// Variables print as <prefix>1, <prefix>2, ...
  std::string to_string(const std::string& prefix = "x") const;

 private:
  LaurentPoly scaled_shift(const Term& m) const {
    LaurentPoly p(rank_);
    p.terms_.reserve(terms_.size());
    for (const auto& t : terms_)
      p.terms_.push_back({detail::add_exponents(t.exp, m.exp), t.coeff * m.coeff});
    return p;
  }

  static LaurentPoly merge(const LaurentPoly& a, const LaurentPoly& b, bool subtract) {
    if (a.rank_ != b.rank_) throw RankMismatch(a.rank_, b.rank_);
    LaurentPoly p(a.rank_);
    p.terms_.reserve(a.terms_.size() + b.terms_.size());
    auto i = a.terms_.begin();
    auto j = b.terms_.begin();
    while (i != a.terms_.end() || j != b.terms_.end()) {
      if (j == b.terms_.end() || (i != a.terms_.end() && i->exp < j->exp)) {
        p.terms_.push_back(*i++);
      } else if (i == a.terms_.end() || j->exp < i->exp) {
        p.terms_.push_back({j->exp, subtract ? Coefficient(-j->coeff) : j->coeff});
        ++j;
      } else {
        Coefficient c = subtract ? Coefficient(i->coeff - j->coeff) : Coefficient(i->coeff + j->coeff);
        if (c != 0) p.terms_.push_back({i->exp, std::move(c)});
        ++i;
        ++j;
      }
    }
    return p;
  }

  std::size_t rank_ = 0;
  std::vector<Term> terms_;
};

namespace detail {

inline LaurentPoly schoolbook_mul(const LaurentPoly& a, const LaurentPoly& b) {
  std::map<ExponentVector, Coefficient> acc;
  for (const auto& s : a.terms())
    for (const auto& t : b.terms()) {
      auto [it, inserted] = acc.try_emplace(add_exponents(s.exp, t.exp));
      mpz_addmul(it->second.get_mpz_t(), s.coeff.get_mpz_t(), t.coeff.get_mpz_t());
    }
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto& [e, c] : acc)
    if (c != 0) out.push_back({e, std::move(c)});
  return LaurentPoly::from_terms(a.rank(), std::move(out));
}

// Kronecker substitution for polynomials with nonnegative coefficients: a
// polynomial with exponents below extent[i] and coefficients below 2^(64*limbs)
// is stored as its value at x_i = 2^(64*limbs*stride[i]), so that a product
// becomes a single GMP integer multiplication.
struct PackLayout {
  std::vector<int> extent;
  std::vector<std::size_t> stride;
  std::size_t digits = 1;
  std::size_t limbs = 1;
};

inline constexpr std::size_t kPackMinWork = 256;
inline constexpr std::size_t kPackMaxWords = std::size_t{1} << 27;
// Packed division pays off only when the grid is this much smaller than the
// term-by-term work.
inline constexpr std::size_t kPackDivRatio = 32;

inline bool nonnegative(const LaurentPoly& p) {
  for (const auto& t : p.terms())
    if (t.coeff < 0) return false;
  return true;
}

inline Coefficient l1_norm(const LaurentPoly& p) {
  Coefficient s = 0;
  for (const auto& t : p.terms()) s += abs(t.coeff);
  return s;
}

inline Coefficient max_norm(const LaurentPoly& p) {
  Coefficient m = 0;
  for (const auto& t : p.terms())
    if (abs(t.coeff) > m) m = abs(t.coeff);
  return m;
}

inline ExponentVector max_exponents(const LaurentPoly& p) {
  ExponentVector m = p.terms().front().exp;
  for (const auto& t : p.terms())
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::max(m[i], t.exp[i]);
  return m;
}

// Layout with the given extents whose digits hold any value below `bound`;
// nullopt when the grid exceeds the term-by-term work or the size cap.
inline std::optional<PackLayout> make_layout(std::vector<int> extent, const Coefficient& bound,
                                             std::size_t work) {
  PackLayout L;
  L.extent = std::move(extent);
  L.stride.resize(L.extent.size());
  for (std::size_t i = 0; i < L.extent.size(); ++i) {
    L.stride[i] = L.digits;
    L.digits *= static_cast<std::size_t>(L.extent[i]);
    if (L.digits > work) return std::nullopt;
  }
  L.limbs = (mpz_sizeinbase(bound.get_mpz_t(), 2) + 64) / 64;
  if (L.digits * L.limbs > kPackMaxWords) return std::nullopt;
  return L;
}

// p must have nonnegative exponents inside the layout and digits that fit.
inline mpz_class pack(const LaurentPoly& p, const PackLayout& L) {
  std::vector<std::uint64_t> buf(L.digits * L.limbs, 0);
  for (const auto& t : p.terms()) {
    std::size_t at = 0;
    for (std::size_t i = 0; i < t.exp.size(); ++i) at += static_cast<std::size_t>(t.exp[i]) * L.stride[i];
    if (mpz_sizeinbase(t.coeff.get_mpz_t(), 2) > 64 * L.limbs)
      throw std::logic_error("packed coefficient overflow");
    mpz_export(&buf[at * L.limbs], nullptr, -1, sizeof(std::uint64_t), 0, 0, t.coeff.get_mpz_t());
  }
  mpz_class v;
  mpz_import(v.get_mpz_t(), buf.size(), -1, sizeof(std::uint64_t), 0, 0, buf.data());
  return v;
}

// Inverse of pack for v >= 0; nullopt when v does not fit the layout.
inline std::optional<LaurentPoly> unpack(const mpz_class& v, const PackLayout& L) {
  const std::size_t words = L.digits * L.limbs;
  if (sgn(v) < 0 || (mpz_sizeinbase(v.get_mpz_t(), 2) + 63) / 64 > words) return std::nullopt;
  std::vector<std::uint64_t> buf(words, 0);
  mpz_export(buf.data(), nullptr, -1, sizeof(std::uint64_t), 0, 0, v.get_mpz_t());
  std::vector<Term> out;
  for (std::size_t d = 0; d < L.digits; ++d) {
    const std::uint64_t* chunk = &buf[d * L.limbs];
    if (std::all_of(chunk, chunk + L.limbs, [](std::uint64_t w) { return w == 0; })) continue;
    Term t;
    t.exp.resize(L.extent.size());
    std::size_t rest = d;
    for (std::size_t i = 0; i < L.extent.size(); ++i) {
      t.exp[i] = static_cast<int>(rest % static_cast<std::size_t>(L.extent[i]));
      rest /= static_cast<std::size_t>(L.extent[i]);
    }
    mpz_import(t.coeff.get_mpz_t(), L.limbs, -1, sizeof(std::uint64_t), 0, 0, chunk);
    out.push_back(std::move(t));
  }
  return LaurentPoly::from_terms(L.extent.size(), std::move(out));
}

/// Product through one big-integer multiplication; nullopt when either
/// factor has a negative coefficient or the packing is unsuitable.
inline std::optional<LaurentPoly> packed_mul(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.is_zero() || b.is_zero() || !nonnegative(a) || !nonnegative(b)) return std::nullopt;
  const ExponentVector sa = a.min_exponents(), sb = b.min_exponents();
  const LaurentPoly pa = a.shifted(sub_exponents(ExponentVector(sa.size(), 0), sa));
  const LaurentPoly pb = b.shifted(sub_exponents(ExponentVector(sb.size(), 0), sb));
  const ExponentVector da = max_exponents(pa), db = max_exponents(pb);
  std::vector<int> extent(da.size());
  for (std::size_t i = 0; i < extent.size(); ++i) extent[i] = da[i] + db[i] + 1;
  // Every product coefficient is at most |a|_1 * |b|_inf.
  const auto L = make_layout(std::move(extent), l1_norm(pa) * max_norm(pb), a.size() * b.size());
  if (!L) return std::nullopt;
  const mpz_class v = pack(pa, *L) * pack(pb, *L);
  auto prod = unpack(v, *L);
  if (!prod) throw std::logic_error("packed product out of range");
  return prod->shifted(add_exponents(sa, sb));
}

/// Quotient through one big-integer division.  Only a nonnegative quotient
/// whose repacked product cannot carry is accepted; nullopt means "undecided".
inline std::optional<LaurentPoly> packed_div(const LaurentPoly& a, const LaurentPoly& b,
                                            std::size_t ratio = kPackDivRatio) {
  if (a.is_zero() || b.is_zero() || !nonnegative(a) || !nonnegative(b)) return std::nullopt;
  const ExponentVector sa = a.min_exponents(), sb = b.min_exponents();
  const LaurentPoly pa = a.shifted(sub_exponents(ExponentVector(sa.size(), 0), sa));
  const LaurentPoly pb = b.shifted(sub_exponents(ExponentVector(sb.size(), 0), sb));
  const ExponentVector da = max_exponents(pa);
  std::vector<int> extent(da.size());
  for (std::size_t i = 0; i < extent.size(); ++i) extent[i] = da[i] + 1;
  const Coefficient bmax = max_norm(pb);
  const std::size_t work = a.size() * b.size() / ratio;
  const auto L = make_layout(std::move(extent), l1_norm(pa) * bmax, work);
  if (!L || L->digits * L->limbs > work) return std::nullopt;
  const mpz_class A = pack(pa, *L), B = pack(pb, *L);
  mpz_class q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), A.get_mpz_t(), B.get_mpz_t());
  if (r != 0) return std::nullopt;
  auto quot = unpack(q, *L);
  if (!quot || quot->is_zero()) return std::nullopt;
  const ExponentVector dq = max_exponents(*quot), db = max_exponents(pb);
  for (std::size_t i = 0; i < da.size(); ++i)
    if (dq[i] + db[i] > da[i]) return std::nullopt;
  if (mpz_sizeinbase(Coefficient(l1_norm(*quot) * bmax).get_mpz_t(), 2) > 64 * L->limbs) return std::nullopt;
  return quot->shifted(sub_exponents(sa, sb));
}

// Both operands are shifted into the polynomial subring and reduced by the
// single divisor under graded-lex order; any leading term that the divisor's
// leading term cannot cancel (monomial or integer coefficient) proves
// non-divisibility.
inline std::optional<LaurentPoly> reduce_div(const LaurentPoly& a, const LaurentPoly& b) {
  const std::size_t n = a.rank();
  if (a.is_zero()) return LaurentPoly(n);

  if (b.is_monomial()) {
    const Term& m = b.terms().front();
    std::vector<Term> out;
    out.reserve(a.size());
    for (const auto& t : a.terms()) {
      if (!mpz_divisible_p(t.coeff.get_mpz_t(), m.coeff.get_mpz_t())) return std::nullopt;
      Coefficient q;
      mpz_divexact(q.get_mpz_t(), t.coeff.get_mpz_t(), m.coeff.get_mpz_t());
      out.push_back({detail::sub_exponents(t.exp, m.exp), std::move(q)});
    }
    return LaurentPoly::from_terms(n, std::move(out));
  }

  const ExponentVector sa = a.min_exponents();
  const ExponentVector sb = b.min_exponents();

  std::vector<Term> divisor;
  divisor.reserve(b.size());
  for (const auto& t : b.terms()) divisor.push_back({detail::sub_exponents(t.exp, sb), t.coeff});
  std::sort(divisor.begin(), divisor.end(), [](const Term& x, const Term& y) {
    return detail::GrlexGreater{}(x.exp, y.exp);
  });
  const Term& lead = divisor.front();

  // Keyed by (total degree, exponents) under std::greater: graded lex.
  using Key = std::pair<long, ExponentVector>;
  auto key = [](ExponentVector e) {
    long d = 0;
    for (int x : e) d += x;
    return Key(d, std::move(e));
  };
  std::map<Key, Coefficient, std::greater<>> rem;
  for (const auto& t : a.terms()) rem.emplace(key(detail::sub_exponents(t.exp, sa)), t.coeff);

  std::vector<Term> quotient;
  while (!rem.empty()) {
    auto top = rem.begin();
    if (!detail::divides(lead.exp, top->first.second)) return std::nullopt;
    if (!mpz_divisible_p(top->second.get_mpz_t(), lead.coeff.get_mpz_t())) return std::nullopt;
    Coefficient qc;
    mpz_divexact(qc.get_mpz_t(), top->second.get_mpz_t(), lead.coeff.get_mpz_t());
    ExponentVector qe = detail::sub_exponents(top->first.second, lead.exp);
    rem.erase(top);
    for (std::size_t k = 1; k < divisor.size(); ++k) {
      auto [it, inserted] = rem.try_emplace(key(detail::add_exponents(divisor[k].exp, qe)));
      mpz_submul(it->second.get_mpz_t(), qc.get_mpz_t(), divisor[k].coeff.get_mpz_t());
      if (it->second == 0) rem.erase(it);
    }
    quotient.push_back({std::move(qe), std::move(qc)});
  }
  return LaurentPoly::from_terms(n, std::move(quotient)).shifted(detail::sub_exponents(sa, sb));
}

}  // namespace detail

inline LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.rank_ != b.rank_) throw RankMismatch(a.rank_, b.rank_);
  if (a.is_zero() || b.is_zero()) return LaurentPoly(a.rank_);
  if (b.is_monomial()) return a.scaled_shift(b.terms_.front());
  if (a.is_monomial()) return b.scaled_shift(a.terms_.front());
  if (a.size() * b.size() >= detail::kPackMinWork)
    if (auto p = detail::packed_mul(a, b)) return std::move(*p);
  return detail::schoolbook_mul(a, b);
}

/// Exact quotient a / b in the Laurent ring, or std::nullopt when b does not
/// divide a.
inline std::optional<LaurentPoly> div_exact(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.rank() != b.rank()) throw RankMismatch(a.rank(), b.rank());
  if (b.is_zero()) throw std::domain_error("division by the zero polynomial");
  if (a.size() * b.size() >= detail::kPackMinWork)
    if (auto q = detail::packed_div(a, b)) return q;
  return detail::reduce_div(a, b);
}

/// Exponent vector d with p = numerator / prod x_i^{d_i} in reduced form.
struct DenVector {
  std::vector<int> entries;

  bool operator==(const DenVector&) const = default;
  int operator[](std::size_t i) const { return entries.at(i); }
  std::size_t size() const { return entries.size(); }
};

inline DenVector den_vector(const LaurentPoly& p) {
  if (p.is_zero()) throw std::domain_error("the zero polynomial has no denominator vector");
  DenVector d{p.min_exponents()};
  for (int& e : d.entries) e = -e;
  return d;
}

/// True iff x_i occurs in the reduced denominator of p.
inline bool has_var_in_denominator(const LaurentPoly& p, std::size_t i) {
  if (i >= p.rank()) throw std::out_of_range("variable index out of range");
  return den_vector(p)[i] > 0;
}

/// Numerator polynomial p * prod x_i^{d_i}; not divisible by any x_i.
inline LaurentPoly numerator(const LaurentPoly& p) {
  return p.is_zero() ? p : p.shifted(den_vector(p).entries);
}

/// Total order used for canonical keys and sorted variable lists.  Terms are
/// visited from the lexicographically highest exponent down; at the first
/// difference a higher exponent sorts first, then a smaller coefficient, and
/// a polynomial that runs out of terms sorts first.  With x_1 most
/// significant this gives x_1 < x_2 < ... < x_n.
inline std::strong_ordering compare(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.rank() != b.rank()) throw RankMismatch(a.rank(), b.rank());
  auto i = a.terms().rbegin();
  auto j = b.terms().rbegin();
  for (; i != a.terms().rend() && j != b.terms().rend(); ++i, ++j) {
    if (i->exp != j->exp) return i->exp > j->exp ? std::strong_ordering::less : std::strong_ordering::greater;
    int c = cmp(i->coeff, j->coeff);
    if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (i == a.terms().rend() && j == b.terms().rend()) return std::strong_ordering::equal;
  return i == a.terms().rend() ? std::strong_ordering::less : std::strong_ordering::greater;
}

struct LaurentLess {
  bool operator()(const LaurentPoly& a, const LaurentPoly& b) const { return compare(a, b) < 0; }
};

/// Unreduced quotient of two Laurent polynomials.
class LaurentFraction {
 public:
  LaurentFraction(LaurentPoly num, LaurentPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (num_.rank() != den_.rank()) throw RankMismatch(num_.rank(), den_.rank());
    if (den_.is_zero()) throw std::domain_error("fraction with zero denominator");
  }
  explicit LaurentFraction(LaurentPoly p) : LaurentFraction(p, LaurentPoly::one(p.rank())) {}

  const LaurentPoly& num() const { return num_; }
  const LaurentPoly& den() const { return den_; }
  std::size_t rank() const { return num_.rank(); }

  /// The Laurent polynomial this fraction equals, if there is one.
  std::optional<LaurentPoly> as_laurent() const { return div_exact(num_, den_); }

 private:
  LaurentPoly num_;
  LaurentPoly den_;
};

inline bool fraction_equal(const LaurentFraction& a, const LaurentFraction& b) {
  return a.num() * b.den() == b.num() * a.den();
}

/// Evaluates p at x_i := images[i] over the common denominator
/// prod_i den_i^{P_i} num_i^{N_i}, where P_i and N_i are the largest positive
/// and negative exponents of x_i in p.  No gcd reduction is done.
inline LaurentFraction substitute(const LaurentPoly& p, std::span<const LaurentFraction> images) {
  if (images.size() != p.rank()) throw RankMismatch(images.size(), p.rank());
  if (images.empty()) throw std::invalid_argument("substitute needs at least one image");
  const std::size_t m = images.front().rank();
  for (const auto& im : images)
    if (im.rank() != m) throw RankMismatch(im.rank(), m);

  const std::size_t n = p.rank();
  std::vector<int> pos(n, 0), neg(n, 0);
  for (const auto& t : p.terms())
    for (std::size_t i = 0; i < n; ++i) {
      pos[i] = std::max(pos[i], t.exp[i]);
      neg[i] = std::max(neg[i], -t.exp[i]);
    }

  // Cached powers: num_pow[i][e] = num_i^e for e <= pos+neg, likewise den.
  std::vector<std::vector<LaurentPoly>> num_pow(n), den_pow(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int top = pos[i] + neg[i];
    num_pow[i].push_back(LaurentPoly::one(m));
    den_pow[i].push_back(LaurentPoly::one(m));
    for (int e = 1; e <= top; ++e) {
      num_pow[i].push_back(num_pow[i].back() * images[i].num());
      den_pow[i].push_back(den_pow[i].back() * images[i].den());
    }
  }

  LaurentPoly numer(m);
  for (const auto& t : p.terms()) {
    LaurentPoly term = LaurentPoly::constant(m, t.coeff);
    for (std::size_t i = 0; i < n; ++i) {
      const int e = t.exp[i];
      term *= num_pow[i][e + neg[i]];
      term *= den_pow[i][pos[i] - e];
    }
    numer += term;
  }
  LaurentPoly denom = LaurentPoly::one(m);
  for (std::size_t i = 0; i < n; ++i) {
    denom *= num_pow[i][neg[i]];
    denom *= den_pow[i][pos[i]];
  }
  return LaurentFraction(std::move(numer), std::move(denom));
}

inline LaurentFraction substitute(const LaurentPoly& p, std::span<const LaurentPoly> images) {
  std::vector<LaurentFraction> fr;
  fr.reserve(images.size());
  for (const auto& im : images) fr.emplace_back(im);
  return substitute(p, std::span<const LaurentFraction>(fr));
}

/// Human-readable form, e.g. "(x1^2 + 2*x1*x3 + x2 + x3^2)/(x1*x2*x3)".
inline std::string LaurentPoly::to_string(const std::string& prefix) const {
  if (is_zero()) return "0";
  const DenVector d = den_vector(*this);
  auto mono = [&prefix](const ExponentVector& e) {
    std::string s;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!s.empty()) s += '*';
      s += prefix + std::to_string(i + 1);
      if (e[i] != 1) s += '^' + std::to_string(e[i]);
    }
    return s;
  };
  ExponentVector den_exp(rank_, 0);
  for (std::size_t i = 0; i < rank_; ++i) den_exp[i] = std::max(0, d[i]);
  std::string num;
  const LaurentPoly numer = shifted(den_exp);
  const auto& ts = numer.terms();
  for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
    Coefficient c = it->coeff;
    const std::string m = mono(it->exp);
    if (num.empty()) {
      if (c < 0) {
        num += '-';
        c = -c;
      }
    } else {
      num += c < 0 ? " - " : " + ";
      if (c < 0) c = -c;
    }
    if (m.empty()) {
      num += c.get_str();
    } else {
      if (c != 1) num += c.get_str() + '*';
      num += m;
    }
  }
  const std::string den = mono(den_exp);
  if (den.empty()) return num;
  if (ts.size() > 1) num = '(' + num + ')';
  if (den.find('*') != std::string::npos) return num + "/(" + den + ')';
  return num + '/' + den;
}

// Canonical JSON: {"rank": n, "terms": [{"exp": [...], "coeff": "<decimal>"}...]},
// terms in ascending lexicographic exponent order.
inline nlohmann::json to_json(const LaurentPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : p.terms()) terms.push_back({{"exp", t.exp}, {"coeff", t.coeff.get_str()}});
  return {{"rank", p.rank()}, {"terms", std::move(terms)}};
}

inline LaurentPoly laurent_from_json(const nlohmann::json& j) {
  const auto rank = j.at("rank").get<std::size_t>();
  if (rank == 0) throw std::invalid_argument("rank must be positive");
  std::vector<Term> terms;
  for (const auto& t : j.at("terms")) {
    Term term{t.at("exp").get<ExponentVector>(), Coefficient()};
    const auto& c = t.at("coeff");
    if (c.is_string()) {
      if (term.coeff.set_str(c.get<std::string>(), 10) != 0)
        throw std::invalid_argument("bad coefficient: " + c.get<std::string>());
    } else {
      term.coeff = c.get<long>();
    }
    terms.push_back(std::move(term));
  }
  return LaurentPoly::from_terms(rank, std::move(terms));
}

}  // namespace cluster
