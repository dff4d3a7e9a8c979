#pragma once

// Exact rational scalars backed by GMP. No floating point anywhere in the
// library: every quantity is an arbitrary-precision integer or a reduced
// fraction with positive denominator.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fulton {

using Int = mpz_class;
using Rat = mpq_class;

inline int sign(const Rat& q) { return sgn(q); }

// Canonical text encoding: "p/q" with gcd(p,q)=1 and q>0, or "p" when q=1.
inline std::string rat_str(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::string int_str(const Int& z) { return z.get_str(); }

inline bool valid_int_text(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

inline Int int_parse(const std::string& text) {
  if (!valid_int_text(text)) throw std::invalid_argument("bad integer: '" + text + "'");
  return Int(text[0] == '+' ? text.substr(1) : text);
}

// Parses the canonical encoding (also accepts unreduced "p/q"; the result is
// always reduced with positive denominator).
inline Rat rat_parse(const std::string& text) {
  std::size_t slash = text.find('/');
  Int num = int_parse(slash == std::string::npos ? text : text.substr(0, slash));
  Int den = slash == std::string::npos ? Int(1) : int_parse(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline Rat rat_of(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rat q(Int(static_cast<long>(num)), Int(static_cast<long>(den)));
  q.canonicalize();
  return q;
}

}  // namespace fulton
