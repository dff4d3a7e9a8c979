#pragma once

// Integer linear forms in fixed ambient coordinates. A LinForm is always kept
// normalized: entries are integers with content gcd 1 and the inequality
// direction (overall sign) is semantic, so normalization never flips signs.

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "fultoncones/rational.hpp"

namespace fulton {

struct LinForm {
  std::vector<std::int64_t> c;

  LinForm() = default;
  explicit LinForm(std::size_t dim) : c(dim, 0) {}
  explicit LinForm(std::vector<std::int64_t> coeffs) : c(std::move(coeffs)) {}

  std::size_t dim() const { return c.size(); }
  bool is_zero() const {
    for (auto v : c)
      if (v != 0) return false;
    return true;
  }
  std::size_t support_size() const {
    std::size_t k = 0;
    for (auto v : c) k += (v != 0);
    return k;
  }

  // Divides out the content gcd; sign preserved.
  void normalize() {
    std::uint64_t g = 0;
    for (auto v : c) {
      g = std::gcd(g, v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1
                            : static_cast<std::uint64_t>(v));
      if (g == 1) return;
    }
    if (g <= 1) return;
    for (auto& v : c) v /= static_cast<std::int64_t>(g);
  }

  LinForm normalized() const {
    LinForm f = *this;
    f.normalize();
    return f;
  }

  std::int64_t eval(const std::vector<std::int64_t>& x) const {
    if (x.size() != c.size()) throw std::invalid_argument("dimension mismatch");
    __int128 acc = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      acc += static_cast<__int128>(c[i]) * x[i];
    if (acc > INT64_MAX || acc < INT64_MIN) throw std::overflow_error("eval overflow");
    return static_cast<std::int64_t>(acc);
  }

  Rat eval(const std::vector<Rat>& x) const {
    if (x.size() != c.size()) throw std::invalid_argument("dimension mismatch");
    Rat acc = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0) acc += Rat(static_cast<long>(c[i])) * x[i];
    return acc;
  }

  friend bool operator==(const LinForm& a, const LinForm& b) { return a.c == b.c; }
  friend bool operator!=(const LinForm& a, const LinForm& b) { return !(a == b); }
  friend bool operator<(const LinForm& a, const LinForm& b) { return a.c < b.c; }
};

// a*f + b*g with overflow checking (used for the pair combinations of the
// parameter-elimination step).
inline LinForm combine(std::int64_t a, const LinForm& f, std::int64_t b, const LinForm& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("dimension mismatch");
  LinForm out(f.dim());
  for (std::size_t i = 0; i < f.dim(); ++i) {
    __int128 v = static_cast<__int128>(a) * f.c[i] + static_cast<__int128>(b) * g.c[i];
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("combine overflow");
    out.c[i] = static_cast<std::int64_t>(v);
  }
  return out;
}

struct LinFormHash {
  std::size_t operator()(const LinForm& f) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (auto v : f.c) {
      auto u = static_cast<std::uint64_t>(v);
      for (int k = 0; k < 8; ++k) {
        h ^= (u >> (8 * k)) & 0xff;
        h *= 1099511628211ull;
      }
    }
    return static_cast<std::size_t>(h);
  }
};

inline std::string linform_str(const LinForm& f) {
  std::string s;
  for (std::size_t i = 0; i < f.dim(); ++i) {
    if (i) s += ' ';
    s += std::to_string(f.c[i]);
  }
  return s;
}

}  // namespace fulton
