#pragma once

// Dense exact-rational matrices: reduced row echelon form, rank, linear
// solving, and integer null spaces. Problem sizes in this project are small
// (at most a few hundred rows, <= 56 columns), so everything is dense.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fultoncones/linform.hpp"
#include "fultoncones/rational.hpp"

namespace fulton {

struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<Rat> a;  // row-major

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, Rat(0)) {}

  Rat& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  const Rat& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

  static Mat from_rows(const std::vector<std::vector<Rat>>& rows_in) {
    if (rows_in.empty()) return Mat();
    Mat m(rows_in.size(), rows_in[0].size());
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (rows_in[r].size() != m.cols) throw std::invalid_argument("ragged rows");
      for (std::size_t c = 0; c < m.cols; ++c) m.at(r, c) = rows_in[r][c];
    }
    return m;
  }

  static Mat from_forms(const std::vector<LinForm>& forms) {
    if (forms.empty()) return Mat();
    Mat m(forms.size(), forms[0].dim());
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (forms[r].dim() != m.cols) throw std::invalid_argument("ragged forms");
      for (std::size_t c = 0; c < m.cols; ++c)
        m.at(r, c) = Rat(static_cast<long>(forms[r].c[c]));
    }
    return m;
  }

  std::vector<Rat> row(std::size_t r) const {
    return std::vector<Rat>(a.begin() + r * cols, a.begin() + (r + 1) * cols);
  }

  friend bool operator==(const Mat& x, const Mat& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }
};

struct RrefResult {
  Mat m;
  std::vector<std::size_t> pivots;  // pivot column per nonzero row, strictly increasing
};

inline RrefResult rref(Mat m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t p = r;
    while (p < m.rows && m.at(p, c) == 0) ++p;
    if (p == m.rows) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(p, j), m.at(r, j));
    Rat inv = m.at(r, c);
    for (std::size_t j = c; j < m.cols; ++j) m.at(r, j) /= inv;
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      Rat f = m.at(i, c);
      for (std::size_t j = c; j < m.cols; ++j) m.at(i, j) -= f * m.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const Mat& m) { return rref(m).pivots.size(); }

// Exact coefficients c with sum_i c_i * basis_rows_i = target, or nullopt.
inline std::optional<std::vector<Rat>> solve_in_span(const Mat& basis_rows,
                                                     const std::vector<Rat>& target) {
  if (basis_rows.rows == 0)
    return std::nullopt;
  if (target.size() != basis_rows.cols) throw std::invalid_argument("dimension mismatch");
  // Solve A^T c = target via rref of [A^T | target].
  Mat aug(basis_rows.cols, basis_rows.rows + 1);
  for (std::size_t r = 0; r < basis_rows.rows; ++r)
    for (std::size_t c = 0; c < basis_rows.cols; ++c) aug.at(c, r) = basis_rows.at(r, c);
  for (std::size_t c = 0; c < basis_rows.cols; ++c) aug.at(c, basis_rows.rows) = target[c];
  RrefResult rr = rref(std::move(aug));
  std::vector<Rat> sol(basis_rows.rows, Rat(0));
  for (std::size_t i = 0; i < rr.pivots.size(); ++i) {
    if (rr.pivots[i] == basis_rows.rows) return std::nullopt;  // pivot in target column
    sol[rr.pivots[i]] = rr.m.at(i, basis_rows.rows);
  }
  return sol;
}

// Integer basis of the null space {x : rows * x = 0}, denominators cleared.
inline std::vector<std::vector<std::int64_t>> null_space_int(
    const std::vector<std::vector<std::int64_t>>& rows_in, std::size_t dim) {
  Mat m(rows_in.size(), dim);
  for (std::size_t r = 0; r < rows_in.size(); ++r) {
    if (rows_in[r].size() != dim) throw std::invalid_argument("ragged rows");
    for (std::size_t c = 0; c < dim; ++c) m.at(r, c) = Rat(static_cast<long>(rows_in[r][c]));
  }
  RrefResult rr = rref(std::move(m));
  std::vector<bool> is_pivot(dim, false);
  for (auto p : rr.pivots) is_pivot[p] = true;
  std::vector<std::vector<std::int64_t>> basis;
  for (std::size_t f = 0; f < dim; ++f) {
    if (is_pivot[f]) continue;
    // x_f = 1, other free vars 0, pivot vars from the echelon form.
    std::vector<Rat> x(dim, Rat(0));
    x[f] = 1;
    for (std::size_t i = 0; i < rr.pivots.size(); ++i) x[rr.pivots[i]] = -rr.m.at(i, f);
    Int lcm = 1;
    for (auto& v : x) lcm = ::lcm(lcm, v.get_den());
    std::vector<std::int64_t> xi(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      Int v = x[c].get_num() * (lcm / x[c].get_den());
      if (!v.fits_slong_p()) throw std::overflow_error("null space entry overflow");
      xi[c] = v.get_si();
    }
    basis.push_back(std::move(xi));
  }
  return basis;
}

// Rank of a small integer matrix by fraction-free elimination; falls back to
// rational arithmetic if an intermediate product would overflow.
inline std::size_t int_rank(std::vector<std::vector<std::int64_t>> rows, std::size_t dim) {
  auto mul = [](__int128 x, __int128 y, bool& ovf) {
    __int128 r;
    if (__builtin_mul_overflow(x, y, &r)) ovf = true;
    return r;
  };
  std::vector<std::vector<__int128>> m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) throw std::invalid_argument("ragged rows");
    m[i].assign(rows[i].begin(), rows[i].end());
  }
  bool ovf = false;
  __int128 prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < dim && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    for (std::size_t i = r + 1; i < m.size(); ++i) {
      for (std::size_t j = c + 1; j < dim; ++j) {
        __int128 v;
        if (__builtin_sub_overflow(mul(m[i][j], m[r][c], ovf), mul(m[i][c], m[r][j], ovf), &v))
          ovf = true;
        m[i][j] = ovf ? 0 : v / prev;
      }
      m[i][c] = 0;
    }
    if (ovf) {
      Mat rm(rows.size(), dim);
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < dim; ++j) rm.at(i, j) = Rat(static_cast<long>(rows[i][j]));
      return rank(rm);
    }
    prev = m[r][c];
    ++r;
  }
  return r;
}

}  // namespace fulton
