#pragma once

#include <cassert>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "vers/errors.hpp"
#include "vers/rng.hpp"

namespace vers {

// Residue in [0, p). Plain value; all arithmetic goes through PrimeField,
// which owns the modulus.
struct FieldElement {
  std::uint64_t value = 0;

  friend bool operator==(FieldElement, FieldElement) = default;
};

inline std::ostream& operator<<(std::ostream& os, FieldElement e) {
  return os << e.value;
}

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b,
                                std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp,
                                std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) r = mulmod_u64(r, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return r;
}

// Miller-Rabin with the witness set that is deterministic for all n < 2^64.
inline bool is_prime_u64(std::uint64_t n) {
  constexpr std::uint64_t witnesses[] = {2,  3,  5,  7,  11, 13,
                                         17, 19, 23, 29, 31, 37};
  if (n < 2) return false;
  for (std::uint64_t w : witnesses) {
    if (n % w == 0) return n == w;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t w : witnesses) {
    std::uint64_t x = powmod_u64(w, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace detail

// Arithmetic context for GF(p). Cheap to copy. Every operation returns a
// reduced residue; inv(0) throws DivisionByZero.
class PrimeField {
 public:
  explicit PrimeField(std::uint64_t p) : p_(p) {
    if (!detail::is_prime_u64(p)) {
      throw InvalidConfig("field modulus must be prime, got " +
                          std::to_string(p));
    }
  }

  std::uint64_t modulus() const { return p_; }

  FieldElement zero() const { return {0}; }
  FieldElement one() const { return {1 % p_}; }

  FieldElement from_uint(std::uint64_t v) const { return {v % p_}; }

  FieldElement from_int(std::int64_t v) const {
    auto m = static_cast<__int128>(p_);
    __int128 r = v % m;
    if (r < 0) r += m;
    return {static_cast<std::uint64_t>(r)};
  }

  bool is_zero(FieldElement a) const { return a.value == 0; }

  FieldElement add(FieldElement a, FieldElement b) const {
    std::uint64_t s = a.value + b.value;
    if (s < a.value || s >= p_) s -= p_;
    return {s};
  }

  FieldElement sub(FieldElement a, FieldElement b) const {
    std::uint64_t d = a.value - b.value;
    if (a.value < b.value) d += p_;
    return {d};
  }

  FieldElement neg(FieldElement a) const {
    return {a.value == 0 ? 0 : p_ - a.value};
  }

  FieldElement mul(FieldElement a, FieldElement b) const {
    return {detail::mulmod_u64(a.value, b.value, p_)};
  }

  FieldElement inv(FieldElement a) const {
    if (a.value == 0) throw DivisionByZero("inverse of zero");
    return {detail::powmod_u64(a.value, p_ - 2, p_)};
  }

  FieldElement div(FieldElement a, FieldElement b) const {
    return mul(a, inv(b));
  }

  FieldElement pow(FieldElement a, std::uint64_t e) const {
    return {detail::powmod_u64(a.value, e, p_)};
  }

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint64_t p_;
};

inline FieldElement uniform_element(const PrimeField& field, Rng& rng) {
  return {rng.uniform_below(field.modulus())};
}

inline FieldElement uniform_nonzero(const PrimeField& field, Rng& rng) {
  return {1 + rng.uniform_below(field.modulus() - 1)};
}

// Dense row-major matrix over GF(p). Pure container; elimination, rank and
// kernels are free functions that take the field context.
class FieldMatrix {
 public:
  FieldMatrix() = default;
  FieldMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  FieldElement& at(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  FieldElement at(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  const std::vector<FieldElement>& entries() const { return data_; }

  void swap_rows(std::size_t a, std::size_t b) {
    assert(a < rows_ && b < rows_);
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) {
      std::swap(data_[a * cols_ + c], data_[b * cols_ + c]);
    }
  }

  std::vector<FieldElement> row(std::size_t r) const {
    assert(r < rows_);
    return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
  }

  friend bool operator==(const FieldMatrix&, const FieldMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<FieldElement> data_;
};

inline FieldMatrix identity_matrix(const PrimeField& field, std::size_t n) {
  FieldMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = field.one();
  return m;
}

inline FieldMatrix transpose(const FieldMatrix& a) {
  FieldMatrix t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) t.at(c, r) = a.at(r, c);
  }
  return t;
}

inline FieldMatrix matmul(const PrimeField& field, const FieldMatrix& a,
                          const FieldMatrix& b) {
  assert(a.cols() == b.rows());
  FieldMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      FieldElement aik = a.at(i, k);
      if (field.is_zero(aik)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out.at(i, j) = field.add(out.at(i, j), field.mul(aik, b.at(k, j)));
      }
    }
  }
  return out;
}

inline std::vector<FieldElement> matvec(const PrimeField& field,
                                        const FieldMatrix& a,
                                        const std::vector<FieldElement>& x) {
  assert(a.cols() == x.size());
  std::vector<FieldElement> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    FieldElement acc = field.zero();
    for (std::size_t j = 0; j < a.cols(); ++j) {
      acc = field.add(acc, field.mul(a.at(i, j), x[j]));
    }
    y[i] = acc;
  }
  return y;
}

// |points| x (degree+1) matrix with column order of descending powers,
// degree .. 0, so row n is (x^degree, ..., x, 1).
inline FieldMatrix vandermonde(const PrimeField& field,
                               const std::vector<FieldElement>& points,
                               std::size_t degree) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i] == points[j]) {
        throw DuplicatePoint("vandermonde points must be pairwise distinct");
      }
    }
  }
  FieldMatrix m(points.size(), degree + 1);
  for (std::size_t r = 0; r < points.size(); ++r) {
    FieldElement acc = field.one();
    for (std::size_t c = 0; c <= degree; ++c) {
      m.at(r, degree - c) = acc;
      acc = field.mul(acc, points[r]);
    }
  }
  return m;
}

namespace detail {

struct Echelon {
  FieldMatrix rref;
  std::vector<std::size_t> pivot_cols;
};

// Gauss-Jordan to reduced row echelon form; pivot selection is the first
// nonzero entry in column order, so the result is deterministic.
inline Echelon reduce(const PrimeField& field, FieldMatrix a) {
  std::vector<std::size_t> pivots;
  std::size_t pr = 0;
  for (std::size_t c = 0; c < a.cols() && pr < a.rows(); ++c) {
    std::size_t sel = pr;
    while (sel < a.rows() && field.is_zero(a.at(sel, c))) ++sel;
    if (sel == a.rows()) continue;
    a.swap_rows(sel, pr);
    FieldElement piv_inv = field.inv(a.at(pr, c));
    for (std::size_t j = c; j < a.cols(); ++j) {
      a.at(pr, j) = field.mul(a.at(pr, j), piv_inv);
    }
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == pr || field.is_zero(a.at(r, c))) continue;
      FieldElement factor = a.at(r, c);
      for (std::size_t j = c; j < a.cols(); ++j) {
        a.at(r, j) = field.sub(a.at(r, j), field.mul(factor, a.at(pr, j)));
      }
    }
    pivots.push_back(c);
    ++pr;
  }
  return {std::move(a), std::move(pivots)};
}

}  // namespace detail

inline std::size_t rank(const PrimeField& field, const FieldMatrix& a) {
  return detail::reduce(field, a).pivot_cols.size();
}

// Basis of {x : A x = 0} as rows, one per free column of the RREF, in
// ascending free-column order.
inline FieldMatrix right_kernel(const PrimeField& field, const FieldMatrix& a) {
  detail::Echelon e = detail::reduce(field, a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (std::size_t c : e.pivot_cols) is_pivot[c] = true;
  std::size_t nullity = a.cols() - e.pivot_cols.size();
  FieldMatrix basis(nullity, a.cols());
  std::size_t out_row = 0;
  for (std::size_t fc = 0; fc < a.cols(); ++fc) {
    if (is_pivot[fc]) continue;
    basis.at(out_row, fc) = field.one();
    for (std::size_t i = 0; i < e.pivot_cols.size(); ++i) {
      basis.at(out_row, e.pivot_cols[i]) = field.neg(e.rref.at(i, fc));
    }
    ++out_row;
  }
  return basis;
}

// Basis of {b : b A = 0} as rows. rows() = rows(A) - rank(A). The basis is
// re-reduced to RREF so the output is canonical.
inline FieldMatrix left_null_space(const PrimeField& field,
                                   const FieldMatrix& a) {
  FieldMatrix kernel = right_kernel(field, transpose(a));
  return detail::reduce(field, std::move(kernel)).rref;
}

enum class SolutionKind { Unique, Underdetermined, Inconsistent };

// Result of solve(). `particular` and `null_basis` are meaningful unless
// kind == Inconsistent; the full solution set is particular + row-span of
// null_basis. null_basis has 0 rows exactly when kind == Unique.
struct SolutionSet {
  SolutionKind kind = SolutionKind::Inconsistent;
  std::vector<FieldElement> particular;
  FieldMatrix null_basis;
};

inline SolutionSet solve(const PrimeField& field, const FieldMatrix& a,
                         const std::vector<FieldElement>& y) {
  assert(a.rows() == y.size());
  FieldMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) aug.at(r, c) = a.at(r, c);
    aug.at(r, a.cols()) = y[r];
  }
  detail::Echelon e = detail::reduce(field, std::move(aug));
  for (std::size_t c : e.pivot_cols) {
    if (c == a.cols()) return {SolutionKind::Inconsistent, {}, {}};
  }
  SolutionSet out;
  out.particular.assign(a.cols(), field.zero());
  for (std::size_t i = 0; i < e.pivot_cols.size(); ++i) {
    out.particular[e.pivot_cols[i]] = e.rref.at(i, a.cols());
  }
  out.null_basis = right_kernel(field, a);
  out.kind = out.null_basis.rows() == 0 ? SolutionKind::Unique
                                        : SolutionKind::Underdetermined;
  return out;
}

}  // namespace vers
