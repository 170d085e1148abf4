#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "vers/errors.hpp"
#include "vers/field.hpp"

namespace vers {

// Univariate polynomial over GF(p). Coefficients ascending by degree and
// normalized: no trailing zeros, so the zero polynomial has no coefficients
// and degree() returns the -1 sentinel.
class Poly {
 public:
  Poly() = default;

  explicit Poly(std::vector<FieldElement> ascending)
      : coeffs_(std::move(ascending)) {
    while (!coeffs_.empty() && coeffs_.back().value == 0) coeffs_.pop_back();
  }

  bool is_zero() const { return coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<FieldElement>& coeffs() const { return coeffs_; }

  FieldElement coeff(std::size_t i) const {
    return i < coeffs_.size() ? coeffs_[i] : FieldElement{0};
  }

  friend bool operator==(const Poly&, const Poly&) = default;

 private:
  std::vector<FieldElement> coeffs_;
};

inline Poly poly_add(const PrimeField& f, const Poly& a, const Poly& b) {
  std::vector<FieldElement> out(std::max(a.coeffs().size(), b.coeffs().size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = f.add(a.coeff(i), b.coeff(i));
  }
  return Poly(std::move(out));
}

inline Poly poly_scale(const PrimeField& f, const Poly& a, FieldElement c) {
  std::vector<FieldElement> out(a.coeffs().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.mul(a.coeff(i), c);
  return Poly(std::move(out));
}

// Schoolbook multiplication; degrees stay small at desk scale.
inline Poly poly_mul(const PrimeField& f, const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  std::vector<FieldElement> out(a.coeffs().size() + b.coeffs().size() - 1);
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs().size(); ++j) {
      out[i + j] = f.add(out[i + j], f.mul(a.coeff(i), b.coeff(j)));
    }
  }
  return Poly(std::move(out));
}

// Horner evaluation.
inline FieldElement eval(const PrimeField& f, const Poly& p, FieldElement z) {
  FieldElement acc = f.zero();
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) {
    acc = f.add(f.mul(acc, z), *it);
  }
  return acc;
}

// Unique polynomial of degree < |points| through all (x, y) pairs.
inline Poly lagrange_interpolate(
    const PrimeField& f,
    const std::vector<std::pair<FieldElement, FieldElement>>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i].first == points[j].first) {
        throw DuplicatePoint("interpolation x-values must be distinct");
      }
    }
  }
  Poly acc;
  for (std::size_t i = 0; i < points.size(); ++i) {
    Poly basis(std::vector<FieldElement>{f.one()});
    FieldElement denom = f.one();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      basis = poly_mul(
          f, basis, Poly({f.neg(points[j].first), f.one()}));
      denom = f.mul(denom, f.sub(points[i].first, points[j].first));
    }
    acc = poly_add(
        f, acc, poly_scale(f, basis, f.div(points[i].second, denom)));
  }
  return acc;
}

// The computation each worker applies; a univariate polynomial of degree
// d >= 1, applied coordinate-wise when messages are vectors.
class TargetFunction {
 public:
  explicit TargetFunction(Poly poly) : poly_(std::move(poly)) {
    if (poly_.degree() < 1) {
      throw InvalidConfig("target function must have degree >= 1");
    }
  }

  const Poly& poly() const { return poly_; }

  std::size_t degree() const {
    return static_cast<std::size_t>(poly_.degree());
  }

  // Ascending exponents with nonzero coefficient; always contains degree().
  std::vector<std::size_t> degree_set() const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < poly_.coeffs().size(); ++e) {
      if (poly_.coeff(e).value != 0) out.push_back(e);
    }
    return out;
  }

 private:
  Poly poly_;
};

// Coefficients of f(q(z)), expanded by Horner over polynomials. Reversed to
// descending order this is the coefficient sub-vector a worker's report
// contributes for its version assignment.
inline Poly compose_expand(const PrimeField& f, const TargetFunction& tf,
                           const Poly& q) {
  Poly acc;
  const std::vector<FieldElement>& fc = tf.poly().coeffs();
  for (auto it = fc.rbegin(); it != fc.rend(); ++it) {
    acc = poly_mul(f, acc, q);
    acc = poly_add(f, acc, Poly({*it}));
  }
  return acc;
}

}  // namespace vers
