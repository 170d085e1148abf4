#pragma once

#include <vector>

#include "vers/field.hpp"

namespace testutil {

// Builds a matrix from signed integer literals, reducing into the field.
inline vers::FieldMatrix mat(const vers::PrimeField& f,
                             const std::vector<std::vector<long long>>& rows) {
  std::size_t nc = rows.empty() ? 0 : rows[0].size();
  vers::FieldMatrix m(rows.size(), nc);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < nc; ++c) m.at(r, c) = f.from_int(rows[r][c]);
  }
  return m;
}

inline std::vector<vers::FieldElement> vec(const vers::PrimeField& f,
                                           const std::vector<long long>& xs) {
  std::vector<vers::FieldElement> out;
  out.reserve(xs.size());
  for (long long x : xs) out.push_back(f.from_int(x));
  return out;
}

// a/b as a field element, for specifying rational matrix entries exactly.
inline vers::FieldElement frac(const vers::PrimeField& f, long long a,
                               long long b) {
  return f.div(f.from_int(a), f.from_int(b));
}

inline bool is_zero_matrix(const vers::PrimeField& f,
                           const vers::FieldMatrix& m) {
  for (vers::FieldElement e : m.entries()) {
    if (!f.is_zero(e)) return false;
  }
  return true;
}

}  // namespace testutil
