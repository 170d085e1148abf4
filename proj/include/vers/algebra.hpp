#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "vers/errors.hpp"
#include "vers/field.hpp"
#include "vers/poly.hpp"

namespace vers {

// Per-owner version assignment: entries[k] == 0 means owner k is honest,
// entries[k] in [1..v] names which of its v versions an adversarial owner
// k handed out.
struct VersionVector {
  std::vector<std::uint32_t> entries;

  friend bool operator==(const VersionVector&, const VersionVector&) = default;
  friend auto operator<=>(const VersionVector&,
                          const VersionVector&) = default;
};

// A single message variable: owner index plus version tag (0 for honest).
struct VarKey {
  std::uint32_t owner = 0;
  std::uint32_t version = 0;

  friend bool operator==(const VarKey&, const VarKey&) = default;
  friend auto operator<=>(const VarKey&, const VarKey&) = default;
};

// Product of message variables with positive exponents; factors sorted by
// key, at most one version tag per owner.
struct Monomial {
  std::vector<std::pair<VarKey, std::uint32_t>> factors;

  std::size_t total_degree() const {
    std::size_t d = 0;
    for (const auto& [key, exp] : factors) d += exp;
    return d;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

namespace detail {

inline void check_adversary_set(std::size_t num_owners,
                                const std::vector<std::size_t>& adversary_set,
                                std::size_t num_versions) {
  if (adversary_set.size() >= num_owners) {
    throw InvalidConfig("adversary set must leave at least one honest owner");
  }
  if (num_versions < 1) throw InvalidConfig("version count must be >= 1");
  for (std::size_t i = 0; i < adversary_set.size(); ++i) {
    if (adversary_set[i] >= num_owners) {
      throw InvalidConfig("adversary index out of range");
    }
    if (i > 0 && adversary_set[i] <= adversary_set[i - 1]) {
      throw InvalidConfig("adversary set must be strictly increasing");
    }
  }
}

inline std::uint64_t pow_u64(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r *= base;
  return r;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

}  // namespace detail

// All v^beta version vectors for a fixed adversary set, in ascending
// lexicographic order of their entry sequences.
inline std::vector<VersionVector> enumerate_version_vectors(
    std::size_t num_owners, const std::vector<std::size_t>& adversary_set,
    std::size_t num_versions) {
  detail::check_adversary_set(num_owners, adversary_set, num_versions);
  std::size_t beta = adversary_set.size();
  std::uint64_t total = detail::pow_u64(num_versions, beta);
  std::vector<VersionVector> out;
  out.reserve(total);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    VersionVector vv;
    vv.entries.assign(num_owners, 0);
    // first adversarial position is the most significant digit, so plain
    // counting yields lexicographic order
    std::uint64_t rem = idx;
    for (std::size_t j = beta; j-- > 0;) {
      vv.entries[adversary_set[j]] =
          static_cast<std::uint32_t>(1 + rem % num_versions);
      rem /= num_versions;
    }
    out.push_back(std::move(vv));
  }
  return out;
}

// Length of the monomial vector:
//   sum over e in degree_set of
//     sum over m = 0..min(e, beta) of C(beta, m) C(K-beta-1+e, e-m) v^m.
inline std::uint64_t monomial_vector_length(
    std::size_t num_owners, std::size_t beta, std::size_t num_versions,
    const std::vector<std::size_t>& degree_set) {
  std::uint64_t total = 0;
  for (std::size_t e : degree_set) {
    for (std::size_t m = 0; m <= std::min(e, beta); ++m) {
      total += detail::binomial(beta, m) *
               detail::binomial(num_owners - beta - 1 + e, e - m) *
               detail::pow_u64(num_versions, m);
    }
  }
  return total;
}

namespace detail {

// Partitions of e with parts descending, enumerated in descending
// lexicographic order: e=3 gives [3], [2,1], [1,1,1].
inline void partitions_desc(std::size_t remaining, std::size_t max_part,
                            std::vector<std::size_t>& prefix,
                            std::vector<std::vector<std::size_t>>& out) {
  if (remaining == 0) {
    out.push_back(prefix);
    return;
  }
  for (std::size_t part = std::min(max_part, remaining); part >= 1; --part) {
    prefix.push_back(part);
    partitions_desc(remaining - part, part, prefix, out);
    prefix.pop_back();
  }
}

// All r-element subsets of [0, n) in ascending lexicographic order.
inline void subsets_lex(std::size_t n, std::size_t r,
                        std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> cur(r);
  std::iota(cur.begin(), cur.end(), 0);
  if (r > n) return;
  for (;;) {
    out.push_back(cur);
    // advance
    std::size_t i = r;
    while (i > 0 && cur[i - 1] == n - r + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < r; ++j) cur[j] = cur[j - 1] + 1;
  }
}

}  // namespace detail

// The complete, duplicate-free list of monomials that can appear in any
// expanded f(q(z)), in the canonical column order used by every matrix in
// this library. For each degree (ascending): exponent shapes with larger
// parts first, supports in ascending owner order, exponents assigned
// largest-to-smallest-owner first, and version tags counted with the
// smallest adversarial owner varying fastest.
inline std::vector<Monomial> monomial_vector(
    std::size_t num_owners, const std::vector<std::size_t>& adversary_set,
    std::size_t num_versions, const std::vector<std::size_t>& degree_set) {
  detail::check_adversary_set(num_owners, adversary_set, num_versions);
  if (degree_set.empty()) throw InvalidConfig("degree set must be nonempty");
  std::vector<bool> is_adv(num_owners, false);
  for (std::size_t a : adversary_set) is_adv[a] = true;

  std::vector<std::size_t> degrees = degree_set;
  std::sort(degrees.begin(), degrees.end());

  std::vector<Monomial> out;
  for (std::size_t e : degrees) {
    std::vector<std::vector<std::size_t>> parts;
    std::vector<std::size_t> prefix;
    detail::partitions_desc(e, e, prefix, parts);
    if (e == 0) {
      out.push_back(Monomial{});  // the constant monomial
      continue;
    }
    for (const auto& partition : parts) {
      std::size_t r = partition.size();
      std::vector<std::vector<std::size_t>> supports;
      detail::subsets_lex(num_owners, r, supports);
      for (const auto& support : supports) {
        // distinct arrangements of the parts over this support, in
        // descending lexicographic order of the exponent tuples
        std::vector<std::size_t> expo = partition;
        do {
          std::vector<std::size_t> adv_positions;
          for (std::size_t pos = 0; pos < r; ++pos) {
            if (is_adv[support[pos]]) adv_positions.push_back(pos);
          }
          std::size_t m = adv_positions.size();
          std::uint64_t combos = detail::pow_u64(num_versions, m);
          for (std::uint64_t c = 0; c < combos; ++c) {
            Monomial mono;
            std::vector<std::uint32_t> version_of(r, 0);
            std::uint64_t rem = c;
            for (std::size_t j = 0; j < m; ++j) {
              version_of[adv_positions[j]] =
                  static_cast<std::uint32_t>(1 + rem % num_versions);
              rem /= num_versions;
            }
            for (std::size_t pos = 0; pos < r; ++pos) {
              mono.factors.push_back(
                  {{static_cast<std::uint32_t>(support[pos]),
                    version_of[pos]},
                   static_cast<std::uint32_t>(expo[pos])});
            }
            out.push_back(std::move(mono));
          }
        } while (std::prev_permutation(expo.begin(), expo.end()));
      }
    }
  }
  assert(out.size() == monomial_vector_length(num_owners, adversary_set.size(),
                                              num_versions, degrees));
  return out;
}

// Everything the coefficient/characteristic analysis depends on; a trimmed
// view of a full protocol config (workers and their points do not enter).
struct AnalysisParams {
  PrimeField field;
  std::size_t num_owners;                  // K
  std::vector<std::size_t> adversary_set;  // 0-based, strictly increasing
  std::size_t num_versions;                // v
  TargetFunction target;
  std::vector<FieldElement> omega;         // K distinct encode points
};

inline void validate(const AnalysisParams& p) {
  detail::check_adversary_set(p.num_owners, p.adversary_set, p.num_versions);
  if (p.omega.size() != p.num_owners) {
    throw InvalidConfig("need exactly one encode point per owner");
  }
  for (std::size_t i = 0; i < p.omega.size(); ++i) {
    for (std::size_t j = i + 1; j < p.omega.size(); ++j) {
      if (p.omega[i] == p.omega[j]) {
        throw InvalidConfig("encode points must be pairwise distinct");
      }
    }
  }
}

// Entries of the decoded coefficient blocks, one per version vector:
// length of each sub-vector u_v.
inline std::size_t sub_vector_length(const AnalysisParams& p) {
  return p.target.degree() * (p.num_owners - 1) + 1;
}

namespace detail {

// Multivariate linear-combination bookkeeping: a polynomial in z whose
// z^i coefficient is a map monomial -> field scalar.
using SymCoeff = std::map<Monomial, FieldElement>;

struct SymPoly {
  std::vector<SymCoeff> z;  // index = power of z
};

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0, j = 0;
  while (i < a.factors.size() || j < b.factors.size()) {
    if (j == b.factors.size() ||
        (i < a.factors.size() && a.factors[i].first < b.factors[j].first)) {
      out.factors.push_back(a.factors[i++]);
    } else if (i == a.factors.size() ||
               b.factors[j].first < a.factors[i].first) {
      out.factors.push_back(b.factors[j++]);
    } else {
      out.factors.push_back(
          {a.factors[i].first, a.factors[i].second + b.factors[j].second});
      ++i;
      ++j;
    }
  }
  return out;
}

inline void sym_accumulate(const PrimeField& f, SymCoeff& into,
                           const Monomial& mono, FieldElement c) {
  if (f.is_zero(c)) return;
  auto [it, inserted] = into.try_emplace(mono, c);
  if (!inserted) {
    it->second = f.add(it->second, c);
    if (f.is_zero(it->second)) into.erase(it);
  }
}

inline SymPoly sym_mul(const PrimeField& f, const SymPoly& a,
                       const SymPoly& b) {
  SymPoly out;
  if (a.z.empty() || b.z.empty()) return out;
  out.z.resize(a.z.size() + b.z.size() - 1);
  for (std::size_t i = 0; i < a.z.size(); ++i) {
    for (const auto& [ma, ca] : a.z[i]) {
      for (std::size_t j = 0; j < b.z.size(); ++j) {
        for (const auto& [mb, cb] : b.z[j]) {
          sym_accumulate(f, out.z[i + j], mono_mul(ma, mb), f.mul(ca, cb));
        }
      }
    }
  }
  return out;
}

}  // namespace detail

// Characteristic matrix: v^beta row blocks, one per version vector in set
// order; block rows are the coefficients of f(q^(v)(z)) against the
// canonical monomial columns, z-powers descending. For every concrete
// message assignment, matrix * monomial-values = coefficient_vector.
struct CharacteristicMatrix {
  FieldMatrix matrix;
  std::vector<VersionVector> version_vectors;
  std::vector<Monomial> monomials;
  std::size_t block_rows = 0;  // d(K-1)+1

  std::size_t block_index(const VersionVector& vv) const {
    auto it =
        std::find(version_vectors.begin(), version_vectors.end(), vv);
    assert(it != version_vectors.end());
    return static_cast<std::size_t>(it - version_vectors.begin());
  }
};

inline CharacteristicMatrix characteristic_matrix(const AnalysisParams& p) {
  validate(p);
  const PrimeField& f = p.field;
  std::size_t beta = p.adversary_set.size();
  std::vector<bool> is_adv(p.num_owners, false);
  for (std::size_t a : p.adversary_set) is_adv[a] = true;

  CharacteristicMatrix out{FieldMatrix(), {}, {}, sub_vector_length(p)};
  out.version_vectors =
      enumerate_version_vectors(p.num_owners, p.adversary_set, p.num_versions);
  out.monomials = monomial_vector(p.num_owners, p.adversary_set,
                                  p.num_versions, p.target.degree_set());

  std::map<Monomial, std::size_t> column_of;
  for (std::size_t c = 0; c < out.monomials.size(); ++c) {
    column_of[out.monomials[c]] = c;
  }

  // Lagrange basis polynomial per owner over the encode points.
  std::vector<Poly> basis(p.num_owners);
  for (std::size_t k = 0; k < p.num_owners; ++k) {
    std::vector<std::pair<FieldElement, FieldElement>> pts;
    for (std::size_t j = 0; j < p.num_owners; ++j) {
      pts.push_back({p.omega[j], j == k ? f.one() : f.zero()});
    }
    basis[k] = lagrange_interpolate(f, pts);
  }

  std::size_t rows = out.version_vectors.size() * out.block_rows;
  out.matrix = FieldMatrix(rows, out.monomials.size());
  (void)beta;

  for (std::size_t b = 0; b < out.version_vectors.size(); ++b) {
    const VersionVector& vv = out.version_vectors[b];
    // q(z) with each owner's message as a formal variable
    detail::SymPoly q;
    q.z.resize(p.num_owners);  // degree K-1
    for (std::size_t k = 0; k < p.num_owners; ++k) {
      Monomial var;
      var.factors.push_back(
          {{static_cast<std::uint32_t>(k),
            is_adv[k] ? vv.entries[k] : 0u},
           1});
      for (std::size_t i = 0; i < basis[k].coeffs().size(); ++i) {
        detail::sym_accumulate(f, q.z[i], var, basis[k].coeff(i));
      }
    }
    // Horner expansion of f(q(z))
    detail::SymPoly acc;
    const std::vector<FieldElement>& fc = p.target.poly().coeffs();
    for (auto it = fc.rbegin(); it != fc.rend(); ++it) {
      acc = detail::sym_mul(f, acc, q);
      if (!f.is_zero(*it)) {
        if (acc.z.empty()) acc.z.resize(1);
        detail::sym_accumulate(f, acc.z[0], Monomial{}, *it);
      }
    }
    // block row i holds the z^(d(K-1) - i) coefficient
    for (std::size_t i = 0; i < out.block_rows; ++i) {
      std::size_t zpow = out.block_rows - 1 - i;
      if (zpow >= acc.z.size()) continue;
      for (const auto& [mono, c] : acc.z[zpow]) {
        auto it = column_of.find(mono);
        if (it == column_of.end()) {
          throw InternalInconsistency(
              "expansion produced a monomial outside the monomial vector");
        }
        out.matrix.at(b * out.block_rows + i, it->second) = c;
      }
    }
  }
  return out;
}

// Values of every monomial under a concrete assignment. messages[k] holds
// one value for honest owner k and the v version values for adversarial k.
inline std::vector<FieldElement> monomial_vector_values(
    const AnalysisParams& p, const std::vector<Monomial>& monomials,
    const std::vector<std::vector<FieldElement>>& messages) {
  const PrimeField& f = p.field;
  std::vector<FieldElement> out;
  out.reserve(monomials.size());
  for (const Monomial& m : monomials) {
    FieldElement acc = f.one();
    for (const auto& [key, exp] : m.factors) {
      std::size_t idx = key.version == 0 ? 0 : key.version - 1;
      acc = f.mul(acc, f.pow(messages[key.owner].at(idx), exp));
    }
    out.push_back(acc);
  }
  return out;
}

// The stacked coefficient vector U: for each version vector in set order,
// the coefficients of f(q^(v)(z)) in descending z-power order, zero-padded
// to d(K-1)+1 entries.
inline std::vector<FieldElement> coefficient_vector(
    const AnalysisParams& p,
    const std::vector<std::vector<FieldElement>>& messages) {
  validate(p);
  const PrimeField& f = p.field;
  if (messages.size() != p.num_owners) {
    throw InvalidConfig("need one message list per owner");
  }
  std::vector<bool> is_adv(p.num_owners, false);
  for (std::size_t a : p.adversary_set) is_adv[a] = true;
  for (std::size_t k = 0; k < p.num_owners; ++k) {
    std::size_t want = is_adv[k] ? p.num_versions : 1;
    if (messages[k].size() != want) {
      throw InvalidConfig("wrong number of message versions for an owner");
    }
  }

  std::vector<VersionVector> vvs =
      enumerate_version_vectors(p.num_owners, p.adversary_set, p.num_versions);
  std::size_t width = sub_vector_length(p);
  std::vector<FieldElement> out;
  out.reserve(vvs.size() * width);
  for (const VersionVector& vv : vvs) {
    std::vector<std::pair<FieldElement, FieldElement>> pts;
    for (std::size_t k = 0; k < p.num_owners; ++k) {
      std::size_t idx = is_adv[k] ? vv.entries[k] - 1 : 0;
      pts.push_back({p.omega[k], messages[k][idx]});
    }
    Poly q = lagrange_interpolate(f, pts);
    Poly composed = compose_expand(f, p.target, q);
    for (std::size_t i = 0; i < width; ++i) {
      out.push_back(composed.coeff(width - 1 - i));
    }
  }
  return out;
}

// Basis of the left null space of the characteristic matrix, carrying the
// column-block structure (one block of width d(K-1)+1 per version vector).
struct RelationMatrix {
  FieldMatrix matrix;
  std::size_t block_count = 0;
  std::size_t block_width = 0;
};

inline RelationMatrix relation_matrix(const PrimeField& field,
                                      const CharacteristicMatrix& cm) {
  RelationMatrix out;
  out.matrix = left_null_space(field, cm.matrix);
  out.block_count = cm.version_vectors.size();
  out.block_width = cm.block_rows;
  return out;
}

// Reorders the column blocks: block i of the result is block perm[i] of P.
inline FieldMatrix apply_block_permutation(const RelationMatrix& p,
                                           const std::vector<std::size_t>& perm) {
  if (perm.size() != p.block_count) {
    throw InvalidConfig("permutation size must match block count");
  }
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t v : perm) {
    if (v >= perm.size() || seen[v]) {
      throw InvalidConfig("not a permutation of the block indices");
    }
    seen[v] = true;
  }
  FieldMatrix out(p.matrix.rows(), p.matrix.cols());
  for (std::size_t b = 0; b < perm.size(); ++b) {
    for (std::size_t r = 0; r < p.matrix.rows(); ++r) {
      for (std::size_t c = 0; c < p.block_width; ++c) {
        out.at(r, b * p.block_width + c) =
            p.matrix.at(r, perm[b] * p.block_width + c);
      }
    }
  }
  return out;
}

// A permutation is effective when the permuted relation matrix stops
// annihilating M, i.e. P^Pi M != 0.
inline bool is_effective(const PrimeField& field, const RelationMatrix& p,
                         const CharacteristicMatrix& cm,
                         const std::vector<std::size_t>& perm) {
  FieldMatrix permuted = apply_block_permutation(p, perm);
  FieldMatrix product = matmul(field, permuted, cm.matrix);
  for (FieldElement e : product.entries()) {
    if (!field.is_zero(e)) return true;
  }
  return false;
}

// True when perm factors as independent per-owner version relabelings
// pi_1 x ... x pi_beta acting on the version vector set.
inline bool is_product_permutation(const std::vector<std::size_t>& perm,
                                   std::size_t num_versions,
                                   std::size_t beta) {
  std::uint64_t total = detail::pow_u64(num_versions, beta);
  if (perm.size() != total) {
    throw InvalidConfig("permutation size must be v^beta");
  }
  // digit j of index i = version of the j-th adversarial owner, with the
  // last one least significant (matching version vector set order)
  auto digit = [&](std::size_t idx, std::size_t j) {
    return idx / detail::pow_u64(num_versions, beta - 1 - j) % num_versions;
  };
  for (std::size_t j = 0; j < beta; ++j) {
    std::vector<std::size_t> image(num_versions, num_versions);
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t a = digit(i, j);
      std::size_t b = digit(perm[i], j);
      if (image[a] == num_versions) {
        image[a] = b;
      } else if (image[a] != b) {
        return false;
      }
    }
    std::vector<bool> hit(num_versions, false);
    for (std::size_t b : image) {
      if (b == num_versions || hit[b]) return false;
      hit[b] = true;
    }
  }
  return true;
}

// Every block permutation with P^Pi M == 0, in lexicographic order.
// Exhaustive over (v^beta)! candidates, so capped.
inline std::vector<std::vector<std::size_t>> non_effective_permutations(
    const PrimeField& field, const RelationMatrix& p,
    const CharacteristicMatrix& cm) {
  if (p.block_count > 8) {
    throw TooLargeToEnumerate(
        "permutation enumeration supports at most 8 blocks, got " +
        std::to_string(p.block_count));
  }
  std::vector<std::size_t> perm(p.block_count);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do {
    if (!is_effective(field, p, cm, perm)) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

inline std::uint64_t count_non_effective(const PrimeField& field,
                                         const RelationMatrix& p,
                                         const CharacteristicMatrix& cm) {
  return non_effective_permutations(field, p, cm).size();
}

}  // namespace vers
