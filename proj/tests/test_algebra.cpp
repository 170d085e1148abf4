#include <catch2/catch_amalgamated.hpp>
#include <set>
#include <tuple>
#include <vector>

#include "helpers.hpp"
#include "vers/algebra.hpp"

using vers::AnalysisParams;
using vers::CharacteristicMatrix;
using vers::FieldElement;
using vers::FieldMatrix;
using vers::Monomial;
using vers::Poly;
using vers::PrimeField;
using vers::RelationMatrix;
using vers::Rng;
using vers::TargetFunction;
using vers::VersionVector;
using testutil::frac;
using testutil::vec;

namespace {

VersionVector vv(std::vector<std::uint32_t> entries) {
  return VersionVector{std::move(entries)};
}

Monomial mono(
    const std::vector<std::tuple<unsigned, unsigned, unsigned>>& factors) {
  Monomial m;
  for (auto [owner, version, exp] : factors) {
    m.factors.push_back({{owner, version}, exp});
  }
  return m;
}

AnalysisParams example_three_owner(const PrimeField& f) {
  // K=3, owners 1 and 2 adversarial, v=2, f(x) = x^2, omega = (1, 2, 3)
  return {f, 3,           {0, 1}, 2, TargetFunction(Poly(vec(f, {0, 0, 1}))),
          vec(f, {1, 2, 3})};
}

// Independent generation: walk every version vector and every exponent
// split of every degree, collect the induced monomials into a set.
std::set<Monomial> oracle_monomials(std::size_t K,
                                    const std::vector<std::size_t>& adv,
                                    std::size_t v,
                                    const std::vector<std::size_t>& degrees) {
  std::vector<bool> is_adv(K, false);
  for (std::size_t a : adv) is_adv[a] = true;
  std::set<Monomial> out;
  auto vvs = vers::enumerate_version_vectors(K, adv, v);
  for (const auto& w : vvs) {
    for (std::size_t e : degrees) {
      // compositions of e into K nonnegative parts
      std::vector<std::size_t> expo(K, 0);
      auto rec = [&](auto&& self, std::size_t k, std::size_t left) -> void {
        if (k == K) {
          if (left != 0) return;
          Monomial m;
          for (std::size_t i = 0; i < K; ++i) {
            if (expo[i] == 0) continue;
            m.factors.push_back(
                {{static_cast<std::uint32_t>(i),
                  is_adv[i] ? w.entries[i] : 0u},
                 static_cast<std::uint32_t>(expo[i])});
          }
          out.insert(std::move(m));
          return;
        }
        for (std::size_t take = 0; take <= left; ++take) {
          expo[k] = take;
          self(self, k + 1, left - take);
        }
        expo[k] = 0;
      };
      rec(rec, 0, e);
    }
  }
  return out;
}

std::vector<std::vector<FieldElement>> random_messages(
    const AnalysisParams& p, Rng& rng) {
  std::vector<bool> is_adv(p.num_owners, false);
  for (std::size_t a : p.adversary_set) is_adv[a] = true;
  std::vector<std::vector<FieldElement>> msgs(p.num_owners);
  for (std::size_t k = 0; k < p.num_owners; ++k) {
    std::size_t count = is_adv[k] ? p.num_versions : 1;
    for (std::size_t i = 0; i < count; ++i) {
      msgs[k].push_back(vers::uniform_element(p.field, rng));
    }
  }
  return msgs;
}

}  // namespace

TEST_CASE("version vector enumeration") {
  SECTION("two adversaries with two versions, in display order") {
    auto vvs = vers::enumerate_version_vectors(3, {0, 1}, 2);
    REQUIRE(vvs.size() == 4);
    CHECK(vvs[0] == vv({1, 1, 0}));
    CHECK(vvs[1] == vv({1, 2, 0}));
    CHECK(vvs[2] == vv({2, 1, 0}));
    CHECK(vvs[3] == vv({2, 2, 0}));
  }

  SECTION("no adversaries gives the single all-zero vector") {
    auto vvs = vers::enumerate_version_vectors(4, {}, 3);
    REQUIRE(vvs.size() == 1);
    CHECK(vvs[0] == vv({0, 0, 0, 0}));
  }

  SECTION("one adversary, three versions") {
    auto vvs = vers::enumerate_version_vectors(2, {1}, 3);
    REQUIRE(vvs.size() == 3);
    CHECK(vvs[0] == vv({0, 1}));
    CHECK(vvs[1] == vv({0, 2}));
    CHECK(vvs[2] == vv({0, 3}));
  }

  SECTION("orders lexicographically for every tested shape") {
    for (std::size_t K : {2u, 3u, 4u}) {
      for (std::size_t v : {1u, 2u, 3u}) {
        std::vector<std::size_t> adv;
        for (std::size_t b = 0; b + 1 < K && b < 2; ++b) adv.push_back(b);
        auto vvs = vers::enumerate_version_vectors(K, adv, v);
        CHECK(std::is_sorted(vvs.begin(), vvs.end()));
        CHECK(std::adjacent_find(vvs.begin(), vvs.end()) == vvs.end());
      }
    }
  }

  SECTION("rejects an adversary set covering every owner") {
    CHECK_THROWS_AS(vers::enumerate_version_vectors(2, {0, 1}, 2),
                    vers::InvalidConfig);
    CHECK_THROWS_AS(vers::enumerate_version_vectors(3, {0, 1, 2}, 2),
                    vers::InvalidConfig);
  }
}

TEST_CASE("monomial vector reproduces the worked three-owner example") {
  auto ms = vers::monomial_vector(3, {0, 1}, 2, {2});
  REQUIRE(ms.size() == 13);
  CHECK(ms[0] == mono({{0, 1, 2}}));
  CHECK(ms[1] == mono({{0, 2, 2}}));
  CHECK(ms[2] == mono({{1, 1, 2}}));
  CHECK(ms[3] == mono({{1, 2, 2}}));
  CHECK(ms[4] == mono({{2, 0, 2}}));
  CHECK(ms[5] == mono({{0, 1, 1}, {1, 1, 1}}));
  CHECK(ms[6] == mono({{0, 2, 1}, {1, 1, 1}}));
  CHECK(ms[7] == mono({{0, 1, 1}, {1, 2, 1}}));
  CHECK(ms[8] == mono({{0, 2, 1}, {1, 2, 1}}));
  CHECK(ms[9] == mono({{0, 1, 1}, {2, 0, 1}}));
  CHECK(ms[10] == mono({{0, 2, 1}, {2, 0, 1}}));
  CHECK(ms[11] == mono({{1, 1, 1}, {2, 0, 1}}));
  CHECK(ms[12] == mono({{1, 2, 1}, {2, 0, 1}}));
}

TEST_CASE("monomial vector simple cases and oracle sweep") {
  SECTION("honest-only linear case lists the owners") {
    auto ms = vers::monomial_vector(2, {}, 1, {1});
    REQUIRE(ms.size() == 2);
    CHECK(ms[0] == mono({{0, 0, 1}}));
    CHECK(ms[1] == mono({{1, 0, 1}}));
  }

  SECTION("constant degree contributes the empty monomial") {
    auto ms = vers::monomial_vector(3, {2}, 2, {0, 1});
    REQUIRE(ms.size() == 5);
    CHECK(ms[0] == mono({}));
    CHECK(ms[1] == mono({{0, 0, 1}}));
    CHECK(ms[2] == mono({{1, 0, 1}}));
    CHECK(ms[3] == mono({{2, 1, 1}}));
    CHECK(ms[4] == mono({{2, 2, 1}}));
  }

  SECTION("matches exhaustive generation and the length law") {
    for (std::size_t K = 2; K <= 4; ++K) {
      for (std::size_t beta = 0; beta <= 2 && beta < K; ++beta) {
        for (std::size_t v = 1; v <= 3; ++v) {
          std::vector<std::size_t> adv;
          for (std::size_t b = 0; b < beta; ++b) adv.push_back(b + 1);
          for (std::vector<std::size_t> degrees :
               {std::vector<std::size_t>{1}, {2}, {0, 2}, {1, 3}, {0, 1, 2}}) {
            auto ms = vers::monomial_vector(K, adv, v, degrees);
            auto expect = oracle_monomials(K, adv, v, degrees);
            CHECK(ms.size() ==
                  vers::monomial_vector_length(K, beta, v, degrees));
            CHECK(std::set<Monomial>(ms.begin(), ms.end()) == expect);
            CHECK(ms.size() == expect.size());  // no duplicates
          }
        }
      }
    }
  }
}

TEST_CASE("monomial vector length formula") {
  CHECK(vers::monomial_vector_length(3, 2, 2, {2}) == 13);
  // no adversaries: multiset coefficient C(K-1+e, e)
  CHECK(vers::monomial_vector_length(3, 0, 1, {2}) == 6);
  CHECK(vers::monomial_vector_length(4, 0, 1, {3}) == 20);
  CHECK(vers::monomial_vector_length(2, 0, 1, {5}) == 6);
  // cross-check against enumeration
  CHECK(vers::monomial_vector_length(4, 1, 3, {1, 2}) ==
        vers::monomial_vector(4, {0}, 3, {1, 2}).size());
}

TEST_CASE("characteristic matrix matches the worked example rows") {
  PrimeField f(10007);
  AnalysisParams p = example_three_owner(f);
  CharacteristicMatrix cm = vers::characteristic_matrix(p);

  REQUIRE(cm.matrix.rows() == 20);
  REQUIRE(cm.matrix.cols() == 13);
  REQUIRE(cm.block_rows == 5);
  REQUIRE(cm.version_vectors.size() == 4);
  CHECK(cm.block_index(vv({2, 1, 0})) == 2);

  // first row: coefficients of z^4 in f(q(z)) for versions (1,1)
  std::vector<FieldElement> row0 = {
      frac(f, 1, 4), f.zero(),  f.one(),        f.zero(), frac(f, 1, 4),
      f.from_int(-1), f.zero(), f.zero(),       f.zero(), frac(f, 1, 2),
      f.zero(),       f.from_int(-1), f.zero()};
  CHECK(cm.matrix.row(0) == row0);

  // fourth row of the first block: coefficients of z^1
  std::vector<FieldElement> row3 = {
      f.from_int(-15), f.zero(), f.from_int(-24), f.zero(), f.from_int(-3),
      f.from_int(39),  f.zero(), f.zero(),        f.zero(), f.from_int(-14),
      f.zero(),        f.from_int(17), f.zero()};
  CHECK(cm.matrix.row(3) == row3);
}

TEST_CASE("characteristic matrix for the honest linear two-owner case") {
  PrimeField f(97);
  AnalysisParams p{f, 2, {}, 1, TargetFunction(Poly(vec(f, {0, 1}))),
                   vec(f, {1, 2})};
  CharacteristicMatrix cm = vers::characteristic_matrix(p);
  REQUIRE(cm.matrix.rows() == 2);
  REQUIRE(cm.matrix.cols() == 2);
  // q(z) = X1 (2 - z) + X2 (z - 1); rows are z^1 then z^0
  CHECK(cm.matrix.row(0) == vec(f, {-1, 1}));
  CHECK(cm.matrix.row(1) == vec(f, {2, -1}));
  CHECK(vers::rank(f, cm.matrix) == 2);
}

TEST_CASE("coefficient vector stacking and the matrix identity") {
  PrimeField f(10007);

  SECTION("no adversaries: single block equals the composed coefficients") {
    AnalysisParams p{f, 3, {}, 1, TargetFunction(Poly(vec(f, {1, 0, 1}))),
                     vec(f, {1, 2, 3})};
    Rng rng(51);
    auto msgs = random_messages(p, rng);
    auto u = vers::coefficient_vector(p, msgs);
    REQUIRE(u.size() == 5);
    std::vector<std::pair<FieldElement, FieldElement>> pts;
    for (std::size_t k = 0; k < 3; ++k) pts.push_back({p.omega[k], msgs[k][0]});
    Poly composed =
        vers::compose_expand(f, p.target, vers::lagrange_interpolate(f, pts));
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(u[i] == composed.coeff(4 - i));
    }
  }

  SECTION("worked-example block matches the direct quadratic expansion") {
    AnalysisParams p = example_three_owner(f);
    Rng rng(53);
    auto msgs = random_messages(p, rng);
    auto u = vers::coefficient_vector(p, msgs);
    REQUIRE(u.size() == 20);
    // block for versions (1,1): q has coefficients a, b, c
    FieldElement x1 = msgs[0][0], x2 = msgs[1][0], x3 = msgs[2][0];
    auto lin = [&](long long n1, long long d1, long long n2, long long d2,
                   long long n3, long long d3) {
      FieldElement acc = f.mul(frac(f, n1, d1), x1);
      acc = f.add(acc, f.mul(frac(f, n2, d2), x2));
      return f.add(acc, f.mul(frac(f, n3, d3), x3));
    };
    FieldElement a = lin(1, 2, -1, 1, 1, 2);
    FieldElement b = lin(-5, 2, 4, 1, -3, 2);
    FieldElement c = lin(3, 1, -3, 1, 1, 1);
    FieldElement two = f.from_uint(2);
    CHECK(u[0] == f.mul(a, a));
    CHECK(u[1] == f.mul(two, f.mul(a, b)));
    CHECK(u[2] == f.add(f.mul(b, b), f.mul(two, f.mul(a, c))));
    CHECK(u[3] == f.mul(two, f.mul(b, c)));
    CHECK(u[4] == f.mul(c, c));
  }

  SECTION("M times monomial values equals the coefficient vector") {
    Rng rng(57);
    std::vector<AnalysisParams> configs;
    configs.push_back(example_three_owner(f));
    configs.push_back({f, 4, {1, 3}, 3,
                       TargetFunction(Poly(vec(f, {5, 2, 0, 1}))),
                       vec(f, {1, 2, 3, 4})});
    configs.push_back({f, 2, {0}, 2, TargetFunction(Poly(vec(f, {0, 1}))),
                       vec(f, {3, 8})});
    for (const auto& p : configs) {
      CharacteristicMatrix cm = vers::characteristic_matrix(p);
      for (int trial = 0; trial < 25; ++trial) {
        auto msgs = random_messages(p, rng);
        auto x = vers::monomial_vector_values(p, cm.monomials, msgs);
        auto u = vers::coefficient_vector(p, msgs);
        CHECK(vers::matvec(f, cm.matrix, x) == u);
      }
    }
  }
}

TEST_CASE("relation matrix annihilates M and U") {
  PrimeField f(10007);
  AnalysisParams p = example_three_owner(f);
  CharacteristicMatrix cm = vers::characteristic_matrix(p);
  RelationMatrix rel = vers::relation_matrix(f, cm);

  CHECK(rel.block_count == 4);
  CHECK(rel.block_width == 5);
  CHECK(rel.matrix.rows() == 20 - vers::rank(f, cm.matrix));
  CHECK(rel.matrix.rows() > 0);
  CHECK(testutil::is_zero_matrix(f, vers::matmul(f, rel.matrix, cm.matrix)));

  SECTION("P annihilates every concrete coefficient vector") {
    Rng rng(61);
    for (int trial = 0; trial < 50; ++trial) {
      auto msgs = random_messages(p, rng);
      auto u = vers::coefficient_vector(p, msgs);
      auto pu = vers::matvec(f, rel.matrix, u);
      for (FieldElement e : pu) CHECK(f.is_zero(e));
    }
  }

  SECTION("full-row-rank M has an empty relation matrix") {
    AnalysisParams lin{f, 2, {}, 1, TargetFunction(Poly(vec(f, {0, 1}))),
                       vec(f, {1, 2})};
    CharacteristicMatrix cml = vers::characteristic_matrix(lin);
    RelationMatrix rl = vers::relation_matrix(f, cml);
    CHECK(rl.matrix.rows() == 0);
  }
}

TEST_CASE("neighbour columns share their nonzero profile") {
  // columns whose monomials differ only in version tags carry the same
  // nonzero sub-column
  PrimeField f(10007);
  AnalysisParams p = example_three_owner(f);
  CharacteristicMatrix cm = vers::characteristic_matrix(p);

  auto strip = [](const Monomial& m) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> shape;
    for (const auto& [key, exp] : m.factors) shape.push_back({key.owner, exp});
    return shape;
  };
  for (std::size_t c1 = 0; c1 < cm.monomials.size(); ++c1) {
    for (std::size_t c2 = c1 + 1; c2 < cm.monomials.size(); ++c2) {
      if (strip(cm.monomials[c1]) != strip(cm.monomials[c2])) continue;
      std::vector<FieldElement> n1, n2;
      for (std::size_t r = 0; r < cm.matrix.rows(); ++r) {
        if (!f.is_zero(cm.matrix.at(r, c1))) n1.push_back(cm.matrix.at(r, c1));
        if (!f.is_zero(cm.matrix.at(r, c2))) n2.push_back(cm.matrix.at(r, c2));
      }
      CHECK(!n1.empty());
      CHECK(n1 == n2);
    }
  }
}

TEST_CASE("block permutations of the relation matrix") {
  PrimeField f(10007);
  AnalysisParams p = example_three_owner(f);
  CharacteristicMatrix cm = vers::characteristic_matrix(p);
  RelationMatrix rel = vers::relation_matrix(f, cm);

  SECTION("identity leaves P unchanged") {
    CHECK(vers::apply_block_permutation(rel, {0, 1, 2, 3}) == rel.matrix);
  }

  SECTION("reversal stacks the blocks in reverse order") {
    FieldMatrix rev = vers::apply_block_permutation(rel, {3, 2, 1, 0});
    for (std::size_t b = 0; b < 4; ++b) {
      for (std::size_t r = 0; r < rel.matrix.rows(); ++r) {
        for (std::size_t c = 0; c < 5; ++c) {
          CHECK(rev.at(r, b * 5 + c) == rel.matrix.at(r, (3 - b) * 5 + c));
        }
      }
    }
  }

  SECTION("swapping two blocks changes exactly those blocks") {
    FieldMatrix sw = vers::apply_block_permutation(rel, {1, 0, 2, 3});
    for (std::size_t r = 0; r < rel.matrix.rows(); ++r) {
      for (std::size_t c = 0; c < 20; ++c) {
        std::size_t b = c / 5;
        std::size_t src = b == 0 ? c + 5 : (b == 1 ? c - 5 : c);
        CHECK(sw.at(r, c) == rel.matrix.at(r, src));
      }
    }
  }

  SECTION("rejects non-permutations") {
    CHECK_THROWS_AS(vers::apply_block_permutation(rel, {0, 0, 1, 2}),
                    vers::InvalidConfig);
    CHECK_THROWS_AS(vers::apply_block_permutation(rel, {0, 1, 2}),
                    vers::InvalidConfig);
  }
}

TEST_CASE("effective and non-effective permutations of the worked example") {
  PrimeField f(10007);
  AnalysisParams p = example_three_owner(f);
  CharacteristicMatrix cm = vers::characteristic_matrix(p);
  RelationMatrix rel = vers::relation_matrix(f, cm);

  // the three non-identity relabelings the analysis singles out
  CHECK_FALSE(vers::is_effective(f, rel, cm, {0, 1, 2, 3}));
  CHECK_FALSE(vers::is_effective(f, rel, cm, {3, 2, 1, 0}));
  CHECK_FALSE(vers::is_effective(f, rel, cm, {2, 3, 0, 1}));
  CHECK_FALSE(vers::is_effective(f, rel, cm, {1, 0, 3, 2}));
  // a bare transposition mixes version vectors inconsistently
  CHECK(vers::is_effective(f, rel, cm, {1, 0, 2, 3}));

  SECTION("exactly the product permutations are non-effective") {
    auto nes = vers::non_effective_permutations(f, rel, cm);
    CHECK(nes.size() == 4);  // (2!)^2
    std::vector<std::size_t> perm = {0, 1, 2, 3};
    do {
      bool ne = !vers::is_effective(f, rel, cm, perm);
      CHECK(ne == vers::is_product_permutation(perm, 2, 2));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  SECTION("non-effective permutations stay in the row span of P") {
    auto nes = vers::non_effective_permutations(f, rel, cm);
    std::size_t base_rank = vers::rank(f, rel.matrix);
    for (const auto& perm : nes) {
      FieldMatrix permuted = vers::apply_block_permutation(rel, perm);
      FieldMatrix stacked(rel.matrix.rows() * 2, rel.matrix.cols());
      for (std::size_t r = 0; r < rel.matrix.rows(); ++r) {
        for (std::size_t c = 0; c < rel.matrix.cols(); ++c) {
          stacked.at(r, c) = rel.matrix.at(r, c);
          stacked.at(r + rel.matrix.rows(), c) = permuted.at(r, c);
        }
      }
      CHECK(vers::rank(f, stacked) == base_rank);
    }
  }
}

TEST_CASE("product permutation classification") {
  CHECK(vers::is_product_permutation({0}, 1, 0));
  CHECK(vers::is_product_permutation({0}, 1, 3));
  CHECK(vers::is_product_permutation({0, 1, 2, 3}, 2, 2));
  CHECK(vers::is_product_permutation({3, 2, 1, 0}, 2, 2));
  CHECK(vers::is_product_permutation({2, 3, 0, 1}, 2, 2));
  CHECK(vers::is_product_permutation({1, 0, 3, 2}, 2, 2));
  CHECK_FALSE(vers::is_product_permutation({1, 0, 2, 3}, 2, 2));
  CHECK_FALSE(vers::is_product_permutation({0, 2, 1, 3}, 2, 2));
  // beta = 1: every permutation is a product permutation
  std::vector<std::size_t> perm = {0, 1, 2};
  do {
    CHECK(vers::is_product_permutation(perm, 3, 1));
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK_THROWS_AS(vers::is_product_permutation({0, 1}, 2, 2),
                  vers::InvalidConfig);
}

TEST_CASE("single-version systems admit only the identity") {
  PrimeField f(97);
  AnalysisParams p{f, 3, {0}, 1, TargetFunction(Poly(vec(f, {0, 0, 1}))),
                   vec(f, {1, 2, 3})};
  CharacteristicMatrix cm = vers::characteristic_matrix(p);
  RelationMatrix rel = vers::relation_matrix(f, cm);
  CHECK(vers::count_non_effective(f, rel, cm) == 1);
}

TEST_CASE("permutation enumeration is capped") {
  PrimeField f(97);
  // v^beta = 9 blocks exceeds the enumeration cap
  AnalysisParams p{f, 3, {0, 1}, 3, TargetFunction(Poly(vec(f, {0, 1}))),
                   vec(f, {1, 2, 3})};
  CharacteristicMatrix cm = vers::characteristic_matrix(p);
  RelationMatrix rel = vers::relation_matrix(f, cm);
  CHECK(rel.block_count == 9);
  CHECK_THROWS_AS(vers::non_effective_permutations(f, rel, cm),
                  vers::TooLargeToEnumerate);
}
