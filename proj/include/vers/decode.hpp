#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "vers/algebra.hpp"
#include "vers/errors.hpp"
#include "vers/field.hpp"
#include "vers/poly.hpp"
#include "vers/protocol.hpp"

namespace vers {

// One tag-equality class among the queried reports. members are indices
// into the report sequence handed to the decoder, ascending.
struct TagGroup {
  TagValue tag;
  std::vector<std::size_t> members;
};

// Groups ordered by their smallest member index.
struct Partition {
  std::vector<TagGroup> groups;
};

inline Partition partition_by_tags(const std::vector<WorkerReport>& reports) {
  Partition out;
  std::map<std::string, std::size_t> group_of;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::string key = tag_key_string(reports[i].tag);
    auto [it, inserted] = group_of.try_emplace(key, out.groups.size());
    if (inserted) out.groups.push_back({reports[i].tag, {}});
    out.groups[it->second].members.push_back(i);
  }
  return out;
}

enum class DecodeStatus { Recovered, Ambiguous, Insufficient };

// Decoder verdict for one honest owner. value holds f(X_k) when Recovered;
// conflicting lists the distinct candidates when qualifying groups disagree.
struct DecodeOutcome {
  DecodeStatus status = DecodeStatus::Insufficient;
  std::vector<FieldElement> value;
  std::vector<std::vector<FieldElement>> conflicting;
};

namespace detail {

// The degree-<=d(K-1) curve behind one tag group, one polynomial per
// message coordinate. The first d(K-1)+1 members pin the curve; any
// further member must already lie on it.
inline std::vector<Poly> group_curves(const VersConfig& c,
                                      const std::vector<WorkerReport>& reports,
                                      const std::vector<std::size_t>& members) {
  const PrimeField& f = c.field;
  std::size_t width = c.target.degree() * (c.num_owners - 1) + 1;
  std::vector<Poly> curves(c.message_dim);
  for (std::size_t coord = 0; coord < c.message_dim; ++coord) {
    std::vector<std::pair<FieldElement, FieldElement>> pts;
    for (std::size_t i = 0; i < members.size() && i < width; ++i) {
      const WorkerReport& r = reports[members[i]];
      pts.push_back({r.alpha, r.result[coord]});
    }
    Poly curve = lagrange_interpolate(f, pts);
    for (std::size_t i = width; i < members.size(); ++i) {
      const WorkerReport& r = reports[members[i]];
      if (eval(f, curve, r.alpha) != r.result[coord]) {
        throw InternalInconsistency(
            "reports sharing a tag do not lie on one curve");
      }
    }
    curves[coord] = std::move(curve);
  }
  return curves;
}

}  // namespace detail

// Pigeonhole decoder for every honest owner at once: any tag group with at
// least d(K-1)+1 members pins its curve; the value at omega_k is f(X_k).
// Returns (owner, outcome) pairs in ascending owner order.
inline std::vector<std::pair<std::size_t, DecodeOutcome>> decode_honest_owners(
    const VersConfig& c, const std::vector<WorkerReport>& reports) {
  const PrimeField& f = c.field;
  std::size_t need = c.target.degree() * (c.num_owners - 1) + 1;
  Partition part = partition_by_tags(reports);

  std::vector<std::vector<Poly>> qualified;
  for (const TagGroup& g : part.groups) {
    if (g.members.size() >= need) {
      qualified.push_back(detail::group_curves(c, reports, g.members));
    }
  }

  std::vector<bool> is_adv(c.num_owners, false);
  for (std::size_t a : c.adversary_set) is_adv[a] = true;

  std::vector<std::pair<std::size_t, DecodeOutcome>> out;
  for (std::size_t k = 0; k < c.num_owners; ++k) {
    if (is_adv[k]) continue;
    DecodeOutcome oc;
    if (qualified.empty()) {
      oc.status = DecodeStatus::Insufficient;
      out.push_back({k, std::move(oc)});
      continue;
    }
    std::vector<std::vector<FieldElement>> distinct;
    for (const auto& curves : qualified) {
      std::vector<FieldElement> value(c.message_dim);
      for (std::size_t coord = 0; coord < c.message_dim; ++coord) {
        value[coord] = eval(f, curves[coord], c.omega[k]);
      }
      if (std::find(distinct.begin(), distinct.end(), value) ==
          distinct.end()) {
        distinct.push_back(std::move(value));
      }
    }
    if (distinct.size() == 1) {
      oc.status = DecodeStatus::Recovered;
      oc.value = distinct[0];
    } else {
      oc.status = DecodeStatus::Ambiguous;
      oc.conflicting = std::move(distinct);
    }
    out.push_back({k, std::move(oc)});
  }
  return out;
}

inline DecodeOutcome achievability_decode(
    const VersConfig& c, const std::vector<WorkerReport>& reports,
    std::size_t honest_owner) {
  for (std::size_t a : c.adversary_set) {
    if (a == honest_owner) {
      throw InvalidConfig("decode target must be an honest owner");
    }
  }
  if (honest_owner >= c.num_owners) {
    throw InvalidConfig("owner index out of range");
  }
  for (auto& [owner, outcome] : decode_honest_owners(c, reports)) {
    if (owner == honest_owner) return std::move(outcome);
  }
  throw InternalInconsistency("honest owner missing from decode sweep");
}

// Per-group linear-system view of the same reports: solution structure of
// Van * u = y for the group's curve coefficients.
struct GroupSolution {
  std::vector<std::size_t> members;
  SolutionKind kind = SolutionKind::Inconsistent;
  std::size_t solution_dim = 0;
};

// Certificate of (non-)uniqueness below threshold. candidates[h][coord]
// lists the distinct values of f(X_k) at honest owner honest_owners[h]
// consistent with some group's solution space.
struct AmbiguityReport {
  std::vector<GroupSolution> groups;
  std::vector<std::size_t> honest_owners;
  std::vector<std::vector<std::vector<FieldElement>>> candidates;
  bool non_unique = false;
};

// Walks every tag group's solution space (up to 64 samples along each null
// direction) and collects the induced candidate decode values.
inline AmbiguityReport ambiguity_analyze(
    const VersConfig& c, const std::vector<WorkerReport>& reports) {
  const PrimeField& f = c.field;
  std::size_t width = c.target.degree() * (c.num_owners - 1) + 1;
  Partition part = partition_by_tags(reports);
  if (part.groups.size() > 8) {
    throw TooLargeToEnumerate("ambiguity analysis supports at most 8 groups");
  }

  AmbiguityReport out;
  std::vector<bool> is_adv(c.num_owners, false);
  for (std::size_t a : c.adversary_set) is_adv[a] = true;
  for (std::size_t k = 0; k < c.num_owners; ++k) {
    if (!is_adv[k]) out.honest_owners.push_back(k);
  }
  out.candidates.assign(
      out.honest_owners.size(),
      std::vector<std::vector<FieldElement>>(c.message_dim));

  // evaluation row at omega_k: descending powers, matching the coefficient
  // vector layout
  auto eval_row = [&](FieldElement w) {
    std::vector<FieldElement> row(width);
    FieldElement acc = f.one();
    for (std::size_t i = 0; i < width; ++i) {
      row[width - 1 - i] = acc;
      acc = f.mul(acc, w);
    }
    return row;
  };
  auto dot = [&](const std::vector<FieldElement>& a,
                 const std::vector<FieldElement>& b) {
    FieldElement acc = f.zero();
    for (std::size_t i = 0; i < a.size(); ++i) {
      acc = f.add(acc, f.mul(a[i], b[i]));
    }
    return acc;
  };

  for (const TagGroup& g : part.groups) {
    GroupSolution gs;
    gs.members = g.members;
    std::vector<FieldElement> alphas;
    for (std::size_t i : g.members) alphas.push_back(reports[i].alpha);
    FieldMatrix a = vandermonde(f, alphas, width - 1);

    bool first_coord = true;
    for (std::size_t coord = 0; coord < c.message_dim; ++coord) {
      std::vector<FieldElement> y;
      for (std::size_t i : g.members) y.push_back(reports[i].result[coord]);
      SolutionSet s = solve(f, a, y);
      if (first_coord || s.kind == SolutionKind::Inconsistent) {
        gs.kind = s.kind;
        gs.solution_dim = s.null_basis.rows();
        first_coord = false;
      }
      if (s.kind == SolutionKind::Inconsistent) continue;

      for (std::size_t h = 0; h < out.honest_owners.size(); ++h) {
        std::vector<FieldElement> row = eval_row(c.omega[out.honest_owners[h]]);
        FieldElement base = dot(row, s.particular);
        auto note = [&](FieldElement value) {
          auto& seen = out.candidates[h][coord];
          if (std::find(seen.begin(), seen.end(), value) == seen.end()) {
            seen.push_back(value);
          }
        };
        note(base);
        std::uint64_t samples =
            std::min<std::uint64_t>(64, f.modulus());
        for (std::size_t b = 0; b < s.null_basis.rows(); ++b) {
          FieldElement slope = dot(row, s.null_basis.row(b));
          for (std::uint64_t lam = 1; lam < samples; ++lam) {
            note(f.add(base, f.mul(f.from_uint(lam), slope)));
          }
        }
      }
    }
    out.groups.push_back(std::move(gs));
  }

  for (const auto& per_owner : out.candidates) {
    for (const auto& per_coord : per_owner) {
      if (per_coord.size() > 1) out.non_unique = true;
    }
  }
  return out;
}

enum class BehaviorFamily { Auto, Exhaustive, Sampled };

struct ThresholdOptions {
  std::size_t t_min = 0;  // 0 = d(K-1)+1
  std::size_t t_max = 0;  // 0 = N
  BehaviorFamily family = BehaviorFamily::Auto;
  std::uint64_t trials = 1;            // owner-data draws
  std::uint64_t trial_begin = 0;       // first trial index (chunked runs)
  std::size_t sampled_behaviors = 32;  // random behaviors when sampling
  std::size_t max_subsets = 256;       // per t; exhaustive below this count
  TagMode tag_mode = TagMode::Oracle;
  // when non-empty, test exactly these behaviors instead of a family
  std::vector<AdversarialBehavior> explicit_behaviors;
};

struct ThresholdRow {
  std::size_t t = 0;
  std::uint64_t attempts = 0;
  std::uint64_t failures = 0;
  std::string behavior_class;
};

struct ThresholdResult {
  std::vector<ThresholdRow> rows;
  // smallest t with zero failures at t and every larger tested t;
  // t_max+1 when no such t exists
  std::size_t empirical_threshold = 0;
  std::string behavior_class;
};

namespace detail {

inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp,
                                 std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (r > cap / (base == 0 ? 1 : base)) return cap + 1;
    r *= base;
  }
  return r;
}

// n-choose-k capped to avoid overflow; returns cap+1 when exceeding cap.
inline std::uint64_t checked_binomial(std::uint64_t n, std::uint64_t k,
                                      std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned long long r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return r;
}

}  // namespace detail

// Sweeps subset sizes t and counts decode failures per t. A failure is any
// honest owner whose decode is not Recovered with the true f(X_k).
inline ThresholdResult threshold_search(const VersConfig& c,
                                        const ThresholdOptions& opts) {
  validate(c);
  const PrimeField& f = c.field;
  std::size_t width = c.target.degree() * (c.num_owners - 1) + 1;
  std::size_t t_min = opts.t_min == 0 ? width : opts.t_min;
  std::size_t t_max = opts.t_max == 0 ? c.num_workers : opts.t_max;
  if (t_min > t_max || t_max > c.num_workers) {
    throw InvalidConfig("threshold sweep range out of bounds");
  }

  std::vector<VersionVector> vvs = enumerate_version_vectors(
      c.num_owners, c.adversary_set, c.num_versions);
  std::size_t beta = c.adversary_set.size();

  // behavior family: exhaustive when v^(beta N) is enumerable
  std::uint64_t behavior_count = detail::checked_pow(
      c.num_versions, beta * c.num_workers, 1ULL << 20);
  std::vector<AdversarialBehavior> behaviors = opts.explicit_behaviors;
  std::string family_name;
  if (!behaviors.empty()) {
    for (const AdversarialBehavior& b : behaviors) validate_behavior(c, b);
    family_name = "explicit";
  } else {
    bool exhaustive;
    switch (opts.family) {
      case BehaviorFamily::Exhaustive:
        if (behavior_count > (1ULL << 20)) {
          throw TooLargeToEnumerate("behavior space exceeds 2^20");
        }
        exhaustive = true;
        break;
      case BehaviorFamily::Sampled:
        exhaustive = false;
        break;
      default:
        exhaustive = behavior_count <= (1ULL << 20);
    }
    if (exhaustive) {
      for (std::uint64_t idx = 0; idx < behavior_count; ++idx) {
        behaviors.push_back(behavior_from_index(c, vvs, idx));
      }
    } else {
      if (c.num_workers >= vvs.size() * (width - 1)) {
        behaviors.push_back(build_converse_behavior(c));
      }
      Rng brng(derive_seed(c.rng_seed, {stream::behavior}));
      for (std::size_t i = 0; i < opts.sampled_behaviors; ++i) {
        behaviors.push_back(random_behavior(c, vvs, brng));
      }
    }
    family_name = exhaustive ? "exhaustive" : "sampled";
  }

  // true values f(X_k) per honest owner per coordinate
  std::vector<bool> is_adv(c.num_owners, false);
  for (std::size_t a : c.adversary_set) is_adv[a] = true;

  ThresholdResult out;
  out.behavior_class = family_name;
  for (std::size_t t = t_min; t <= t_max; ++t) {
    out.rows.push_back({t, 0, 0, out.behavior_class});
  }

  for (std::uint64_t trial = opts.trial_begin;
       trial < opts.trial_begin + opts.trials; ++trial) {
    Rng drng(derive_seed(c.rng_seed, {stream::owner_data, trial}));
    OwnerData data = sample_owner_data(c, drng);
    std::vector<std::vector<FieldElement>> truth(c.num_owners);
    for (std::size_t k = 0; k < c.num_owners; ++k) {
      if (is_adv[k]) continue;
      for (FieldElement coord : data.values[k][0]) {
        truth[k].push_back(eval(f, c.target.poly(), coord));
      }
    }

    for (std::size_t bi = 0; bi < behaviors.size(); ++bi) {
      RoundResult round = run_round(c, data, behaviors[bi], opts.tag_mode);

      for (std::size_t t = t_min; t <= t_max; ++t) {
        ThresholdRow& row = out.rows[t - t_min];
        std::vector<std::vector<std::size_t>> subsets;
        std::uint64_t total = detail::checked_binomial(c.num_workers, t,
                                                       opts.max_subsets);
        if (total <= opts.max_subsets) {
          detail::subsets_lex(c.num_workers, t, subsets);
        } else {
          // always probe the leading block (the converse construction
          // concentrates its groups there), then random subsets
          std::vector<std::size_t> prefix(t);
          std::iota(prefix.begin(), prefix.end(), 0);
          subsets.push_back(std::move(prefix));
          Rng srng(derive_seed(c.rng_seed,
                               {stream::subset, trial, bi, t}));
          while (subsets.size() < opts.max_subsets) {
            // Floyd sampling of a t-subset
            std::vector<std::size_t> pick;
            std::vector<bool> in(c.num_workers, false);
            for (std::size_t j = c.num_workers - t; j < c.num_workers; ++j) {
              std::size_t x = srng.uniform_below(j + 1);
              if (in[x]) x = j;
              in[x] = true;
            }
            for (std::size_t n = 0; n < c.num_workers; ++n) {
              if (in[n]) pick.push_back(n);
            }
            subsets.push_back(std::move(pick));
          }
        }

        for (const auto& subset : subsets) {
          std::vector<WorkerReport> queried;
          queried.reserve(subset.size());
          for (std::size_t n : subset) queried.push_back(round.reports[n]);
          row.attempts += 1;
          bool ok = true;
          for (const auto& [owner, outcome] :
               decode_honest_owners(c, queried)) {
            if (outcome.status != DecodeStatus::Recovered ||
                outcome.value != truth[owner]) {
              ok = false;
              break;
            }
          }
          if (!ok) row.failures += 1;
        }
      }
    }
  }

  out.empirical_threshold = t_max + 1;
  for (std::size_t i = out.rows.size(); i-- > 0;) {
    if (out.rows[i].failures == 0) {
      out.empirical_threshold = out.rows[i].t;
    } else {
      break;
    }
  }
  return out;
}

}  // namespace vers
