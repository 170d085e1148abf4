#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vers/algebra.hpp"
#include "vers/errors.hpp"
#include "vers/field.hpp"
#include "vers/poly.hpp"
#include "vers/rng.hpp"

namespace vers {

// Full parameter set for one protocol instance. Owners hold the encode
// points omega, workers the evaluation points alpha; all K+N points are
// pairwise distinct.
struct VersConfig {
  PrimeField field;
  std::size_t num_owners;                  // K
  std::size_t num_workers;                 // N
  std::vector<std::size_t> adversary_set;  // 0-based, strictly increasing
  std::size_t num_versions;                // v
  TargetFunction target;
  std::vector<FieldElement> omega;         // K points
  std::vector<FieldElement> alpha;         // N points
  std::size_t message_dim = 1;             // s
  std::uint64_t rng_seed = 0;
};

inline void validate(const VersConfig& c) {
  detail::check_adversary_set(c.num_owners, c.adversary_set, c.num_versions);
  if (c.num_owners < 1 || c.num_owners > c.num_workers) {
    throw InvalidConfig("need 1 <= K <= N");
  }
  if (c.message_dim < 1) throw InvalidConfig("message dimension must be >= 1");
  if (c.omega.size() != c.num_owners || c.alpha.size() != c.num_workers) {
    throw InvalidConfig("evaluation point counts must match K and N");
  }
  if (c.num_owners + c.num_workers > c.field.modulus()) {
    throw InvalidConfig("field too small for K + N distinct points");
  }
  std::vector<FieldElement> all = c.omega;
  all.insert(all.end(), c.alpha.begin(), c.alpha.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (all[i] == all[j]) {
        throw InvalidConfig("owner and worker points must all be distinct");
      }
    }
  }
}

// Config with the default point layout omega = 1..K, alpha = K+1..K+N.
inline VersConfig make_config(PrimeField field, std::size_t num_owners,
                              std::size_t num_workers,
                              std::vector<std::size_t> adversary_set,
                              std::size_t num_versions, TargetFunction target,
                              std::size_t message_dim = 1,
                              std::uint64_t rng_seed = 0) {
  std::vector<FieldElement> omega, alpha;
  for (std::size_t k = 0; k < num_owners; ++k) {
    omega.push_back(field.from_uint(k + 1));
  }
  for (std::size_t n = 0; n < num_workers; ++n) {
    alpha.push_back(field.from_uint(num_owners + n + 1));
  }
  VersConfig c{std::move(field), num_owners,      num_workers,
               std::move(adversary_set), num_versions, std::move(target),
               std::move(omega),  std::move(alpha), message_dim,
               rng_seed};
  validate(c);
  return c;
}

// The section-6 analysis view of a config (workers do not enter).
inline AnalysisParams analysis_params(const VersConfig& c) {
  return {c.field, c.num_owners, c.adversary_set,
          c.num_versions, c.target, c.omega};
}

inline std::size_t recovery_threshold_bound(const VersConfig& c) {
  // v^beta d(K-1) + 1
  return detail::pow_u64(c.num_versions, c.adversary_set.size()) *
             c.target.degree() * (c.num_owners - 1) +
         1;
}

// values[k][i]: version i of owner k's message, each message_dim coordinates
// long. Honest owners have exactly one version, adversarial owners exactly v.
struct OwnerData {
  std::vector<std::vector<std::vector<FieldElement>>> values;
};

// assignment[n]: the version vector worker n observes (which version each
// adversarial owner sent it; 0 at honest positions).
struct AdversarialBehavior {
  std::vector<VersionVector> assignment;
};

enum class TagMode { Oracle, Fingerprint };

// Summary a worker attaches to its report so decoders can group agreeing
// workers. Oracle mode is injective by construction; fingerprint mode is a
// keyed polynomial evaluation with a bounded collision probability.
struct TagValue {
  TagMode mode = TagMode::Oracle;
  std::string identifier;  // oracle mode
  FieldElement value;      // fingerprint mode

  friend bool operator==(const TagValue&, const TagValue&) = default;
};

// Stable string key for grouping and serialization.
inline std::string tag_key_string(const TagValue& t) {
  return t.mode == TagMode::Oracle ? t.identifier
                                   : "f:" + std::to_string(t.value.value);
}

struct WorkerReport {
  std::size_t worker = 0;  // n, 0-based
  FieldElement alpha;
  std::vector<FieldElement> result;  // f(W_n), coordinate-wise
  TagValue tag;

  friend bool operator==(const WorkerReport&, const WorkerReport&) = default;
};

inline void validate_behavior(const VersConfig& c,
                              const AdversarialBehavior& b) {
  if (b.assignment.size() != c.num_workers) {
    throw InvalidBehavior("behavior must assign a version vector per worker");
  }
  std::vector<bool> is_adv(c.num_owners, false);
  for (std::size_t a : c.adversary_set) is_adv[a] = true;
  for (const VersionVector& vv : b.assignment) {
    if (vv.entries.size() != c.num_owners) {
      throw InvalidBehavior("version vector length must equal K");
    }
    for (std::size_t k = 0; k < c.num_owners; ++k) {
      if (is_adv[k]) {
        if (vv.entries[k] < 1 || vv.entries[k] > c.num_versions) {
          throw InvalidBehavior("adversarial version out of range");
        }
      } else if (vv.entries[k] != 0) {
        throw InvalidBehavior("honest owners have no versions to pick");
      }
    }
  }
}

inline void validate_owner_data(const VersConfig& c, const OwnerData& d) {
  if (d.values.size() != c.num_owners) {
    throw InvalidConfig("owner data must cover every owner");
  }
  std::vector<bool> is_adv(c.num_owners, false);
  for (std::size_t a : c.adversary_set) is_adv[a] = true;
  for (std::size_t k = 0; k < c.num_owners; ++k) {
    std::size_t want = is_adv[k] ? c.num_versions : 1;
    if (d.values[k].size() != want) {
      throw InvalidConfig("wrong version count in owner data");
    }
    for (const auto& msg : d.values[k]) {
      if (msg.size() != c.message_dim) {
        throw InvalidConfig("message coordinate count must equal s");
      }
    }
  }
}

// Honest messages i.i.d. uniform; each adversarial owner gets v pairwise
// distinct uniform messages (it is free to pick any values, and distinct
// versions keep desk-scale fields from accidentally merging tag groups).
inline OwnerData sample_owner_data(const VersConfig& c, Rng& rng) {
  std::vector<bool> is_adv(c.num_owners, false);
  for (std::size_t a : c.adversary_set) is_adv[a] = true;
  OwnerData data;
  data.values.resize(c.num_owners);
  for (std::size_t k = 0; k < c.num_owners; ++k) {
    std::size_t count = is_adv[k] ? c.num_versions : 1;
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<FieldElement> msg(c.message_dim);
      do {
        for (auto& coord : msg) coord = uniform_element(c.field, rng);
      } while (std::find(data.values[k].begin(), data.values[k].end(), msg) !=
               data.values[k].end());
      data.values[k].push_back(std::move(msg));
    }
  }
  return data;
}

// What one worker receives: K messages of message_dim coordinates.
using MessageTuple = std::vector<std::vector<FieldElement>>;

inline std::vector<MessageTuple> distribute(const VersConfig& c,
                                            const OwnerData& data,
                                            const AdversarialBehavior& b) {
  validate(c);
  validate_owner_data(c, data);
  validate_behavior(c, b);
  std::vector<MessageTuple> received(c.num_workers);
  for (std::size_t n = 0; n < c.num_workers; ++n) {
    received[n].resize(c.num_owners);
    for (std::size_t k = 0; k < c.num_owners; ++k) {
      std::uint32_t ver = b.assignment[n].entries[k];
      received[n][k] = data.values[k][ver == 0 ? 0 : ver - 1];
    }
  }
  return received;
}

// Lagrange encoding at the worker's point: W_n = sum_k gamma_{k,n} X_{k,n}
// with gamma_{k,n} = prod_{j != k} (alpha_n - omega_j) / (omega_k - omega_j).
// alpha_n may equal some omega_k; then the coefficients collapse to the
// indicator of k.
inline std::vector<FieldElement> worker_encode(const VersConfig& c,
                                               const MessageTuple& tuple,
                                               std::size_t n) {
  if (tuple.size() != c.num_owners) {
    throw InvalidConfig("received tuple must have one message per owner");
  }
  const PrimeField& f = c.field;
  FieldElement an = c.alpha.at(n);
  std::vector<FieldElement> w(c.message_dim, f.zero());
  for (std::size_t k = 0; k < c.num_owners; ++k) {
    FieldElement num = f.one();
    FieldElement den = f.one();
    for (std::size_t j = 0; j < c.num_owners; ++j) {
      if (j == k) continue;
      num = f.mul(num, f.sub(an, c.omega[j]));
      den = f.mul(den, f.sub(c.omega[k], c.omega[j]));
    }
    FieldElement gamma = f.div(num, den);
    for (std::size_t coord = 0; coord < c.message_dim; ++coord) {
      w[coord] = f.add(w[coord], f.mul(gamma, tuple[k][coord]));
    }
  }
  return w;
}

inline std::vector<FieldElement> worker_compute(
    const VersConfig& c, const std::vector<FieldElement>& w) {
  std::vector<FieldElement> out;
  out.reserve(w.size());
  for (FieldElement coord : w) {
    out.push_back(eval(c.field, c.target.poly(), coord));
  }
  return out;
}

// tag_n = J(X_{1,n}, ..., X_{K,n}). Oracle mode: a canonical injective
// identifier of the tuple. Fingerprint mode: evaluate the monic polynomial
// whose lower coefficients are the flattened tuple at the shared secret key.
inline TagValue worker_tag(const VersConfig& c, const MessageTuple& tuple,
                           TagMode mode, FieldElement tag_key = {}) {
  TagValue t;
  t.mode = mode;
  if (mode == TagMode::Oracle) {
    std::string id = "o:";
    for (std::size_t k = 0; k < tuple.size(); ++k) {
      for (std::size_t i = 0; i < tuple[k].size(); ++i) {
        if (k + i > 0) id += '-';
        id += std::to_string(tuple[k][i].value);
      }
    }
    t.identifier = std::move(id);
    return t;
  }
  const PrimeField& f = c.field;
  FieldElement acc = f.one();  // monic leading coefficient
  for (const auto& msg : tuple) {
    for (FieldElement coord : msg) {
      acc = f.add(f.mul(acc, tag_key), coord);
    }
  }
  t.value = acc;
  return t;
}

namespace stream {
// Sub-seed labels; every consumer of the round seed draws from its own
// derived stream.
constexpr std::uint64_t owner_data = 1;
constexpr std::uint64_t tag_key = 2;
constexpr std::uint64_t trial = 3;
constexpr std::uint64_t point_shuffle = 4;
constexpr std::uint64_t behavior = 5;
constexpr std::uint64_t subset = 6;
}  // namespace stream

struct RoundResult {
  std::vector<WorkerReport> reports;
  TagMode tag_mode = TagMode::Oracle;
  FieldElement tag_key;  // fingerprint mode only
};

// One full protocol round: distribute, encode, compute, tag. Deterministic
// in (config, data, behavior, config.rng_seed).
inline RoundResult run_round(const VersConfig& c, const OwnerData& data,
                             const AdversarialBehavior& behavior,
                             TagMode mode) {
  std::vector<MessageTuple> received = distribute(c, data, behavior);
  RoundResult out;
  out.tag_mode = mode;
  if (mode == TagMode::Fingerprint) {
    Rng key_rng(derive_seed(c.rng_seed, {stream::tag_key}));
    out.tag_key = uniform_element(c.field, key_rng);
  }
  out.reports.reserve(c.num_workers);
  for (std::size_t n = 0; n < c.num_workers; ++n) {
    WorkerReport r;
    r.worker = n;
    r.alpha = c.alpha[n];
    r.result = worker_compute(c, worker_encode(c, received[n], n));
    r.tag = worker_tag(c, received[n], mode, out.tag_key);
    out.reports.push_back(std::move(r));
  }
  return out;
}

// The worst-case distribution pattern: the first v^beta d(K-1) workers are
// split into v^beta groups of d(K-1), group i observing version vector i;
// any remaining workers observe the first version vector.
inline AdversarialBehavior build_converse_behavior(const VersConfig& c) {
  validate(c);
  std::vector<VersionVector> vvs = enumerate_version_vectors(
      c.num_owners, c.adversary_set, c.num_versions);
  std::size_t group = c.target.degree() * (c.num_owners - 1);
  std::size_t covered = vvs.size() * group;
  if (c.num_workers < covered) {
    throw InvalidConfig("need at least v^beta d(K-1) workers, got " +
                        std::to_string(c.num_workers));
  }
  AdversarialBehavior b;
  b.assignment.reserve(c.num_workers);
  for (std::size_t n = 0; n < c.num_workers; ++n) {
    b.assignment.push_back(n < covered ? vvs[n / group] : vvs[0]);
  }
  return b;
}

// Behavior where every worker observes the same (first) version vector.
inline AdversarialBehavior uniform_behavior(const VersConfig& c) {
  std::vector<VersionVector> vvs = enumerate_version_vectors(
      c.num_owners, c.adversary_set, c.num_versions);
  return AdversarialBehavior{
      std::vector<VersionVector>(c.num_workers, vvs[0])};
}

// Behavior indexed by a flat number in [0, v^(beta N)): worker n observes
// version vector (index / v^(beta n)) mod v^beta. Spans all behaviors.
inline AdversarialBehavior behavior_from_index(
    const VersConfig& c, const std::vector<VersionVector>& vvs,
    unsigned long long index) {
  AdversarialBehavior b;
  b.assignment.reserve(c.num_workers);
  unsigned long long rem = index;
  for (std::size_t n = 0; n < c.num_workers; ++n) {
    b.assignment.push_back(vvs[rem % vvs.size()]);
    rem /= vvs.size();
  }
  return b;
}

// Uniformly random behavior, one independent version vector per worker.
inline AdversarialBehavior random_behavior(const VersConfig& c,
                                           const std::vector<VersionVector>& vvs,
                                           Rng& rng) {
  AdversarialBehavior b;
  b.assignment.reserve(c.num_workers);
  for (std::size_t n = 0; n < c.num_workers; ++n) {
    b.assignment.push_back(vvs[rng.uniform_below(vvs.size())]);
  }
  return b;
}

}  // namespace vers
