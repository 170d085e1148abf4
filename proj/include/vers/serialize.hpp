#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vers/algebra.hpp"
#include "vers/decode.hpp"
#include "vers/field.hpp"
#include "vers/poly.hpp"
#include "vers/protocol.hpp"

// JSON views of the library types. nlohmann::json keeps object keys sorted,
// so every dump is canonical; all field residues appear as decimal integers.

namespace vers {

using json = nlohmann::json;

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[x & 0xf];
    x >>= 4;
  }
  return out;
}

constexpr int artifact_version = 1;

// The reproducibility stamp every output file carries.
inline json meta_json(std::uint64_t seed, const std::string& config_hash) {
  return json{{"seed", seed},
              {"config_hash", config_hash},
              {"artifact_version", artifact_version}};
}

inline json matrix_json(const PrimeField& f, const FieldMatrix& m) {
  std::vector<std::uint64_t> entries;
  entries.reserve(m.rows() * m.cols());
  for (FieldElement e : m.entries()) entries.push_back(e.value);
  return json{{"p", f.modulus()},
              {"rows", m.rows()},
              {"cols", m.cols()},
              {"entries", entries}};
}

inline json poly_json(const Poly& p) {
  std::vector<std::uint64_t> coeffs;
  for (FieldElement c : p.coeffs()) coeffs.push_back(c.value);
  return json(coeffs);
}

// Exponent map keyed by variable name: owner k's version-t value is "x{k}v{t}"
// (honest owners always carry version 0).
inline json monomial_json(const Monomial& m) {
  json out = json::object();
  for (const auto& [var, power] : m.factors) {
    out["x" + std::to_string(var.owner) + "v" + std::to_string(var.version)] =
        power;
  }
  return out;
}

inline json version_vector_json(const VersionVector& vv) {
  return json(vv.entries);
}

inline std::string tag_mode_name(TagMode m) {
  return m == TagMode::Oracle ? "oracle" : "fingerprint";
}

inline json report_json(const WorkerReport& r) {
  std::vector<std::uint64_t> result;
  for (FieldElement e : r.result) result.push_back(e.value);
  return json{{"n", r.worker},
              {"alpha", r.alpha.value},
              {"result", result},
              {"tag", tag_key_string(r.tag)}};
}

inline std::string decode_status_name(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::Recovered:
      return "recovered";
    case DecodeStatus::Ambiguous:
      return "ambiguous";
    default:
      return "insufficient";
  }
}

inline json values_json(const std::vector<FieldElement>& v) {
  std::vector<std::uint64_t> out;
  for (FieldElement e : v) out.push_back(e.value);
  return json(out);
}

inline json outcome_json(std::size_t owner, const DecodeOutcome& oc) {
  json out{{"owner", owner}, {"status", decode_status_name(oc.status)}};
  if (oc.status == DecodeStatus::Recovered) {
    out["value"] = values_json(oc.value);
  } else if (oc.status == DecodeStatus::Ambiguous) {
    json c = json::array();
    for (const auto& v : oc.conflicting) c.push_back(values_json(v));
    out["conflicting"] = c;
  }
  return out;
}

inline std::string solution_kind_name(SolutionKind k) {
  switch (k) {
    case SolutionKind::Unique:
      return "unique";
    case SolutionKind::Underdetermined:
      return "underdetermined";
    default:
      return "inconsistent";
  }
}

inline json ambiguity_json(const AmbiguityReport& rep) {
  json groups = json::array();
  for (const GroupSolution& g : rep.groups) {
    groups.push_back(json{{"members", g.members},
                          {"kind", solution_kind_name(g.kind)},
                          {"solution_dim", g.solution_dim}});
  }
  json candidates = json::array();
  for (const auto& per_owner : rep.candidates) {
    json coords = json::array();
    for (const auto& per_coord : per_owner) {
      json vals = json::array();
      for (FieldElement v : per_coord) vals.push_back(v.value);
      coords.push_back(vals);
    }
    candidates.push_back(coords);
  }
  return json{{"groups", groups},
              {"honest_owners", rep.honest_owners},
              {"candidates", candidates},
              {"non_unique", rep.non_unique}};
}

// CSV table for a threshold sweep: comment lines with the reproducibility
// stamp, then one row per subset size.
inline std::string threshold_csv(const ThresholdResult& res,
                                 std::uint64_t seed,
                                 const std::string& config_hash,
                                 const std::string& behavior_class) {
  std::string out;
  out += "# seed=" + std::to_string(seed) + " config_hash=" + config_hash +
         " artifact_version=" + std::to_string(artifact_version) + "\n";
  out += "# empirical_threshold=" + std::to_string(res.empirical_threshold) +
         "\n";
  out += "t,trials,failures,behavior_class\n";
  for (const ThresholdRow& row : res.rows) {
    out += std::to_string(row.t) + "," + std::to_string(row.attempts) + "," +
           std::to_string(row.failures) + "," + behavior_class + "\n";
  }
  return out;
}

}  // namespace vers
