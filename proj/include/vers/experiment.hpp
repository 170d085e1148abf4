#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "vers/decode.hpp"
#include "vers/serialize.hpp"

namespace vers {

// Command-line values that replace the matching config fields before
// anything is derived from them.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> field;
  std::optional<std::string> tag_mode;
  bool reveal_tag_key = false;
};

struct ExperimentConfig {
  VersConfig vers;
  TagMode tag_mode = TagMode::Oracle;
  std::string behavior_class = "random";  // converse|random|exhaustive|file
  std::string behavior_file;              // behavior_class == "file"
  std::uint64_t trials = 1;
  std::string subset_policy = "all";  // "all" | "sample:<n>"
  std::size_t query_size = 0;         // simulate: reports decoded, 0 = all
  std::size_t t_min = 0;              // threshold sweep range, 0 = default
  std::size_t t_max = 0;
  std::uint64_t collision_trials = 100000;
  bool reveal_tag_key = false;
  json canonical;    // effective config, echoed into every output
  std::string hash;  // fnv1a64 of the canonical dump
};

namespace detail {

inline const json& require_key(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw InvalidConfig(std::string("config missing \"") + key + "\"");
  }
  return *it;
}

inline std::vector<FieldElement> residues(const PrimeField& f, const json& j,
                                          const char* what) {
  if (!j.is_array()) {
    throw InvalidConfig(std::string(what) + " must be an array of integers");
  }
  std::vector<FieldElement> out;
  for (const json& e : j) {
    if (e.is_number_integer() && e.get<long long>() < 0) {
      out.push_back(f.from_int(e.get<long long>()));
    } else {
      out.push_back(f.from_uint(e.get<std::uint64_t>()));
    }
  }
  return out;
}

// "sample:<n>" with n a positive integer and nothing trailing
inline std::size_t parse_sample_count(const std::string& policy) {
  if (policy.rfind("sample:", 0) != 0) {
    throw InvalidConfig("subset_policy must be \"all\" or \"sample:<n>\"");
  }
  std::string count = policy.substr(7);
  std::size_t n = 0, used = 0;
  try {
    n = std::stoull(count, &used);
  } catch (const std::exception&) {
    throw InvalidConfig("subset_policy sample count is not a number");
  }
  if (used != count.size() || n < 1) {
    throw InvalidConfig("subset_policy sample count must be a positive "
                        "integer");
  }
  return n;
}

}  // namespace detail

inline TagMode parse_tag_mode(const std::string& s) {
  if (s == "oracle") return TagMode::Oracle;
  if (s == "fingerprint") return TagMode::Fingerprint;
  throw InvalidConfig("tag_mode must be \"oracle\" or \"fingerprint\"");
}

// Builds the effective experiment from a parsed config plus overrides.
// Point sets default to omega = 1..K, alpha = K+1..K+N when absent.
inline ExperimentConfig experiment_from_json(json raw,
                                             const CliOverrides& ov) {
  if (!raw.is_object()) throw InvalidConfig("config must be a JSON object");
  if (ov.seed) raw["seed"] = *ov.seed;
  if (ov.field) raw["field"] = *ov.field;
  if (ov.tag_mode) raw["tag_mode"] = *ov.tag_mode;
  if (ov.reveal_tag_key) raw["reveal_tag_key"] = true;

  PrimeField f(detail::require_key(raw, "field").get<std::uint64_t>());
  std::size_t num_owners =
      detail::require_key(raw, "num_owners").get<std::size_t>();
  std::size_t num_workers =
      detail::require_key(raw, "num_workers").get<std::size_t>();
  std::vector<std::size_t> adversary_set =
      raw.value("adversary_set", std::vector<std::size_t>{});
  std::size_t num_versions = raw.value("num_versions", std::size_t{1});
  std::vector<FieldElement> target_coeffs =
      detail::residues(f, detail::require_key(raw, "target"), "target");
  TargetFunction target{Poly(target_coeffs)};
  std::size_t message_dim = raw.value("message_dim", std::size_t{1});
  std::uint64_t seed = raw.value("seed", std::uint64_t{0});

  VersConfig c{f,      num_owners, num_workers, adversary_set, num_versions,
               target, {},         {},          message_dim,   seed};
  if (raw.contains("omega")) {
    c.omega = detail::residues(f, raw["omega"], "omega");
  } else {
    for (std::size_t k = 0; k < num_owners; ++k) {
      c.omega.push_back(f.from_uint(k + 1));
    }
  }
  if (raw.contains("alpha")) {
    c.alpha = detail::residues(f, raw["alpha"], "alpha");
  } else {
    for (std::size_t n = 0; n < num_workers; ++n) {
      c.alpha.push_back(f.from_uint(num_owners + n + 1));
    }
  }
  validate(c);

  ExperimentConfig ec{std::move(c),
                      parse_tag_mode(raw.value("tag_mode", "oracle")),
                      raw.value("behavior_class", "random"),
                      raw.value("behavior_file", ""),
                      raw.value("trials", std::uint64_t{1}),
                      raw.value("subset_policy", "all"),
                      raw.value("query_size", std::size_t{0}),
                      raw.value("t_min", std::size_t{0}),
                      raw.value("t_max", std::size_t{0}),
                      raw.value("collision_trials", std::uint64_t{100000}),
                      raw.value("reveal_tag_key", false),
                      {},
                      {}};

  if (ec.behavior_class != "converse" && ec.behavior_class != "random" &&
      ec.behavior_class != "exhaustive" && ec.behavior_class != "file") {
    throw InvalidConfig(
        "behavior_class must be converse, random, exhaustive, or file");
  }
  if (ec.behavior_class == "file" && ec.behavior_file.empty()) {
    throw InvalidConfig("behavior_class \"file\" needs behavior_file");
  }
  if (ec.query_size > ec.vers.num_workers) {
    throw InvalidConfig("query_size exceeds the worker count");
  }
  if (ec.trials < 1) throw InvalidConfig("trials must be >= 1");
  if (ec.collision_trials < 1) {
    throw InvalidConfig("collision_trials must be >= 1");
  }
  if (ec.subset_policy != "all") {
    detail::parse_sample_count(ec.subset_policy);
  }

  std::vector<std::uint64_t> omega_echo, alpha_echo, target_echo;
  for (FieldElement e : ec.vers.omega) omega_echo.push_back(e.value);
  for (FieldElement e : ec.vers.alpha) alpha_echo.push_back(e.value);
  for (FieldElement e : target_coeffs) target_echo.push_back(e.value);
  ec.canonical = json{{"field", f.modulus()},
                      {"num_owners", num_owners},
                      {"num_workers", num_workers},
                      {"adversary_set", adversary_set},
                      {"num_versions", num_versions},
                      {"target", target_echo},
                      {"message_dim", message_dim},
                      {"omega", omega_echo},
                      {"alpha", alpha_echo},
                      {"seed", seed},
                      {"tag_mode", tag_mode_name(ec.tag_mode)},
                      {"behavior_class", ec.behavior_class},
                      {"behavior_file", ec.behavior_file},
                      {"trials", ec.trials},
                      {"subset_policy", ec.subset_policy},
                      {"query_size", ec.query_size},
                      {"t_min", ec.t_min},
                      {"t_max", ec.t_max},
                      {"collision_trials", ec.collision_trials},
                      {"reveal_tag_key", ec.reveal_tag_key}};
  ec.hash = hex64(fnv1a64(ec.canonical.dump()));
  return ec;
}

inline ExperimentConfig load_experiment(const std::string& path,
                                        const CliOverrides& ov) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidConfig("cannot read config: " + path);
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidConfig("config parse error in " + path + ": " + e.what());
  }
  ExperimentConfig ec = experiment_from_json(std::move(raw), ov);
  if (!ec.behavior_file.empty()) {
    std::filesystem::path bf = ec.behavior_file;
    if (bf.is_relative()) {
      bf = std::filesystem::path(path).parent_path() / bf;
    }
    if (!std::filesystem::exists(bf)) {
      throw InvalidConfig("behavior file not found: " + bf.string());
    }
    ec.behavior_file = bf.string();
  }
  return ec;
}

// Behavior file format: {"behavior": [[K versions] x N]}.
inline AdversarialBehavior load_behavior_file(const ExperimentConfig& ec) {
  std::ifstream in(ec.behavior_file, std::ios::binary);
  if (!in) throw InvalidConfig("cannot read behavior: " + ec.behavior_file);
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidConfig("behavior parse error: " + std::string(e.what()));
  }
  const json& rows = detail::require_key(raw, "behavior");
  AdversarialBehavior b;
  for (const json& row : rows) {
    VersionVector vv;
    for (const json& e : row) vv.entries.push_back(e.get<std::uint32_t>());
    b.assignment.push_back(std::move(vv));
  }
  validate_behavior(ec.vers, b);
  return b;
}

// The one behavior a simulation round runs under.
inline AdversarialBehavior simulate_behavior(const ExperimentConfig& ec) {
  const VersConfig& c = ec.vers;
  if (ec.behavior_class == "converse") return build_converse_behavior(c);
  if (ec.behavior_class == "file") return load_behavior_file(ec);
  if (ec.behavior_class == "random") {
    std::vector<VersionVector> vvs = enumerate_version_vectors(
        c.num_owners, c.adversary_set, c.num_versions);
    Rng rng(derive_seed(c.rng_seed, {stream::behavior}));
    return random_behavior(c, vvs, rng);
  }
  throw InvalidConfig("behavior_class \"" + ec.behavior_class +
                      "\" is not a single behavior; use converse, random, "
                      "or file for simulate");
}

// Splits [0, total) into contiguous chunks, runs work(begin, count) on up
// to jobs threads, and returns the per-chunk results in chunk order.
template <typename Result, typename Work>
inline std::vector<Result> run_chunked(std::uint64_t total, std::size_t jobs,
                                       Work work) {
  jobs = std::max<std::size_t>(1, jobs);
  std::size_t chunks = static_cast<std::size_t>(
      std::min<std::uint64_t>(jobs, std::max<std::uint64_t>(1, total)));
  std::vector<Result> results(chunks);
  if (chunks <= 1) {
    results[0] = work(std::uint64_t{0}, total);
    return results;
  }
  std::vector<std::thread> pool;
  std::uint64_t base = total / chunks, rem = total % chunks, begin = 0;
  for (std::size_t i = 0; i < chunks; ++i) {
    std::uint64_t count = base + (i < rem ? 1 : 0);
    pool.emplace_back([&results, &work, i, begin, count] {
      results[i] = work(begin, count);
    });
    begin += count;
  }
  for (std::thread& th : pool) th.join();
  return results;
}

struct SimulateResult {
  json transcript;
  json decode;
  std::size_t honest = 0;
  std::size_t recovered = 0;
};

inline SimulateResult run_simulate(const ExperimentConfig& ec) {
  const VersConfig& c = ec.vers;
  Rng drng(derive_seed(c.rng_seed, {stream::owner_data, 0}));
  OwnerData data = sample_owner_data(c, drng);
  AdversarialBehavior behavior = simulate_behavior(ec);
  RoundResult round = run_round(c, data, behavior, ec.tag_mode);

  std::size_t q = ec.query_size == 0 ? c.num_workers : ec.query_size;
  std::vector<WorkerReport> queried(round.reports.begin(),
                                    round.reports.begin() + q);
  auto outcomes = decode_honest_owners(c, queried);

  json behavior_rows = json::array();
  for (const VersionVector& vv : behavior.assignment) {
    behavior_rows.push_back(version_vector_json(vv));
  }
  json reports = json::array();
  for (const WorkerReport& r : round.reports) {
    reports.push_back(report_json(r));
  }

  SimulateResult out;
  out.transcript = json{{"meta", meta_json(c.rng_seed, ec.hash)},
                        {"config", ec.canonical},
                        {"tag_mode", tag_mode_name(ec.tag_mode)},
                        {"behavior", behavior_rows},
                        {"reports", reports}};
  if (ec.reveal_tag_key && ec.tag_mode == TagMode::Fingerprint) {
    out.transcript["tag_key"] = round.tag_key.value;
  }

  json outcome_rows = json::array();
  json expected_rows = json::array();
  bool all_recovered = true;
  for (const auto& [owner, oc] : outcomes) {
    outcome_rows.push_back(outcome_json(owner, oc));
    std::vector<FieldElement> truth;
    for (FieldElement coord : data.values[owner][0]) {
      truth.push_back(eval(c.field, c.target.poly(), coord));
    }
    expected_rows.push_back(
        json{{"owner", owner}, {"value", values_json(truth)}});
    out.honest += 1;
    if (oc.status == DecodeStatus::Recovered) {
      out.recovered += 1;
    } else {
      all_recovered = false;
    }
  }

  std::vector<std::size_t> query(q);
  std::iota(query.begin(), query.end(), 0);
  out.decode = json{{"meta", meta_json(c.rng_seed, ec.hash)},
                    {"query", query},
                    {"outcomes", outcome_rows},
                    {"expected", expected_rows}};
  if (!all_recovered &&
      partition_by_tags(queried).groups.size() <= 8) {
    out.decode["ambiguity"] = ambiguity_json(ambiguity_analyze(c, queried));
  }
  return out;
}

inline ThresholdResult run_threshold(const ExperimentConfig& ec,
                                     std::size_t jobs) {
  const VersConfig& c = ec.vers;
  ThresholdOptions opts;
  opts.t_min = ec.t_min;
  opts.t_max = ec.t_max;
  opts.tag_mode = ec.tag_mode;

  std::size_t width = c.target.degree() * (c.num_owners - 1) + 1;
  std::size_t lo = opts.t_min ? opts.t_min : width;
  std::size_t hi = opts.t_max ? opts.t_max : c.num_workers;
  if (ec.subset_policy == "all") {
    for (std::size_t t = lo; t <= hi; ++t) {
      if (detail::checked_binomial(c.num_workers, t, 1ULL << 20) >
          (1ULL << 20)) {
        throw InvalidConfig(
            "subset space too large for policy \"all\"; use \"sample:<n>\"");
      }
    }
    opts.max_subsets = 1ULL << 20;
  } else {
    opts.max_subsets = detail::parse_sample_count(ec.subset_policy);
  }

  if (ec.behavior_class == "exhaustive") {
    opts.family = BehaviorFamily::Exhaustive;
  } else if (ec.behavior_class == "file") {
    opts.explicit_behaviors = {load_behavior_file(ec)};
  } else {
    opts.family = BehaviorFamily::Sampled;
  }

  auto chunks = run_chunked<ThresholdResult>(
      ec.trials, jobs,
      [&c, &opts](std::uint64_t begin, std::uint64_t count) {
        ThresholdOptions local = opts;
        local.trial_begin = begin;
        local.trials = count;
        return threshold_search(c, local);
      });

  ThresholdResult merged = chunks[0];
  for (std::size_t i = 1; i < chunks.size(); ++i) {
    for (std::size_t r = 0; r < merged.rows.size(); ++r) {
      merged.rows[r].attempts += chunks[i].rows[r].attempts;
      merged.rows[r].failures += chunks[i].rows[r].failures;
    }
  }
  merged.empirical_threshold = hi + 1;
  for (std::size_t i = merged.rows.size(); i-- > 0;) {
    if (merged.rows[i].failures == 0) {
      merged.empirical_threshold = merged.rows[i].t;
    } else {
      break;
    }
  }
  return merged;
}

struct MatrixResult {
  json characteristic;
  json relation;
  json monomials;
  std::optional<json> permutations;
  std::string warning;  // set when the permutation report is omitted
};

inline MatrixResult run_matrix(const ExperimentConfig& ec) {
  const PrimeField& f = ec.vers.field;
  AnalysisParams ap = analysis_params(ec.vers);
  CharacteristicMatrix cm = characteristic_matrix(ap);
  RelationMatrix rm = relation_matrix(f, cm);
  json meta = meta_json(ec.vers.rng_seed, ec.hash);

  MatrixResult out;
  out.characteristic = matrix_json(f, cm.matrix);
  out.characteristic["meta"] = meta;
  out.characteristic["block_rows"] = cm.block_rows;
  json vv_rows = json::array();
  for (const VersionVector& vv : cm.version_vectors) {
    vv_rows.push_back(version_vector_json(vv));
  }
  out.characteristic["version_vectors"] = vv_rows;

  out.relation = matrix_json(f, rm.matrix);
  out.relation["meta"] = meta;
  out.relation["block_count"] = rm.block_count;
  out.relation["block_width"] = rm.block_width;

  json mono_rows = json::array();
  for (const Monomial& m : cm.monomials) mono_rows.push_back(monomial_json(m));
  out.monomials = json{{"meta", meta},
                       {"length", cm.monomials.size()},
                       {"monomials", mono_rows}};

  if (rm.block_count > 8) {
    out.warning = "permutation report omitted: more than 8 column blocks";
    return out;
  }
  std::size_t beta = ec.vers.adversary_set.size();
  std::uint64_t expected = 1;
  for (std::size_t i = 0; i < beta; ++i) {
    std::uint64_t fact = 1;
    for (std::uint64_t x = 2; x <= ec.vers.num_versions; ++x) fact *= x;
    expected *= fact;
  }

  std::vector<std::size_t> perm(rm.block_count);
  std::iota(perm.begin(), perm.end(), 0);
  json perm_rows = json::array();
  std::uint64_t non_effective = 0, total = 0;
  do {
    bool eff = is_effective(f, rm, cm, perm);
    bool prod = is_product_permutation(perm, ec.vers.num_versions, beta);
    if (!eff) non_effective += 1;
    total += 1;
    perm_rows.push_back(
        json{{"perm", perm}, {"effective", eff}, {"product_form", prod}});
  } while (std::next_permutation(perm.begin(), perm.end()));

  out.permutations = json{{"meta", meta},
                          {"block_count", rm.block_count},
                          {"total", total},
                          {"non_effective_count", non_effective},
                          {"expected_non_effective", expected},
                          {"permutations", perm_rows}};
  return out;
}

struct CollisionResult {
  std::uint64_t trials = 0;
  std::uint64_t collisions = 0;
  double rate = 0.0;
  double bound = 0.0;
};

// Collision probability of the tag on adversary-chosen tuple pairs drawn
// without knowledge of the key; a fresh key per pair.
inline CollisionResult run_tag_collision(const ExperimentConfig& ec,
                                         std::size_t jobs) {
  const VersConfig& c = ec.vers;
  auto random_tuple = [&c](Rng& rng) {
    MessageTuple t(c.num_owners);
    for (auto& msg : t) {
      msg.resize(c.message_dim);
      for (FieldElement& coord : msg) coord = uniform_element(c.field, rng);
    }
    return t;
  };
  auto work = [&c, &ec, &random_tuple](std::uint64_t begin,
                                       std::uint64_t count) -> std::uint64_t {
    std::uint64_t hits = 0;
    for (std::uint64_t i = begin; i < begin + count; ++i) {
      Rng rng(derive_seed(c.rng_seed, {stream::trial, i}));
      MessageTuple a = random_tuple(rng);
      MessageTuple b;
      do {
        b = random_tuple(rng);
      } while (b == a);
      FieldElement key = uniform_element(c.field, rng);
      TagValue ta = worker_tag(c, a, ec.tag_mode, key);
      TagValue tb = worker_tag(c, b, ec.tag_mode, key);
      if (tag_key_string(ta) == tag_key_string(tb)) hits += 1;
    }
    return hits;
  };
  CollisionResult out;
  out.trials = ec.collision_trials;
  for (std::uint64_t part :
       run_chunked<std::uint64_t>(ec.collision_trials, jobs, work)) {
    out.collisions += part;
  }
  out.rate = static_cast<double>(out.collisions) /
             static_cast<double>(out.trials);
  out.bound = static_cast<double>(c.num_owners * c.message_dim) /
              static_cast<double>(c.field.modulus());
  return out;
}

inline json collision_json(const ExperimentConfig& ec,
                           const CollisionResult& r) {
  return json{{"meta", meta_json(ec.vers.rng_seed, ec.hash)},
              {"tag_mode", tag_mode_name(ec.tag_mode)},
              {"p", ec.vers.field.modulus()},
              {"num_owners", ec.vers.num_owners},
              {"message_dim", ec.vers.message_dim},
              {"trials", r.trials},
              {"collisions", r.collisions},
              {"rate", r.rate},
              {"bound", r.bound}};
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidConfig("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw InvalidConfig("write failed: " + path.string());
}

template <typename Fn>
inline int run_command(const char* name, Fn&& body) {
  try {
    body();
    return 0;
  } catch (const InternalInconsistency& e) {
    std::cerr << name << ": internal error: " << e.what() << "\n";
    return 2;
  } catch (const VersError& e) {
    std::cerr << name << ": " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << name << ": config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << name << ": internal error: " << e.what() << "\n";
    return 2;
  }
}

inline int cmd_simulate(const std::string& config_path,
                        const CliOverrides& ov, const std::string& out_dir) {
  return run_command("simulate", [&] {
    ExperimentConfig ec = load_experiment(config_path, ov);
    SimulateResult r = run_simulate(ec);
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "transcript.json", dump_json(r.transcript));
    write_file(dir / "decode.json", dump_json(r.decode));
    std::cout << "simulate: recovered " << r.recovered << "/" << r.honest
              << " honest owners; wrote transcript.json, decode.json\n";
  });
}

inline int cmd_threshold(const std::string& config_path,
                         const CliOverrides& ov, const std::string& out_dir,
                         std::size_t jobs) {
  return run_command("threshold", [&] {
    ExperimentConfig ec = load_experiment(config_path, ov);
    ThresholdResult r = run_threshold(ec, jobs);
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "threshold.csv",
               threshold_csv(r, ec.vers.rng_seed, ec.hash,
                             ec.behavior_class));
    if (r.empirical_threshold <= ec.vers.num_workers) {
      std::cout << "threshold: first zero-failure t = "
                << r.empirical_threshold << "\n";
    } else {
      std::cout << "threshold: no zero-failure t in the swept range\n";
    }
  });
}

inline int cmd_matrix(const std::string& config_path, const CliOverrides& ov,
                      const std::string& out_dir) {
  return run_command("matrix", [&] {
    ExperimentConfig ec = load_experiment(config_path, ov);
    MatrixResult r = run_matrix(ec);
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "characteristic_matrix.json",
               dump_json(r.characteristic));
    write_file(dir / "relation_matrix.json", dump_json(r.relation));
    write_file(dir / "monomials.json", dump_json(r.monomials));
    if (r.permutations) {
      write_file(dir / "permutations.json", dump_json(*r.permutations));
      std::cout << "matrix: wrote characteristic_matrix.json, "
                   "relation_matrix.json, monomials.json, permutations.json\n";
    } else {
      std::cerr << "matrix: warning: " << r.warning << "\n";
      std::cout << "matrix: wrote characteristic_matrix.json, "
                   "relation_matrix.json, monomials.json\n";
    }
  });
}

inline int cmd_tag_collision(const std::string& config_path,
                             const CliOverrides& ov,
                             const std::string& out_dir, std::size_t jobs) {
  return run_command("tag-collision", [&] {
    ExperimentConfig ec = load_experiment(config_path, ov);
    CollisionResult r = run_tag_collision(ec, jobs);
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "tag_collision.json",
               dump_json(collision_json(ec, r)));
    std::cout << "tag-collision: " << r.collisions << "/" << r.trials
              << " pairs collided (bound " << r.bound << ")\n";
  });
}

}  // namespace vers
