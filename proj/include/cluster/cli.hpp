#pragma once

// Command-line frontend: argument parsing into RunConfig and the run()
// dispatcher.  Exit codes: 0 success, 1 check violations, 2 bad input.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cluster/atlas.hpp"
#include "cluster/checks.hpp"
#include "cluster/presets.hpp"
#include "cluster/quiver.hpp"
#include "cluster/rank2.hpp"

namespace cluster {

struct RunConfig {
  std::string command;  // enumerate | variables | expand | check | rank2
  std::string check;    // conjecture3 | conjecture4 | lemma21 | unistructural | theorem1
  std::string preset;
  std::string quiver_path;
  std::string atlas_path;
  EnumerationLimits limits;
  std::optional<int> bound;
  std::string format;  // empty: the command's default
  std::string out_path;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::string var;       // expand: variable index
  std::string seed_ref;  // expand: seed index or 16-digit hex key
  unsigned r = 2;
  std::size_t depth = 8;
  std::size_t max_candidates = 10'000'000;
  std::size_t max_candidate_seeds = 0;
};

enum ExitCode : int { kSuccess = 0, kViolations = 1, kBadInput = 2 };

namespace detail {

struct Source {
  std::optional<BMatrix> matrix;
  std::optional<ExchangeAtlas> atlas;
  std::string type;
  nlohmann::json description;
};

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return nlohmann::json::parse(in);
}

inline Source load_source(const RunConfig& cfg, bool allow_atlas) {
  const int given = !cfg.preset.empty() + !cfg.quiver_path.empty() + !cfg.atlas_path.empty();
  if (given != 1)
    throw std::invalid_argument(allow_atlas ? "give exactly one of --preset, --quiver, --atlas"
                                            : "give exactly one of --preset, --quiver");
  Source src;
  if (!cfg.preset.empty()) {
    src.matrix = preset(cfg.preset);
    if (!src.matrix) throw std::invalid_argument("unknown preset: " + cfg.preset);
    src.type = cfg.preset;
    src.description = {{"preset", cfg.preset}};
  } else if (!cfg.quiver_path.empty()) {
    src.matrix = quiver_from_json(read_json_file(cfg.quiver_path));
    src.type = classify(*src.matrix).to_string();
    src.description = {{"quiver", cfg.quiver_path}};
  } else {
    if (!allow_atlas) throw std::invalid_argument("--atlas is not accepted here");
    src.atlas = atlas_from_json(read_json_file(cfg.atlas_path));
    src.type = classify(src.atlas->base().matrix).to_string();
    src.description = {{"atlas", cfg.atlas_path}};
  }
  return src;
}

inline ExchangeAtlas obtain_atlas(Source& src, const RunConfig& cfg) {
  if (src.atlas) return *src.atlas;
  return enumerate(*src.matrix, cfg.limits, {cfg.workers, cfg.seed});
}

inline std::string den_string(const DenVector& d) {
  std::string s = "(";
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s + ")";
}

inline std::size_t parse_index(const std::string& text, const char* what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos, 10);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (text.empty() || pos != text.size()) throw std::invalid_argument(std::string("bad ") + what + ": " + text);
  return static_cast<std::size_t>(v);
}

inline std::string variables_table(const ExchangeAtlas& atlas) {
  std::ostringstream out;
  out << std::left << std::setw(6) << "#" << std::setw(16) << "den" << std::setw(10) << "clusters"
      << "variable\n";
  for (std::size_t i = 0; i < atlas.variables().size(); ++i) {
    const auto& v = atlas.variables()[i];
    out << std::left << std::setw(6) << i << std::setw(16) << den_string(den_vector(v)) << std::setw(10)
        << atlas.variable_clusters()[i].size() << v.to_string() << "\n";
  }
  return out.str();
}

inline nlohmann::json variables_json(const ExchangeAtlas& atlas) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < atlas.variables().size(); ++i) {
    const auto& v = atlas.variables()[i];
    rows.push_back({{"index", i},
                    {"expr", v.to_string()},
                    {"den", den_vector(v).entries},
                    {"clusters", atlas.variable_clusters()[i]},
                    {"poly", to_json(v)}});
  }
  return {{"status", to_string(atlas.status())}, {"count", atlas.variables().size()}, {"variables", rows}};
}

inline std::size_t resolve_seed(const ExchangeAtlas& atlas, const std::string& ref) {
  if (ref.size() == 16 && ref.find_first_not_of("0123456789abcdef") == std::string::npos) {
    if (auto s = atlas.find_seed_by_hash(std::stoull(ref, nullptr, 16))) return *s;
    throw std::invalid_argument("no seed with key " + ref);
  }
  const std::size_t s = parse_index(ref, "seed");
  if (s >= atlas.seeds().size()) throw std::invalid_argument("seed index out of range: " + ref);
  return s;
}

}  // namespace detail

/// Executes one command; all output goes to `out` (or cfg.out_path) and
/// diagnostics to `err`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ofstream file;
  std::ostream* sink = &out;
  auto open_sink = [&] {
    if (cfg.out_path.empty()) return;
    file.open(cfg.out_path);
    if (!file) throw std::invalid_argument("cannot write " + cfg.out_path);
    sink = &file;
  };

  try {
    if (cfg.limits.max_seeds == 0 || cfg.limits.max_depth == 0)
      throw std::invalid_argument("limits must be positive");
    if (cfg.workers == 0) throw std::invalid_argument("--workers must be positive");
    const Schedule schedule{cfg.workers, cfg.seed};

    if (cfg.command == "rank2") {
      if (cfg.depth < 1) throw std::invalid_argument("--depth must be at least 1");
      const auto chain = enumerate_chain(cfg.r, cfg.depth, schedule);
      open_sink();
      *sink << to_json(chain).dump(2) << "\n";
      return kSuccess;
    }

    if (cfg.command == "enumerate") {
      auto src = detail::load_source(cfg, false);
      const auto atlas = detail::obtain_atlas(src, cfg);
      const std::string fmt = cfg.format.empty() ? "json" : cfg.format;
      if (fmt != "json" && fmt != "dot") throw std::invalid_argument("enumerate supports --format json|dot");
      open_sink();
      if (fmt == "dot")
        *sink << to_dot(atlas);
      else
        *sink << to_json(atlas).dump(2) << "\n";
      err << atlas.seeds().size() << " seeds, " << atlas.variables().size() << " variables, "
          << atlas.clusters().size() << " clusters, " << to_string(atlas.status()) << "\n";
      return kSuccess;
    }

    if (cfg.command == "variables") {
      auto src = detail::load_source(cfg, true);
      const auto atlas = detail::obtain_atlas(src, cfg);
      const std::string fmt = cfg.format.empty() ? "table" : cfg.format;
      if (fmt != "json" && fmt != "table") throw std::invalid_argument("variables supports --format table|json");
      open_sink();
      if (fmt == "table")
        *sink << detail::variables_table(atlas);
      else
        *sink << detail::variables_json(atlas).dump(2) << "\n";
      return kSuccess;
    }

    if (cfg.command == "expand") {
      auto src = detail::load_source(cfg, true);
      const auto atlas = detail::obtain_atlas(src, cfg);
      const std::size_t v = detail::parse_index(cfg.var, "variable");
      if (v >= atlas.variables().size()) throw std::invalid_argument("variable index out of range: " + cfg.var);
      const std::size_t s = detail::resolve_seed(atlas, cfg.seed_ref);
      const LaurentPoly e = expand_in_base(atlas, atlas.variables()[v], s);
      nlohmann::json cluster = nlohmann::json::array();
      for (const auto& u : atlas.seeds()[s].seed.vars) cluster.push_back(u.to_string());
      open_sink();
      if (cfg.format == "table") {
        *sink << e.to_string("u") << "\n";
      } else {
        *sink << nlohmann::json{{"variable", v},
                                {"variable_expr", atlas.variables()[v].to_string()},
                                {"seed", s},
                                {"key", hex64(atlas.seed_hash(s))},
                                {"cluster", cluster},
                                {"expansion", to_json(e)},
                                {"expansion_expr", e.to_string("u")},
                                {"den", den_vector(e).entries}}
                     .dump(2)
              << "\n";
      }
      return kSuccess;
    }

    if (cfg.command == "check") {
      auto src = detail::load_source(cfg, true);
      Stopwatch clock;
      const auto atlas = detail::obtain_atlas(src, cfg);
      nlohmann::json params = src.description;
      params["max_seeds"] = cfg.limits.max_seeds;
      params["max_depth"] = cfg.limits.max_depth;
      params["status"] = to_string(atlas.status());
      params["variables"] = atlas.variables().size();
      params["seeds"] = atlas.seeds().size();

      nlohmann::json report;
      std::size_t violations = 0, checked = 0;
      std::string unit;
      if (cfg.check == "conjecture3" || cfg.check == "conjecture4" || cfg.check == "lemma21") {
        if (cfg.check != "lemma21" && !atlas.complete())
          throw std::invalid_argument(cfg.check + " needs a complete atlas; raise --max-seeds/--max-depth");
        const ExpansionTable table(atlas, schedule);
        const PairCheckReport r = cfg.check == "conjecture3"   ? verify_conjecture3(atlas, table, schedule)
                                  : cfg.check == "conjecture4" ? verify_conjecture4(atlas, table, schedule)
                                                               : verify_lemma21(atlas, table, schedule);
        if (cfg.check == "lemma21") params["clusters"] = atlas.complete() ? "all" : "enumerated";
        violations = r.violations().size();
        checked = r.pairs_checked;
        unit = cfg.check == "lemma21" ? "compatible pairs" : "ordered pairs";
        report = make_report(cfg.check, src.type, params, "pairs_checked", checked, violations_json(atlas, r),
                             clock.seconds());
      } else if (cfg.check == "unistructural") {
        const int bound = cfg.bound.value_or(default_candidate_bound(atlas));
        if (bound < 0) throw std::invalid_argument("--bound must be non-negative");
        params["bound"] = bound;
        const auto r = unistructural_search(atlas, bound, {cfg.max_candidate_seeds, cfg.max_candidates}, schedule);
        params["accepted"] = r.accepted;
        params["rejected"] = r.rejected;
        params["budget_exhausted"] = r.budget_exhausted;
        violations = r.alternatives.size();
        checked = r.candidates_checked;
        unit = "candidates";
        report = make_report(cfg.check, src.type, params, "candidates_checked", checked, violations_json(r),
                             clock.seconds());
      } else if (cfg.check == "theorem1") {
        const auto r = verify_theorem1(atlas, cfg.max_candidates, schedule);
        params["automorphisms"] = r.automorphisms;
        params["budget_exhausted"] = r.budget_exhausted;
        const auto v = violations_json(r);
        violations = v.size();
        checked = r.candidates_checked;
        unit = "candidates";
        report = make_report(cfg.check, src.type, params, "candidates_checked", checked, v, clock.seconds());
      } else {
        throw std::invalid_argument("unknown check: " + cfg.check);
      }
      open_sink();
      if (cfg.format == "table")
        *sink << violations << " violations / " << checked << " " << unit << "\n";
      else
        *sink << report.dump(2) << "\n";
      err << cfg.check << " " << src.type << ": " << violations << " violations / " << checked << " " << unit << "\n";
      return violations ? kViolations : kSuccess;
    }

    throw std::invalid_argument("unknown command: " + cfg.command);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
}

/// Parses argv into cfg.  Returns an exit code when the process should stop
/// right away (help, or a usage error reported on `err`).
inline std::optional<int> parse_command_line(int argc, const char* const* argv, RunConfig& cfg,
                                             std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exact cluster-algebra engine: seed mutation, exchange graphs, verification checks",
               "cluster_atlas"};
  app.require_subcommand(1);
  std::optional<std::size_t> workers;

  auto add_source = [&](CLI::App* sub, bool atlas) {
    sub->add_option("--preset", cfg.preset, "Named quiver")->check(CLI::IsMember(preset_names()));
    sub->add_option("--quiver", cfg.quiver_path, "Quiver JSON file");
    if (atlas) sub->add_option("--atlas", cfg.atlas_path, "Atlas JSON from `enumerate --format json`");
    sub->add_option("--max-seeds", cfg.limits.max_seeds, "Seed limit")->capture_default_str();
    sub->add_option("--max-depth", cfg.limits.max_depth, "BFS depth limit")->capture_default_str();
  };
  auto add_common = [&](CLI::App* sub, bool schedule_seed) {
    sub->add_option("--workers", workers, "Worker threads (default: $CLUSTER_ATLAS_WORKERS or 1)");
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "dot", "table"}));
    sub->add_option("--out", cfg.out_path, "Write output to a file");
    if (schedule_seed) sub->add_option("--seed", cfg.seed, "Schedule shuffle seed (results do not depend on it)");
  };

  auto* en = app.add_subcommand("enumerate", "Enumerate the exchange graph");
  add_source(en, false);
  add_common(en, true);

  auto* va = app.add_subcommand("variables", "List cluster variables with denominator vectors");
  add_source(va, true);
  add_common(va, true);

  auto* ex = app.add_subcommand("expand", "Expand a variable in the cluster of a seed");
  add_source(ex, true);
  add_common(ex, false);
  ex->add_option("--var", cfg.var, "Variable index (see `variables`)")->required();
  ex->add_option("--seed", cfg.seed_ref, "Seed index or 16-digit key")->required();

  auto* ch = app.add_subcommand("check", "Run a verification check");
  ch->add_option("name", cfg.check, "Check to run")
      ->required()
      ->check(CLI::IsMember({"conjecture3", "conjecture4", "lemma21", "unistructural", "theorem1"}));
  add_source(ch, true);
  add_common(ch, true);
  ch->add_option("--bound", cfg.bound, "Candidate matrix entry bound (unistructural)");
  ch->add_option("--max-candidates", cfg.max_candidates, "Candidate budget")->capture_default_str();
  ch->add_option("--max-candidate-seeds", cfg.max_candidate_seeds, "Per-candidate seed budget (0: automatic)");

  auto* r2 = app.add_subcommand("rank2", "Rank-2 chain via the exchange recurrence");
  r2->add_option("--r", cfg.r, "Arrow multiplicity")->capture_default_str();
  r2->add_option("--depth", cfg.depth, "Window half-width")->capture_default_str();
  add_common(r2, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(kBadInput);
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (workers) {
    cfg.workers = *workers;
  } else if (const char* env = std::getenv("CLUSTER_ATLAS_WORKERS"); env && *env) {
    try {
      cfg.workers = detail::parse_index(env, "CLUSTER_ATLAS_WORKERS");
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kBadInput;
    }
  }
  return std::nullopt;
}

}  // namespace cluster
