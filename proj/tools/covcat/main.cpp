// covcat: command line front end for the covering-space category engine.
//
// Subcommands:
//   verify     run registered checks against an instance (or instance-free ones)
//   enumerate  count and list combinatorial families (selfic maps, label
//              category morphisms, strata, deck transformations, map lifts)
//   nerve      emit a truncated nerve as JSON or a DOT 1-skeleton
//   lift       lift a base vertex path through a covering
//
// Exit codes: 0 all good, 1 a check failed or was inconclusive, 2 malformed
// input (bad flags, unreadable or invalid instance files, unknown ids).

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "covcat/checks.hpp"
#include "covcat/confcat.hpp"
#include "covcat/epicat.hpp"
#include "covcat/graphcov.hpp"
#include "covcat/instances.hpp"
#include "covcat/io.hpp"
#include "covcat/scomb.hpp"
#include "json.hpp"

namespace {

using covcat::Bounds;
using covcat::InstanceSpec;
using ojson = nlohmann::ordered_json;

// "k,ticks,depth" with all three required, e.g. --bounds 3,4,2.
Bounds parse_bounds_text(const std::string& text) {
  int vals[3];
  char comma1 = 0, comma2 = 0;
  std::istringstream in(text);
  if (!(in >> vals[0] >> comma1 >> vals[1] >> comma2 >> vals[2]) ||
      comma1 != ',' || comma2 != ',' || !(in >> std::ws).eof() ||
      vals[0] < 0 || vals[1] < 0 || vals[2] < 0) {
    throw covcat::io_error("bad --bounds, expected K,TICKS,DEPTH with K,TICKS,DEPTH >= 0: " +
                           text);
  }
  return Bounds{vals[0], vals[1], vals[2]};
}

InstanceSpec resolve_instance(const std::string& arg) {
  for (const InstanceSpec& b : covcat::builtin_instances()) {
    if (b.name == arg) return b;
  }
  return covcat::load_instance(arg);
}

bool is_known_check(const std::string& id) {
  return covcat::find_check(id) != nullptr;
}

long long parse_int_arg(const std::string& text, const char* what) {
  try {
    size_t pos = 0;
    long long v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw covcat::io_error(std::string("expected an integer for ") + what + ": " + text);
  }
}

uint64_t seed_from_env() {
  const char* raw = std::getenv("COVCAT_SEED");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(raw, &end, 10);
  if (errno != 0 || end == raw || *end != '\0') {
    throw covcat::io_error(std::string("COVCAT_SEED is not an unsigned integer: ") + raw);
  }
  return static_cast<uint64_t>(v);
}

bool seed_was_set() {
  const char* raw = std::getenv("COVCAT_SEED");
  return raw != nullptr && *raw != '\0';
}

// --------------------------------------------------------------------------
// verify
// --------------------------------------------------------------------------

struct VerifyArgs {
  std::vector<std::string> positionals;  // check ids and/or one instance
  std::string bounds_text;
  int jobs = 1;
  long long budget_ms = 0;
  std::string report_path;
};

int run_verify(const VerifyArgs& a) {
  std::vector<std::string> only;
  std::optional<InstanceSpec> inst;
  for (const std::string& arg : a.positionals) {
    if (is_known_check(arg)) {
      only.push_back(arg);
    } else if (!inst.has_value()) {
      inst = resolve_instance(arg);
    } else {
      throw covcat::io_error("more than one instance given (or unknown check id): " + arg);
    }
  }
  InstanceSpec spec;
  if (inst.has_value()) {
    spec = *inst;
  } else {
    spec.kind = "none";
    spec.name = "(no instance)";
  }

  covcat::RunOptions opt;
  if (!a.bounds_text.empty()) {
    opt.bounds = parse_bounds_text(a.bounds_text);
  } else if (spec.bounds.has_value()) {
    opt.bounds = *spec.bounds;
  }
  opt.jobs = a.jobs;
  opt.budget_ms = a.budget_ms;
  opt.seed = seed_from_env();
  opt.only = only;

  if (seed_was_set()) {
    std::cout << "seed: " << opt.seed << "\n";
  }
  std::cout << "instance: " << spec.name << "\n";
  std::cout << "bounds: max-points=" << opt.bounds.max_points
            << " tick-budget=" << opt.bounds.tick_budget
            << " depth=" << opt.bounds.depth << "\n";

  auto t0 = std::chrono::steady_clock::now();
  std::vector<covcat::CheckRecord> records = covcat::run_checks(spec, opt);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();

  int passed = 0, failed = 0, inconclusive = 0;
  for (const covcat::CheckRecord& r : records) {
    const char* tag = "[FAIL]";
    switch (r.outcome.status) {
      case covcat::CheckOutcome::Status::pass:
        tag = "[PASS]";
        ++passed;
        break;
      case covcat::CheckOutcome::Status::fail:
        tag = "[FAIL]";
        ++failed;
        break;
      case covcat::CheckOutcome::Status::inconclusive:
        tag = "[INCONCLUSIVE]";
        ++inconclusive;
        break;
    }
    std::cout << tag << " " << r.id << ": " << r.outcome.detail << "\n";
    for (const auto& [key, value] : r.outcome.facts) {
      std::cout << "    " << key << " = " << value << "\n";
    }
  }
  std::cout << records.size() << " checks: " << passed << " passed, " << failed
            << " failed, " << inconclusive << " inconclusive (" << ms << " ms)\n";

  if (!a.report_path.empty()) {
    std::vector<covcat::CheckRecordView> views;
    views.reserve(records.size());
    for (const covcat::CheckRecord& r : records) {
      covcat::CheckRecordView v;
      v.id = r.id;
      if (const covcat::RegistryEntry* e = covcat::find_check(r.id)) {
        v.statement = e->statement;
      }
      switch (r.outcome.status) {
        case covcat::CheckOutcome::Status::pass: v.status = "pass"; break;
        case covcat::CheckOutcome::Status::fail: v.status = "fail"; break;
        case covcat::CheckOutcome::Status::inconclusive: v.status = "inconclusive"; break;
      }
      v.detail = r.outcome.detail;
      v.facts = r.outcome.facts;
      views.push_back(std::move(v));
    }
    covcat::write_text_file(a.report_path,
                            covcat::report_to_json(views, spec.name, opt.bounds));
    std::cout << "report written to " << a.report_path << "\n";
  }

  return (failed == 0 && inconclusive == 0) ? 0 : 1;
}

// --------------------------------------------------------------------------
// enumerate
// --------------------------------------------------------------------------

struct EnumerateArgs {
  std::string what;
  std::vector<std::string> rest;
  std::string bounds_text;
};

ojson selfic_json(int k, std::optional<int> l) {
  ojson out;
  out["kind"] = "selfic";
  out["source-card"] = k;
  if (l.has_value()) {
    std::vector<covcat::FinMap> maps = covcat::enumerate_selfic(k, *l);
    out["target-card"] = *l;
    out["count"] = maps.size();
    ojson arr = ojson::array();
    for (const covcat::FinMap& f : maps) arr.push_back(covcat::to_string(f));
    out["maps"] = arr;
  } else {
    ojson by_target = ojson::array();
    long long total = 0;
    for (int t = 0; t <= k; ++t) {
      size_t n = covcat::enumerate_selfic(k, t).size();
      total += static_cast<long long>(n);
      ojson row;
      row["target-card"] = t;
      row["count"] = n;
      by_target.push_back(row);
    }
    out["by-target-card"] = by_target;
    out["total"] = total;
  }
  return out;
}

ojson epifin_json(int k) {
  covcat::BuiltEpiFin E = covcat::epifin_category(k);
  ojson out;
  out["kind"] = "epifin";
  out["max-source-card"] = k;
  out["object-count"] = E.objects.size();
  out["morphism-count"] = E.arrows.size();
  ojson objs = ojson::array();
  for (const covcat::EpiFinObject& ob : E.objects) objs.push_back(covcat::to_string(ob.p));
  out["objects"] = objs;
  ojson arrs = ojson::array();
  for (const covcat::EpiFinMorphism& m : E.arrows) {
    ojson a;
    a["src"] = covcat::to_string(m.src.p);
    a["tgt"] = covcat::to_string(m.tgt.p);
    a["top"] = covcat::to_string(m.top);
    a["bottom"] = covcat::to_string(m.bottom);
    arrs.push_back(a);
  }
  out["morphisms"] = arrs;
  return out;
}

ojson strata_json(const InstanceSpec& spec, const Bounds& b) {
  ojson out;
  out["kind"] = "strata";
  out["instance"] = spec.name;
  out["max-points"] = b.max_points;
  if (spec.tower.has_value()) {
    ojson levels = ojson::array();
    for (int k = 0; k <= b.max_points; ++k) {
      covcat::TowerStratumCensus census = covcat::strata_census(*spec.tower, k);
      ojson row;
      row["points"] = k;
      ojson cells = ojson::array();
      for (const auto& [label, count] : census.counts) {
        ojson cell;
        cell["fine-to-mid"] = covcat::to_string(label.fine_to_mid);
        cell["mid-to-coarse"] = covcat::to_string(label.mid_to_coarse);
        cell["count"] = count;
        cells.push_back(cell);
      }
      row["strata"] = cells;
      row["total"] = census.total;
      levels.push_back(row);
    }
    out["levels"] = levels;
  } else if (spec.covering.has_value()) {
    ojson levels = ojson::array();
    for (int k = 0; k <= b.max_points; ++k) {
      covcat::StratumCensus census = covcat::strata_census(*spec.covering, k);
      ojson row;
      row["points"] = k;
      ojson cells = ojson::array();
      for (const auto& [label, count] : census.counts) {
        ojson cell;
        cell["label"] = covcat::to_string(label.p);
        cell["count"] = count;
        cells.push_back(cell);
      }
      row["strata"] = cells;
      row["total"] = census.total;
      levels.push_back(row);
    }
    out["levels"] = levels;
  } else {
    throw covcat::io_error("enumerate strata needs a covering or tower instance");
  }
  return out;
}

ojson graph_map_json(const covcat::GraphMap& m) {
  ojson out;
  out["vertex_map"] = m.vertex_map;
  ojson em = ojson::array();
  for (size_t e = 0; e < m.edge_map.size(); ++e) {
    ojson row;
    row["edge"] = e;
    row["image"] = m.edge_map[e];
    row["flip"] = static_cast<bool>(m.flip[e]);
    em.push_back(row);
  }
  out["edge_map"] = em;
  return out;
}

ojson deck_json(const InstanceSpec& spec) {
  if (!spec.covering.has_value()) {
    throw covcat::io_error("enumerate deck needs a covering instance");
  }
  std::vector<covcat::GraphMap> deck = covcat::deck_transformations(*spec.covering);
  ojson out;
  out["kind"] = "deck";
  out["instance"] = spec.name;
  out["count"] = deck.size();
  ojson arr = ojson::array();
  for (const covcat::GraphMap& m : deck) arr.push_back(graph_map_json(m));
  out["maps"] = arr;
  return out;
}

ojson mapcov_json(const InstanceSpec& spec) {
  if (!spec.left.has_value() || !spec.right.has_value() || !spec.base_map.has_value()) {
    throw covcat::io_error("enumerate mapcov needs a map-lift instance (left, right, base_map)");
  }
  std::vector<covcat::GraphMap> lifts =
      covcat::enumerate_mapcov(*spec.left, *spec.right, *spec.base_map);
  ojson out;
  out["kind"] = "mapcov";
  out["instance"] = spec.name;
  out["count"] = lifts.size();
  ojson arr = ojson::array();
  for (const covcat::GraphMap& m : lifts) arr.push_back(graph_map_json(m));
  out["maps"] = arr;
  return out;
}

int run_enumerate(const EnumerateArgs& a) {
  Bounds bounds;
  std::optional<Bounds> explicit_bounds;
  if (!a.bounds_text.empty()) explicit_bounds = parse_bounds_text(a.bounds_text);

  ojson out;
  if (a.what == "selfic") {
    if (a.rest.empty() || a.rest.size() > 2) {
      throw covcat::io_error("usage: enumerate selfic K [L]");
    }
    int k = static_cast<int>(parse_int_arg(a.rest[0], "K"));
    std::optional<int> l;
    if (a.rest.size() == 2) l = static_cast<int>(parse_int_arg(a.rest[1], "L"));
    if (k < 0 || k > 12 || (l.has_value() && (*l < 0 || *l > k))) {
      throw covcat::io_error("enumerate selfic: need 0 <= L <= K <= 12");
    }
    out = selfic_json(k, l);
  } else if (a.what == "epifin") {
    int k = explicit_bounds.has_value() ? explicit_bounds->max_points : bounds.max_points;
    if (!a.rest.empty()) {
      if (a.rest.size() > 1) throw covcat::io_error("usage: enumerate epifin [K]");
      k = static_cast<int>(parse_int_arg(a.rest[0], "K"));
    }
    if (k < 0 || k > 4) throw covcat::io_error("enumerate epifin: need 0 <= K <= 4");
    out = epifin_json(k);
  } else if (a.what == "strata" || a.what == "deck" || a.what == "mapcov") {
    if (a.rest.size() != 1) {
      throw covcat::io_error("usage: enumerate " + a.what + " INSTANCE");
    }
    InstanceSpec spec = resolve_instance(a.rest[0]);
    Bounds b = explicit_bounds.has_value()
                   ? *explicit_bounds
                   : (spec.bounds.has_value() ? *spec.bounds : bounds);
    if (a.what == "strata") {
      out = strata_json(spec, b);
    } else if (a.what == "deck") {
      out = deck_json(spec);
    } else {
      out = mapcov_json(spec);
    }
  } else {
    throw covcat::io_error("unknown enumeration (want selfic, epifin, strata, deck, mapcov): " +
                           a.what);
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// --------------------------------------------------------------------------
// nerve
// --------------------------------------------------------------------------

struct NerveArgs {
  std::string which;
  std::string instance;
  std::string bounds_text;
  std::string format = "json";
  std::string out_path;
};

int run_nerve(const NerveArgs& a) {
  Bounds b;
  std::optional<InstanceSpec> spec;
  if (!a.instance.empty()) {
    spec = resolve_instance(a.instance);
    if (spec->bounds.has_value()) b = *spec->bounds;
  }
  if (!a.bounds_text.empty()) b = parse_bounds_text(a.bounds_text);

  covcat::TruncatedSSet sset;
  std::vector<std::string> names;

  auto covering_of = [&]() -> const covcat::CoveringSpace& {
    if (!spec.has_value() || !spec->covering.has_value()) {
      throw covcat::io_error("nerve " + a.which + " needs a covering instance");
    }
    return *spec->covering;
  };

  if (a.which == "epifin") {
    covcat::BuiltEpiFin E = covcat::epifin_category(b.max_points);
    covcat::BuiltNerve N = covcat::nerve(E.cat, b.depth);
    sset = N.sset;
    names = E.cat.object_names;
  } else if (a.which == "config") {
    covcat::BuiltConf C = covcat::build_conf(covering_of().base, covcat::kStrictFlavor,
                                             b.max_points, b.tick_budget, b.depth);
    sset = C.nrv.sset;
    names = C.cat.object_names;
  } else if (a.which == "config-total") {
    covcat::BuiltConf C = covcat::build_conf(covering_of().total, covcat::kStrictFlavor,
                                             b.max_points, b.tick_budget, b.depth);
    sset = C.nrv.sset;
    names = C.cat.object_names;
  } else if (a.which == "config-pi") {
    covcat::BuiltConfPi P = covcat::build_conf_pi(covering_of(), covcat::kStrictFlavor,
                                                  b.max_points, b.tick_budget, b.depth);
    sset = P.nrv.sset;
    names = P.cat.object_names;
  } else if (a.which == "walk") {
    covcat::BuiltConf W =
        covcat::build_walk_category(covering_of().base, b.tick_budget, b.depth);
    sset = W.nrv.sset;
    names = W.cat.object_names;
  } else {
    throw covcat::io_error(
        "unknown nerve subject (want epifin, config, config-total, config-pi, walk): " +
        a.which);
  }

  std::string text =
      (a.format == "dot") ? covcat::sset_to_dot(sset, names) : covcat::sset_to_json(sset, names);
  if (!a.out_path.empty()) {
    covcat::write_text_file(a.out_path, text);
    std::cerr << "wrote " << a.out_path << "\n";
  } else {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  }
  return 0;
}

// --------------------------------------------------------------------------
// lift
// --------------------------------------------------------------------------

struct LiftArgs {
  std::string instance;
  int start = 0;
  std::string path_text;
  std::string format = "text";
};

int run_lift(const LiftArgs& a) {
  InstanceSpec spec = resolve_instance(a.instance);
  if (!spec.covering.has_value()) {
    throw covcat::io_error("lift needs a covering instance");
  }
  const covcat::CoveringSpace& cov = *spec.covering;
  if (!covcat::validate_covering(cov)) {
    throw covcat::io_error("lift: projection of " + spec.name + " is not a covering");
  }
  if (!cov.base.is_simple()) {
    throw covcat::io_error(
        "lift: base graph has loops or parallel edges, vertex paths are ambiguous");
  }

  std::vector<int> base_ids;
  {
    std::string token;
    std::istringstream in(a.path_text);
    while (std::getline(in, token, ',')) {
      size_t first = token.find_first_not_of(" \t");
      size_t last = token.find_last_not_of(" \t");
      if (first == std::string::npos) {
        throw covcat::io_error("lift: empty vertex in --path");
      }
      base_ids.push_back(
          static_cast<int>(parse_int_arg(token.substr(first, last - first + 1), "--path")));
    }
  }
  if (base_ids.empty()) throw covcat::io_error("lift: --path needs at least one vertex");

  covcat::EdgePath path;
  path.start = cov.base.vertex_index(base_ids[0]);
  for (size_t i = 0; i + 1 < base_ids.size(); ++i) {
    int u = cov.base.vertex_index(base_ids[i]);
    int v = cov.base.vertex_index(base_ids[i + 1]);
    int e = cov.base.edge_between(u, v);
    if (e < 0) {
      throw covcat::io_error("lift: vertices " + std::to_string(base_ids[i]) + " and " +
                             std::to_string(base_ids[i + 1]) + " are not adjacent in the base");
    }
    uint32_t dart = static_cast<uint32_t>(2 * e);
    if (cov.base.dart_tail(dart) != u) dart = covcat::Graph::dart_reverse(dart);
    path.steps.push_back(dart);
  }

  int start_index = cov.total.vertex_index(a.start);
  covcat::EdgePath lifted = covcat::lift_path(cov, path, start_index);

  std::vector<int> total_ids;
  {
    int at = lifted.start;
    total_ids.push_back(cov.total.vertex_ids[at]);
    for (uint32_t d : lifted.steps) {
      at = cov.total.dart_head(d);
      total_ids.push_back(cov.total.vertex_ids[at]);
    }
  }

  if (a.format == "json") {
    ojson out;
    out["kind"] = "lift";
    out["instance"] = spec.name;
    out["start"] = a.start;
    out["base_path"] = base_ids;
    out["lifted_path"] = total_ids;
    out["end"] = total_ids.back();
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "base:   ";
    for (size_t i = 0; i < base_ids.size(); ++i) {
      if (i) std::cout << " -> ";
      std::cout << base_ids[i];
    }
    std::cout << "\nlifted: ";
    for (size_t i = 0; i < total_ids.size(); ++i) {
      if (i) std::cout << " -> ";
      std::cout << total_ids[i];
    }
    std::cout << "\nends at " << total_ids.back() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite configuration categories over graph covering spaces"};
  app.require_subcommand(1);

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand(
      "verify", "Run registered checks; positional arguments are check ids and/or one instance "
                "(builtin name or JSON file)");
  verify->add_option("targets", verify_args.positionals,
                     "check ids and/or one instance; no ids means every applicable check");
  verify->add_option("--bounds", verify_args.bounds_text,
                     "K,TICKS,DEPTH size caps (default from instance, else 2,2,2)");
  verify->add_option("--jobs", verify_args.jobs, "worker threads")
      ->check(CLI::Range(1, 64));
  verify->add_option("--budget-ms", verify_args.budget_ms,
                     "soft time budget per check in milliseconds (0 = none)");
  verify->add_option("--report", verify_args.report_path, "write a JSON report to this file");

  EnumerateArgs enum_args;
  CLI::App* enumerate = app.add_subcommand(
      "enumerate", "Count and list families: selfic K [L] | epifin [K] | strata INSTANCE | "
                   "deck INSTANCE | mapcov INSTANCE");
  enumerate->add_option("what", enum_args.what, "what to enumerate")->required();
  enumerate->add_option("args", enum_args.rest, "family arguments");
  enumerate->add_option("--bounds", enum_args.bounds_text, "K,TICKS,DEPTH size caps");

  NerveArgs nerve_args;
  CLI::App* nerve = app.add_subcommand(
      "nerve", "Emit a truncated nerve: epifin | config | config-total | config-pi | walk");
  nerve->add_option("which", nerve_args.which, "nerve subject")->required();
  nerve->add_option("instance", nerve_args.instance,
                    "instance (builtin name or JSON file); not needed for epifin");
  nerve->add_option("--bounds", nerve_args.bounds_text, "K,TICKS,DEPTH size caps");
  nerve->add_option("--format", nerve_args.format, "output format")
      ->check(CLI::IsMember({"json", "dot"}));
  nerve->add_option("--out", nerve_args.out_path, "write output to this file");

  LiftArgs lift_args;
  CLI::App* lift = app.add_subcommand("lift", "Lift a base vertex path through a covering");
  lift->add_option("instance", lift_args.instance, "covering instance")->required();
  lift->add_option("--start", lift_args.start, "total-graph vertex id to start the lift at")
      ->required();
  lift->add_option("--path", lift_args.path_text,
                   "comma separated base vertex ids, e.g. 0,1,2,0")
      ->required();
  lift->add_option("--format", lift_args.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed()) return run_verify(verify_args);
    if (enumerate->parsed()) return run_enumerate(enum_args);
    if (nerve->parsed()) return run_nerve(nerve_args);
    if (lift->parsed()) return run_lift(lift_args);
  } catch (const covcat::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const covcat::structural_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
