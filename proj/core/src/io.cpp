#include "covcat/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace covcat {

namespace {

using njson = nlohmann::json;
using ojson = nlohmann::ordered_json;

int require_int(const njson& j, const char* what) {
  if (!j.is_number_integer())
    throw io_error(std::string("expected integer for ") + what);
  return j.get<int>();
}

const njson& require_field(const njson& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw io_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

Graph graph_from(const njson& j) {
  std::vector<int> vertex_ids;
  for (const auto& v : require_field(j, "vertices"))
    vertex_ids.push_back(require_int(v, "vertex id"));
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : require_field(j, "edges")) {
    if (!e.is_array() || e.size() != 2)
      throw io_error("edge entries must be [u, v] pairs");
    edges.emplace_back(require_int(e[0], "edge endpoint"),
                       require_int(e[1], "edge endpoint"));
  }
  return make_graph(std::move(vertex_ids), edges);
}

// vertex_map entries name target vertices by external id; edge_map entries
// are target edge indices (edges have no external ids of their own).
GraphMap graph_map_from(const njson& j, const Graph& src, const Graph& tgt) {
  GraphMap f;
  for (const auto& v : require_field(j, "vertex_map"))
    f.vertex_map.push_back(tgt.vertex_index(require_int(v, "vertex image")));
  for (const auto& e : require_field(j, "edge_map")) {
    int idx = require_int(e, "edge image");
    if (idx < 0 || idx >= tgt.edge_count())
      throw io_error("edge image index out of range");
    f.edge_map.push_back(idx);
  }
  if (j.contains("flip"))
    for (const auto& b : j.at("flip")) {
      int v = require_int(b, "flip bit");
      if (v != 0 && v != 1) throw io_error("flip entries must be 0 or 1");
      f.flip.push_back(static_cast<char>(v));
    }
  validate_graph_map(src, tgt, f);
  return f;
}

CoveringSpace covering_from(const njson& j) {
  CoveringSpace cov;
  cov.total = graph_from(require_field(j, "total"));
  cov.base = graph_from(require_field(j, "base"));
  cov.proj = graph_map_from(j, cov.total, cov.base);
  return cov;
}

ojson graph_to(const Graph& g) {
  ojson out;
  out["vertices"] = g.vertex_ids;
  ojson edges = ojson::array();
  for (const auto& e : g.edges)
    edges.push_back({g.vertex_ids[static_cast<size_t>(e.u)],
                     g.vertex_ids[static_cast<size_t>(e.v)]});
  out["edges"] = std::move(edges);
  return out;
}

void graph_map_into(ojson& out, const GraphMap& f, const Graph& tgt) {
  ojson vm = ojson::array();
  for (int v : f.vertex_map) vm.push_back(tgt.vertex_ids[static_cast<size_t>(v)]);
  out["vertex_map"] = std::move(vm);
  out["edge_map"] = f.edge_map;
  bool any_flip = false;
  for (char b : f.flip) any_flip = any_flip || b != 0;
  if (any_flip) {
    ojson fl = ojson::array();
    for (char b : f.flip) fl.push_back(static_cast<int>(b));
    out["flip"] = std::move(fl);
  }
}

ojson covering_to(const CoveringSpace& cov) {
  ojson out;
  out["total"] = graph_to(cov.total);
  out["base"] = graph_to(cov.base);
  graph_map_into(out, cov.proj, cov.base);
  return out;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

}  // namespace

InstanceSpec parse_instance(const std::string& json_text) {
  njson j;
  try {
    j = njson::parse(json_text);
  } catch (const njson::exception& e) {
    throw io_error(std::string("invalid JSON: ") + e.what());
  }
  try {
    InstanceSpec spec;
    spec.kind = require_field(j, "kind").get<std::string>();
    spec.name = require_field(j, "name").get<std::string>();
    if (spec.kind == "covering") {
      spec.covering = covering_from(require_field(j, "covering"));
    } else if (spec.kind == "tower") {
      const auto& stages = require_field(j, "tower");
      if (!stages.is_array() || stages.size() != 2)
        throw io_error("\"tower\" must list the two stages fine, coarse");
      spec.tower = Tower{covering_from(stages[0]), covering_from(stages[1])};
    } else if (spec.kind == "map-lift") {
      spec.left = covering_from(require_field(j, "left"));
      spec.right = covering_from(require_field(j, "right"));
      spec.base_map = graph_map_from(require_field(j, "base_map"),
                                     spec.left->base, spec.right->base);
    } else {
      throw io_error("unknown instance kind \"" + spec.kind + "\"");
    }
    if (j.contains("mutation")) {
      const auto& m = j.at("mutation");
      MutationSpec mut;
      mut.kind = require_field(m, "kind").get<std::string>();
      mut.target = require_field(m, "target").get<std::string>();
      mut.level = require_int(require_field(m, "level"), "mutation level");
      mut.index = require_int(require_field(m, "index"), "mutation index");
      spec.mutation = std::move(mut);
    }
    if (j.contains("bounds")) {
      const auto& b = j.at("bounds");
      Bounds bounds;
      if (b.contains("max_points"))
        bounds.max_points = require_int(b.at("max_points"), "max_points");
      if (b.contains("tick_budget"))
        bounds.tick_budget = require_int(b.at("tick_budget"), "tick_budget");
      if (b.contains("depth")) bounds.depth = require_int(b.at("depth"), "depth");
      spec.bounds = bounds;
    }
    return spec;
  } catch (const njson::exception& e) {
    throw io_error(std::string("malformed instance: ") + e.what());
  }
}

InstanceSpec load_instance(const std::string& path) {
  return parse_instance(read_text_file(path));
}

std::string instance_to_json(const InstanceSpec& spec) {
  ojson out;
  out["kind"] = spec.kind;
  out["name"] = spec.name;
  if (spec.covering) out["covering"] = covering_to(*spec.covering);
  if (spec.tower)
    out["tower"] = {covering_to(spec.tower->fine), covering_to(spec.tower->coarse)};
  if (spec.left) out["left"] = covering_to(*spec.left);
  if (spec.right) out["right"] = covering_to(*spec.right);
  if (spec.base_map && spec.right) {
    ojson bm;
    graph_map_into(bm, *spec.base_map, spec.right->base);
    out["base_map"] = std::move(bm);
  }
  if (spec.mutation) {
    ojson m;
    m["kind"] = spec.mutation->kind;
    m["target"] = spec.mutation->target;
    m["level"] = spec.mutation->level;
    m["index"] = spec.mutation->index;
    out["mutation"] = std::move(m);
  }
  if (spec.bounds) {
    ojson b;
    b["max_points"] = spec.bounds->max_points;
    b["tick_budget"] = spec.bounds->tick_budget;
    b["depth"] = spec.bounds->depth;
    out["bounds"] = std::move(b);
  }
  return dump(out);
}

std::string graph_to_json(const Graph& g) { return dump(graph_to(g)); }

Graph graph_from_json(const std::string& json_text) {
  try {
    return graph_from(njson::parse(json_text));
  } catch (const njson::exception& e) {
    throw io_error(std::string("invalid JSON: ") + e.what());
  }
}

std::string covering_to_json(const CoveringSpace& cov) {
  return dump(covering_to(cov));
}

std::string tower_to_json(const Tower& t) {
  ojson out;
  out["tower"] = {covering_to(t.fine), covering_to(t.coarse)};
  return dump(out);
}

std::string sset_to_json(const TruncatedSSet& X,
                         const std::vector<std::string>& vertex_names) {
  ojson out;
  out["max_dim"] = X.max_dim;
  ojson levels = ojson::array();
  for (const auto& L : X.levels) {
    ojson lv;
    lv["count"] = L.count;
    lv["faces"] = L.face;
    lv["degens"] = L.degen;
    levels.push_back(std::move(lv));
  }
  out["levels"] = std::move(levels);
  if (!vertex_names.empty()) out["names"] = vertex_names;
  return dump(out);
}

std::string sset_to_dot(const TruncatedSSet& X,
                        const std::vector<std::string>& vertex_names) {
  std::ostringstream out;
  out << "digraph sset {\n  rankdir=LR;\n";
  for (uint32_t v = 0; v < X.size(0); ++v) {
    out << "  v" << v;
    if (v < vertex_names.size()) {
      std::string label;
      for (char c : vertex_names[v]) {
        if (c == '"' || c == '\\') label += '\\';
        label += c;
      }
      out << " [label=\"" << label << "\"]";
    }
    out << ";\n";
  }
  if (X.max_dim >= 1) {
    // An edge is degenerate exactly when it is s_0 of a vertex.
    std::vector<char> degenerate(X.size(1), 0);
    for (uint32_t v = 0; v < X.size(0); ++v) degenerate[X.degen(0, 0, v)] = 1;
    for (uint32_t e = 0; e < X.size(1); ++e) {
      if (degenerate[e]) continue;
      out << "  v" << X.face(1, 0, e) << " -> v" << X.face(1, 1, e) << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::string report_to_json(const std::vector<CheckRecordView>& records,
                           const std::string& instance_name,
                           const Bounds& bounds) {
  ojson out;
  out["instance"] = instance_name;
  ojson jb;
  jb["max_points"] = bounds.max_points;
  jb["tick_budget"] = bounds.tick_budget;
  jb["depth"] = bounds.depth;
  out["bounds"] = std::move(jb);
  ojson checks = ojson::array();
  bool all_passed = true;
  for (const auto& r : records) {
    ojson c;
    c["id"] = r.id;
    if (!r.statement.empty()) c["statement"] = r.statement;
    c["status"] = r.status;
    c["detail"] = r.detail;
    ojson facts = ojson::object();
    for (const auto& [k, v] : r.facts) facts[k] = v;
    c["facts"] = std::move(facts);
    checks.push_back(std::move(c));
    all_passed = all_passed && r.status == "pass";
  }
  out["checks"] = std::move(checks);
  out["all_passed"] = all_passed;
  return dump(out);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("error while reading: " + path);
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw io_error("error while writing: " + path);
}

}  // namespace covcat
