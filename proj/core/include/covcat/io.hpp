#ifndef COVCAT_IO_HPP
#define COVCAT_IO_HPP

#include <string>
#include <vector>

#include "covcat/graphcov.hpp"
#include "covcat/instances.hpp"
#include "covcat/scomb.hpp"

namespace covcat {

struct io_error : structural_error {
  using structural_error::structural_error;
};

// JSON instance files. Schema: fixtures/schema.md in the repository.
InstanceSpec load_instance(const std::string& path);
InstanceSpec parse_instance(const std::string& json_text);
std::string instance_to_json(const InstanceSpec& spec);

// Graph / covering / tower fragments (same schema as inside instances).
std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& json_text);
std::string covering_to_json(const CoveringSpace& cov);
std::string tower_to_json(const Tower& t);

// Truncated simplicial sets, for `nerve --format json|dot`. DOT output
// shows level-0/1 only (vertices and nondegenerate edges).
std::string sset_to_json(const TruncatedSSet& X,
                         const std::vector<std::string>& vertex_names = {});
std::string sset_to_dot(const TruncatedSSet& X,
                        const std::vector<std::string>& vertex_names = {});

// Machine-readable check reports. Key order is fixed; values derive only
// from inputs so identical runs emit identical bytes.
struct CheckRecordView {
  std::string id;
  std::string statement;  // registry headline for the id
  std::string status;     // "pass" | "fail" | "inconclusive"
  std::string detail;
  std::vector<std::pair<std::string, std::string>> facts;
};
std::string report_to_json(const std::vector<CheckRecordView>& records,
                           const std::string& instance_name,
                           const Bounds& bounds);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace covcat

#endif
