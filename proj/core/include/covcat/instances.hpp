#ifndef COVCAT_INSTANCES_HPP
#define COVCAT_INSTANCES_HPP

#include <optional>
#include <string>
#include <vector>

#include "covcat/graphcov.hpp"

namespace covcat {

// Size bounds shared by CLI and check engine. Checks clamp these to their
// own pinned maxima; the defaults here are the smallest interesting sizes.
struct Bounds {
  int max_points = 2;
  int tick_budget = 2;
  int depth = 2;
};

// Deliberate corruption applied after loading, used by negative fixtures.
// kind "drop-simplex": remove one nondegenerate simplex (and everything
// above it) from a named constructed object during a check.
struct MutationSpec {
  std::string kind;
  std::string target;  // which constructed sset the check should corrupt
  int level = 0;
  int index = 0;
};

// A problem instance as loaded from a fixture file.
struct InstanceSpec {
  std::string kind;  // "covering" | "tower" | "map-lift"
  std::string name;

  std::optional<CoveringSpace> covering;
  std::optional<Tower> tower;

  // map-lift: two coverings over a common base plus a base map to lift.
  std::optional<CoveringSpace> left;
  std::optional<CoveringSpace> right;
  std::optional<GraphMap> base_map;

  std::optional<MutationSpec> mutation;
  std::optional<Bounds> bounds;
};

// Built-in instances mirroring the shipped fixture files.
InstanceSpec builtin_c6_over_c3();
InstanceSpec builtin_c12_over_c3();
InstanceSpec builtin_tower_c12_c6_c3();
InstanceSpec builtin_maplift_c6();
std::vector<InstanceSpec> builtin_instances();

}  // namespace covcat

#endif
