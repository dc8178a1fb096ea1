#include "covcat/instances.hpp"

namespace covcat {

InstanceSpec builtin_c6_over_c3() {
  InstanceSpec s;
  s.kind = "covering";
  s.name = "c6-over-c3";
  s.covering = cyclic_cover(6, 3);
  return s;
}

InstanceSpec builtin_c12_over_c3() {
  InstanceSpec s;
  s.kind = "covering";
  s.name = "c12-over-c3";
  s.covering = cyclic_cover(12, 3);
  return s;
}

InstanceSpec builtin_tower_c12_c6_c3() {
  InstanceSpec s;
  s.kind = "tower";
  s.name = "tower-c12-c6-c3";
  s.tower = Tower{cyclic_cover(12, 6), cyclic_cover(6, 3)};
  return s;
}

InstanceSpec builtin_maplift_c6() {
  InstanceSpec s;
  s.kind = "map-lift";
  s.name = "maplift-c6-over-c3";
  s.left = cyclic_cover(6, 3);
  s.right = cyclic_cover(6, 3);
  s.base_map = identity_graph_map(s.left->base);
  return s;
}

std::vector<InstanceSpec> builtin_instances() {
  return {builtin_c6_over_c3(), builtin_c12_over_c3(),
          builtin_tower_c12_c6_c3(), builtin_maplift_c6()};
}

}  // namespace covcat
