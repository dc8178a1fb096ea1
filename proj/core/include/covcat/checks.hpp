#ifndef COVCAT_CHECKS_HPP
#define COVCAT_CHECKS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "covcat/instances.hpp"
#include "covcat/outcome.hpp"

namespace covcat {

// One verifiable statement. Ids are part of the external interface and are
// stable; descriptions say what is being tested on which inputs.
struct RegistryEntry {
  std::string id;
  std::string statement;    // headline of the fact being checked
  std::string description;  // what the run actually does
  std::string applies_to;   // "covering" | "tower" | "map-lift" | "any"
};

const std::vector<RegistryEntry>& check_registry();
const RegistryEntry* find_check(const std::string& id);

struct RunOptions {
  Bounds bounds;
  int jobs = 1;
  long long budget_ms = 0;  // 0 = unlimited
  unsigned long long seed = 0;
  std::vector<std::string> only;  // restrict to these check ids
};

struct CheckRecord {
  std::string id;
  CheckOutcome outcome;
};

// Runs every applicable registry check on the instance. Checks honoring a
// budget report `inconclusive` when it expires instead of guessing.
std::vector<CheckRecord> run_checks(const InstanceSpec& inst,
                                    const RunOptions& opt);

// Individual checks (exposed for tests). Bounds are clamped internally to
// each check's pinned maximum so runtimes stay predictable.
CheckOutcome check_prop_3_2(const InstanceSpec& inst, const Bounds& b,
                            const Budget* budget = nullptr);
CheckOutcome check_prop_3_7a(const InstanceSpec& inst, const Bounds& b,
                             const Budget* budget = nullptr);
CheckOutcome check_def_2_2_determinacy(const InstanceSpec& inst,
                                       const Bounds& b,
                                       const Budget* budget = nullptr);
CheckOutcome check_thm_4_1_strata(const InstanceSpec& inst, const Bounds& b,
                                  const Budget* budget = nullptr);
CheckOutcome check_thm_7_4_strata(const InstanceSpec& inst, const Bounds& b,
                                  const Budget* budget = nullptr);
CheckOutcome check_def_6_1_lift(const InstanceSpec& inst, const Bounds& b,
                                const Budget* budget = nullptr);
CheckOutcome check_eq_6_2_decomp(const InstanceSpec& inst, const Bounds& b,
                                 const Budget* budget = nullptr);
CheckOutcome check_epifin_closure(const InstanceSpec& inst, const Bounds& b,
                                  const Budget* budget = nullptr);
CheckOutcome check_lifting_uniqueness(const InstanceSpec& inst,
                                      const Bounds& b,
                                      const Budget* budget = nullptr);

}  // namespace covcat

#endif
