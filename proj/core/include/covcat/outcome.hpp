#ifndef COVCAT_OUTCOME_HPP
#define COVCAT_OUTCOME_HPP

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace covcat {

// Wall-clock cap for exhaustive searches. Long loops poll expired();
// hitting the cap makes the surrounding check report inconclusive, never
// pass. A null Budget pointer means unlimited.
struct Budget {
  std::chrono::steady_clock::time_point deadline{};
  bool limited = false;

  static Budget unlimited() { return Budget{}; }
  static Budget from_ms(long long ms) {
    Budget b;
    b.limited = true;
    b.deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
    return b;
  }
  bool expired() const {
    return limited && std::chrono::steady_clock::now() > deadline;
  }
};

inline bool budget_expired(const Budget* b) { return b != nullptr && b->expired(); }

struct CheckOutcome {
  enum class Status { pass, fail, inconclusive };

  Status status = Status::fail;
  std::string detail;  // witness, counterexample, or summary line
  // Ordered key/value payload for reports; deterministic content only
  // (counts, labels, bounds), never timestamps.
  std::vector<std::pair<std::string, std::string>> facts;

  static CheckOutcome pass(std::string detail) {
    return {Status::pass, std::move(detail), {}};
  }
  static CheckOutcome fail(std::string detail) {
    return {Status::fail, std::move(detail), {}};
  }
  static CheckOutcome inconclusive(std::string detail) {
    return {Status::inconclusive, std::move(detail), {}};
  }

  CheckOutcome& fact(const std::string& key, const std::string& value) {
    facts.emplace_back(key, value);
    return *this;
  }
  bool passed() const { return status == Status::pass; }
};

}  // namespace covcat

#endif
