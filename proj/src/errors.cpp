#include "grail/errors.hpp"

#include <sstream>

namespace grail {
namespace {

std::string describe_cycle(const std::vector<int>& cycle) {
  std::ostringstream os;
  os << "dependency cycle detected: ";
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (i > 0) os << " -> ";
    os << cycle[i];
  }
  return os.str();
}

}  // namespace

CycleDetected::CycleDetected(std::vector<int> cycle)
    : Error(describe_cycle(cycle)), cycle_(std::move(cycle)) {}

DanglingGoal::DanglingGoal(int goal, int n)
    : Error("goal id " + std::to_string(goal) + " is out of range for n=" +
            std::to_string(n)),
      goal_(goal) {}

InvalidGoal::InvalidGoal(int goal, int n)
    : Error("invalid goal id " + std::to_string(goal) + " (n=" +
            std::to_string(n) + ")") {}

ParseError::ParseError(const std::string& what, int line, int column)
    : Error("parse error at line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

ValidationError::ValidationError(std::string field, const std::string& what)
    : Error("invalid value for '" + field + "': " + what),
      field_(std::move(field)) {}

}  // namespace grail
