#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace grail {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CycleDetected : public Error {
 public:
  explicit CycleDetected(std::vector<int> cycle);
  const std::vector<int>& cycle() const { return cycle_; }

 private:
  std::vector<int> cycle_;
};

class DanglingGoal : public Error {
 public:
  DanglingGoal(int goal, int n);
  int goal() const { return goal_; }

 private:
  int goal_;
};

class InvalidGoal : public Error {
 public:
  InvalidGoal(int goal, int n);
};

class TrialExhausted : public Error {
 public:
  TrialExhausted() : Error("trial step budget exhausted") {}
};

class EpochExhausted : public Error {
 public:
  EpochExhausted() : Error("all trials of the epoch have been run") {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class EmptyTable : public Error {
 public:
  EmptyTable() : Error("metrics table is empty") {}
};

}  // namespace grail
