#pragma once

#include <stdexcept>
#include <string>

namespace followahead {

// Malformed input document (map, params, scenario). Carries a 1-based line
// number when the format is line oriented; 0 means "not line addressable".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Geometric query on coincident points (e.g. bearing of a zero-length vector).
class DegenerateGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Predictor asked for a fit before enough history has accumulated.
class NotReadyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Planner cannot produce any goal: root in collision or every first action pruned.
class PlanningInfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training loss became non-finite. Carries the optimizer step that diverged.
class TrainingFailureError : public std::runtime_error {
 public:
  TrainingFailureError(std::string message, std::size_t step)
      : std::runtime_error(message + " (step " + std::to_string(step) + ")"),
        step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace followahead
