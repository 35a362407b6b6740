#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace gptlab {

// Raised for malformed inputs: shape or kind mismatches, bad permutations,
// unparseable files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a numerical routine cannot finish within its iteration budget.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Relative tolerance used when callers do not pass one. Starts at 1e-9 and
// honours GPTLAB_TOL from the environment on first access.
double default_tolerance();
void set_default_tolerance(double tol);

// Worker count for batch audits; 0 means "hardware concurrency".
std::size_t default_threads();
void set_default_threads(std::size_t n);

// Runs body(i) for i in [0, count) over `threads` workers. Each index is
// visited exactly once; callers write results into slot i so the outcome
// does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace gptlab
