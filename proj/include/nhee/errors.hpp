#pragma once

#include <stdexcept>
#include <string>

namespace nhee {

// Error categories map onto the CLI exit codes:
//   config_error -> 2, numeric_refusal -> 3, solver_error -> 4.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameters or invalid parameter combinations.
struct config_error : error {
  using error::error;
};

// The computation was refused before producing garbage: overflow guards,
// occupation ties at E_F, singular similarity transforms, determinant range.
struct numeric_refusal : error {
  using error::error;
};

// A numerical routine ran and failed (eigensolver breakdown, fit breakdown,
// EP classification outside its admissible exponent window).
struct solver_error : error {
  using error::error;
};

// Requested diagnostic does not apply to the given configuration
// (e.g. edge-gap prediction outside the topological region, r(k) >= 1).
struct not_applicable_error : config_error {
  using config_error::config_error;
};

inline int exit_code_for(const error& e) {
  if (dynamic_cast<const numeric_refusal*>(&e)) return 3;
  if (dynamic_cast<const solver_error*>(&e)) return 4;
  return 2;
}

}  // namespace nhee
