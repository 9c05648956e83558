#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spray {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// sign-class masses of two signed clouds do not match
struct incompatibility_error : error {
  using error::error;
};

// vorticity discretization produced an empty or inconsistent sign class
struct discretization_error : error {
  using error::error;
};

// input outside the scope of an exact reference computation
struct oracle_error : error {
  using error::error;
};

// trajectories cannot be compared atom by atom
struct pairing_error : error {
  using error::error;
};

// perturbed initial data coincides with the base state
struct degenerate_perturbation_error : error {
  using error::error;
};

// transport solver failed to certify optimality
struct solver_error : error {
  using error::error;
};

// invalid or unknown configuration input
struct config_error : error {
  using error::error;
};

// a coordinate left the trusted numerical range during integration
struct blowup_error : error {
  double time;
  std::size_t atom_index;
  bool spray_atom;

  blowup_error(const std::string& msg, double t, std::size_t idx, bool spray)
      : error(msg), time(t), atom_index(idx), spray_atom(spray) {}
};

}  // namespace spray
