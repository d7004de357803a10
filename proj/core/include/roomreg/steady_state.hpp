#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "roomreg/assembly.hpp"

namespace roomreg {

struct ForcingFields {
  ScalarField fx, fy;  // body force
  ScalarField fT;      // heat source
};

struct ForcingLoads {
  Vec f_w;
  Vec f_T;
};

ForcingLoads assemble_forcing(const FemSpaces& spaces, const ForcingFields& forcing);

struct SteadyState {
  Vec w, q, T;
  double residual_norm = 0.0;
  std::vector<double> history;  // residual 2-norm before each Newton step and at exit

  static SteadyState zero(const FemSpaces& spaces);
  int iterations() const { return history.empty() ? 0 : static_cast<int>(history.size()) - 1; }
};

class NewtonDivergence : public NumericalError {
 public:
  NewtonDivergence(const std::string& msg, std::vector<double> history)
      : NumericalError(msg), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 25;
};

/// Weak-form residual r = f - F(w, q, T) stacked as [momentum; energy; continuity].
/// The continuity block is D w (zero for a discretely divergence-free w).
Vec nonlinear_residual(const FemSpaces& spaces, const LinearForms& forms, const SteadyState& state,
                       const ForcingLoads& loads);

/// Plain Newton on the saddle-point system with the exact Jacobian.
SteadyState newton_solve(const FemSpaces& spaces, const LinearForms& forms,
                         const ForcingLoads& loads, const SteadyState& initial_guess,
                         const NewtonOptions& options = {});

struct SteadyStateSequence {
  SteadyState initial;  // (w_i, T_i): solution for the initial-guess forcing
  SteadyState final;    // (w_ss, T_ss)
  int total_iterations() const { return initial.iterations() + final.iterations(); }
};

/// Two-stage continuation: solve with the initial-guess forcing from zero,
/// then with the target forcing starting from that solution.
SteadyStateSequence two_stage_steady_state(const FemSpaces& spaces, const LinearForms& forms,
                                           const ForcingFields& initial_forcing,
                                           const ForcingFields& forcing,
                                           const NewtonOptions& options = {});

/// CSV with columns block,index,value; the first line records the key the
/// state was computed for (typically a hash of mesh and scenario).
void save_steady_state(const std::filesystem::path& path, const SteadyState& state,
                       const std::string& key);
/// Throws std::runtime_error if the stored key differs.
SteadyState load_steady_state(const std::filesystem::path& path, const std::string& key);

}  // namespace roomreg
