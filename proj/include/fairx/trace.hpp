#pragma once

#include <cstdint>
#include <vector>

#include "fairx/constants.hpp"

namespace fairx {

enum class StepKind { select_s, decrease_flow, increase_flow };

enum class StepCase { none, decrease_phase, increase_edge };

struct TraceStep {
  StepKind kind = StepKind::select_s;
  std::uint64_t outer_iter = 0;

  // select_s
  std::vector<int> selected_set;
  StepCase step_case = StepCase::none;
  int receiver = -1;  // decrease phase: column j*

  // flow steps: touched entry (from, to), old/new value. Snapshots between
  // steps differ only in this entry.
  int from = -1;
  int to = -1;
  double old_value = 0.0;
  double new_value = 0.0;

  std::vector<double> surplus_before;  // perturbed deltas
  std::vector<double> surplus_after;
  bool acyclic_attested = false;
};

struct SolverTrace {
  SolverConstants constants;
  std::vector<double> initial_surplus;  // perturbed deltas at the all-ones start
  std::vector<TraceStep> steps;
};

}  // namespace fairx
