#include "hmc_search/policy.hpp"

namespace hmc_search {

SelectMode choose_mode(double epsilon, Rng& rng) {
  if (epsilon <= 0.0) {
    return SelectMode::exploit;
  }
  if (epsilon >= 1.0) {
    return SelectMode::explore;
  }
  return rng.uniform() < epsilon ? SelectMode::explore : SelectMode::exploit;
}

Cell option_terminal(Cell s, Direction d, int option_length, int grid_length) {
  Cell pos = s;
  for (int i = 0; i < option_length; ++i) {
    const Cell next = shifted(pos, d);
    if (next.x < 0 || next.y < 0 || next.x >= grid_length || next.y >= grid_length) {
      break;
    }
    pos = next;
  }
  return pos;
}

OptionOutcome execute_option(CloudField& field, const GridConfig& config, Cell pos, Direction d, int option_length,
                             int steps_remaining, FindStop stop, SenseAt sense_at) {
  OptionOutcome out;
  out.start = pos;
  out.direction = d;
  out.terminal = pos;
  for (int i = 0; i < option_length && out.primitive_steps < steps_remaining; ++i) {
    const MoveResult step = move(out.terminal, d, config);
    if (!step.moved) {
      out.clamped = true;
      break;
    }
    out.terminal = step.pos;
    out.path.push_back(step.pos);
    ++out.primitive_steps;
    if (sense_at == SenseAt::option_end) {
      continue;
    }
    const int found = collect(field, step.pos);
    out.found_count += found;
    if (found > 0 && (stop == FindStop::first_find || field.empty())) {
      break;
    }
  }
  if (sense_at == SenseAt::option_end && !out.path.empty()) {
    out.found_count = collect(field, out.terminal);
  }
  return out;
}

void record_visits(VisitMemory& mem, const OptionOutcome& outcome) {
  for (const Cell& c : outcome.path) {
    mem.increment(c);
  }
  if (outcome.clamped) {
    mem.increment(outcome.terminal);
  }
}

}  // namespace hmc_search
