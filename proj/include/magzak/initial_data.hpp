#pragma once

#include <cstdint>

#include "magzak/config.hpp"

namespace magzak {

// Builds the initial state from a named generator. The result is dealiased,
// real channels are made real, means of n_t, B, B_t are removed and the d = 2
// embedding is applied. Throws UnknownGenerator or SnapshotVersionMismatch.
SystemState generate_initial_data(const InitialSpec& spec, GridPtr grid, const Params& params,
                                  std::uint64_t seed);

// Projections applied by every generator.
void enforce_invariants(SystemState& state);

}  // namespace magzak
