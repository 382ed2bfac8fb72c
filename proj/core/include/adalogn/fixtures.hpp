#pragma once

// Small fixed instances shared by the CLI and the tests.

#include <cstdint>

#include "adalogn/gradcheck.hpp"
#include "adalogn/model.hpp"

namespace adalogn {

/// Context P0 -> P1 -> P2; option 0 "if not P2 then not P0" (entailed),
/// option 1 "if P2 then P0" (the converse, not entailed). Five nodes per
/// option graph.
TaskInstance gradcheck_instance();

/// d = 8, L = 2, tau = 0.5, table embeddings over {P0, P1, P2}.
ModelConfig gradcheck_config(std::uint64_t seed);

/// Finite-difference check of the smoothed loss on gradcheck_instance().
GradCheckReport run_gradcheck(std::uint64_t seed, const GradCheckOptions& opts = {});

}  // namespace adalogn
