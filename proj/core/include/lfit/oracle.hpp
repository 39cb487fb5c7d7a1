#pragma once

// Exhaustive computation of the optimal program of a transition set. Every
// candidate body (each feature either absent or bound to one of its values)
// is tried for every target atom. Exponential in the number of features; only
// meant to check the polynomial learner on small instances.

#include "lfit/mvl.hpp"

#include <cstdint>
#include <span>

namespace lfit
{

class oracle_refusal : public error
{
public:
    using error::error;
};

struct oracle_config
{
    // Upper bound on the product of (|dom(v)| + 1) over the feature variables.
    std::uint64_t body_cap = 1'000'000;
};

// All rules that are consistent with the transitions, match at least one
// positive state of their head, and are not strictly dominated by another
// consistent rule. Unweighted. Throws oracle_refusal above the cap.
[[nodiscard]] program optimal_program( std::span< const transition > ts, const variable_schema& schema,
                                       const oracle_config& cfg = {} );

} // namespace lfit
