#pragma once

// Replaying a learned program as a digital twin of the system it was learned from.

#include "lfit/mvl.hpp"

#include <optional>
#include <span>
#include <vector>

namespace lfit
{

// Among the rules for `target` that match the state, the head value with the
// largest total weight; ties go to the lower value. nullopt if nothing matches.
[[nodiscard]] std::optional< value_t > replay( const program& p, const state& features, var_t target = 0 );

// A feature state observed with more than one distinct target state.
struct conflict
{
    state features;
    std::vector< state > targets; // distinct, sorted
    std::size_t rows = 0;
};

[[nodiscard]] std::vector< conflict > find_conflicts( std::span< const transition > ts );

struct replay_summary
{
    std::size_t rows = 0;
    std::size_t agreeing = 0;
    std::size_t unmatched = 0; // rows where no rule for the target matched
    std::size_t distinct_states = 0;
    std::size_t conflicting_states = 0;

    [[nodiscard]] double accuracy() const
    {
        return rows == 0 ? 0.0 : static_cast< double >( agreeing ) / static_cast< double >( rows );
    }
};

// Row-level agreement between replay(p, features) and every target variable of each row.
[[nodiscard]] replay_summary replay_agreement( const program& p, std::span< const transition > ts );

} // namespace lfit
