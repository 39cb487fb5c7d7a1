#pragma once

// Polynomial-time rule induction from transitions. For each target atom the
// learner splits the observed feature states into positives (some transition
// yields the atom) and negatives (none does), then repeatedly grows a rule
// from one uncovered positive until it rejects every negative, strips the
// conditions that are no longer needed, and retires the positives it covers.
//
// Every emitted rule is consistent with the transitions and cannot lose a
// condition without matching a negative, which places it in the optimal
// program. Together the rules realize every observed target atom.

#include "lfit/mvl.hpp"

#include <span>
#include <vector>

namespace lfit
{

// Distinct feature states, sorted in canonical (lexicographic) order.
struct pos_neg_split
{
    atom target;
    std::vector< state > positives;
    std::vector< state > negatives;
};

enum class tie_break : std::uint8_t
{
    // Smallest positive state first; the condition added to a rule is the
    // differing feature with the lowest index.
    lowest_first,
    // Largest positive state first; highest differing feature index.
    highest_first
};

struct learner_config
{
    tie_break order = tie_break::lowest_first;
    bool parallel_targets = false;
};

[[nodiscard]] pos_neg_split extract_pos_neg( std::span< const transition > ts, const variable_schema& schema,
                                             atom target );

// Adds one atom of `pos` that `neg` does not share. Throws lfit::error when
// the two states are equal.
[[nodiscard]] rule specialize_against( const rule& r, const state& pos, const state& neg,
                                       tie_break order = tie_break::lowest_first );

// Drops body atoms in canonical order whenever the shorter rule still matches
// no negative.
[[nodiscard]] rule minimize( const rule& r, std::span< const state > negatives );

[[nodiscard]] std::vector< rule > learn_atom( const pos_neg_split& split, const learner_config& cfg = {} );

// Throws lfit::error on an empty transition set and schema_error on rows that
// do not conform to the schema. Rules come back weighted.
[[nodiscard]] program pride( std::span< const transition > ts, const variable_schema& schema,
                             const learner_config& cfg = {} );

} // namespace lfit
