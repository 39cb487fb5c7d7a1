#pragma once

// Text formats for programs and transition sets.
//
// Program text:
//
//     # comment
//     @feature a {0,1}
//     @target y {0,1}
//     y(1) :- a(1), b(0).  %% w=3
//     y(0) :- .  %% w=1
//
// A rule may span several lines; it ends at the '.'. The weight annotation is
// optional when parsing and always emitted when serialising.
//
// Transitions CSV: one header row naming every variable (feature columns first,
// then target columns), one row per transition. Leading lines starting with
// '#' may declare the schema with the same `@feature`/`@target` syntax.

#include "lfit/mvl.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lfit
{

[[nodiscard]] std::string serialize_schema( const variable_schema& schema );
[[nodiscard]] std::string serialize_rule( const variable_schema& schema, const rule& r );
[[nodiscard]] std::string serialize_program( const program& p );

// The text must declare its schema in a header block.
[[nodiscard]] program parse_program( std::string_view text );
// Checks against a known schema. A header block, if present, must declare the same schema.
[[nodiscard]] program parse_program( std::string_view text, const variable_schema& schema );

struct transition_table
{
    variable_schema schema;
    std::vector< transition > rows;
};

// With schema_comments set, the schema is written as '#' lines before the header.
[[nodiscard]] std::string write_transitions_csv( const variable_schema& schema, std::span< const transition > rows,
                                                 bool schema_comments = true );

struct csv_schema_options
{
    // Used when the file carries no schema comments. Otherwise the schema
    // is inferred: the last `inferred_targets` columns are targets and every
    // domain is the set of observed values.
    std::optional< variable_schema > schema;
    std::size_t inferred_targets = 1;
};

[[nodiscard]] transition_table read_transitions_csv( std::string_view text, const csv_schema_options& options = {} );

} // namespace lfit
