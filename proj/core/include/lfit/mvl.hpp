#pragma once

// Multi-valued propositional logic: variables over finite integer domains,
// atoms, rules, states, transitions and programs.
//
// Variables are split into two roles. Feature variables appear in rule bodies,
// target variables in rule heads. An atom refers to its variable by position
// within that role, so a body atom {2, v} means "feature #2 has value v" and a
// head atom {0, v} means "target #0 has value v". States are dense value
// vectors over one role.

#include "lfit/error.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lfit
{

using value_t = std::int32_t;
using var_t = std::uint32_t;

enum class role : std::uint8_t
{
    feature,
    target
};

struct variable_decl
{
    std::string name;
    std::vector< value_t > domain; // sorted, unique, non-negative

    friend bool operator==( const variable_decl&, const variable_decl& ) = default;
};

class variable_schema
{
    std::vector< variable_decl > _features;
    std::vector< variable_decl > _targets;

public:
    variable_schema() = default;
    // Throws schema_error on duplicate names, empty or negative domains.
    // Domains are normalised to sorted unique order.
    variable_schema( std::vector< variable_decl > features, std::vector< variable_decl > targets );

    [[nodiscard]] std::span< const variable_decl > features() const { return _features; }
    [[nodiscard]] std::span< const variable_decl > targets() const { return _targets; }
    [[nodiscard]] std::span< const variable_decl > variables( role r ) const
    {
        return r == role::feature ? features() : targets();
    }
    [[nodiscard]] const variable_decl& feature( var_t v ) const { return _features.at( v ); }
    [[nodiscard]] const variable_decl& target( var_t v ) const { return _targets.at( v ); }

    struct lookup
    {
        role kind;
        var_t var;
    };
    [[nodiscard]] std::optional< lookup > find( std::string_view name ) const;

    [[nodiscard]] bool in_domain( role r, var_t v, value_t value ) const;

    // Total number of atoms over one role.
    [[nodiscard]] std::size_t atom_count( role r ) const;

    friend bool operator==( const variable_schema&, const variable_schema& ) = default;
};

struct atom
{
    var_t var = 0;
    value_t value = 0;

    friend auto operator<=>( const atom&, const atom& ) = default;
};

using state = std::vector< value_t >;

struct transition
{
    state features;
    state targets;

    friend auto operator<=>( const transition&, const transition& ) = default;
};

class rule
{
    atom _head;
    std::vector< atom > _body; // sorted by variable, one atom per variable
    std::uint64_t _weight = 0;

public:
    rule() = default;
    // Throws schema_error if two body atoms share a variable.
    explicit rule( atom head, std::vector< atom > body = {}, std::uint64_t weight = 0 );

    [[nodiscard]] const atom& head() const { return _head; }
    [[nodiscard]] std::span< const atom > body() const { return _body; }
    [[nodiscard]] std::uint64_t weight() const { return _weight; }

    [[nodiscard]] std::optional< value_t > condition_on( var_t feature ) const;
    [[nodiscard]] bool has_condition( const atom& a ) const;

    [[nodiscard]] rule with_weight( std::uint64_t w ) const;
    [[nodiscard]] rule with_condition( atom a ) const;
    [[nodiscard]] rule without_condition( std::size_t body_index ) const;

    // Identity ignores the weight annotation.
    friend bool operator==( const rule& a, const rule& b )
    {
        return a._head == b._head && a._body == b._body;
    }
    // Canonical order: head variable, head value, then body lexicographically.
    friend std::strong_ordering operator<=>( const rule& a, const rule& b )
    {
        if ( auto c = a._head <=> b._head; c != 0 )
            return c;
        return std::lexicographical_compare_three_way( a._body.begin(), a._body.end(),
                                                       b._body.begin(), b._body.end() );
    }
};

// A dynamic multi-valued logic program. Rules are kept in canonical order.
class program
{
    variable_schema _schema;
    std::vector< rule > _rules;

public:
    program() = default;
    // Throws schema_error on rules that do not fit the schema or on duplicates.
    program( variable_schema schema, std::vector< rule > rules );

    [[nodiscard]] const variable_schema& schema() const { return _schema; }
    [[nodiscard]] std::span< const rule > rules() const { return _rules; }
    [[nodiscard]] std::size_t size() const { return _rules.size(); }
    [[nodiscard]] bool empty() const { return _rules.empty(); }
    [[nodiscard]] bool contains( const rule& r ) const;

    friend bool operator==( const program&, const program& ) = default;
};

void validate( const variable_schema& schema, const rule& r );
void validate( const variable_schema& schema, const transition& t );
void validate( const variable_schema& schema, std::span< const transition > ts );

// b(R) is a subset of s. Throws schema_error when a body variable lies outside s.
[[nodiscard]] bool matches( const rule& r, const state& features );

// h(r1) = h(r2) and b(r1) is a subset of b(r2).
[[nodiscard]] bool dominates( const rule& r1, const rule& r2 );

[[nodiscard]] bool realizes( const rule& r, const transition& t );

// Whenever r matches the feature state of some transition, some transition
// with that same feature state carries the head atom.
[[nodiscard]] bool is_consistent( const rule& r, std::span< const transition > ts );

// Sets each weight to the number of transitions whose feature state the rule matches.
[[nodiscard]] program weight_rules( const program& p, std::span< const transition > ts );

} // namespace lfit
