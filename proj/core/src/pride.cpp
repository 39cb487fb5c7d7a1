#include "lfit/pride.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>

namespace lfit
{

namespace
{

bool matches_any( const rule& r, std::span< const state > states )
{
    return std::ranges::any_of( states, [ & ]( const state& s ) { return matches( r, s ); } );
}

// Distinct feature states mapped to the values observed for one target variable.
using observed_values = std::map< state, std::set< value_t > >;

observed_values group_by_features( std::span< const transition > ts, var_t target )
{
    observed_values out;
    for ( const auto& t : ts )
        out[ t.features ].insert( t.targets.at( target ) );
    return out;
}

pos_neg_split split_from( const observed_values& groups, atom target )
{
    pos_neg_split split{ target, {}, {} };
    for ( const auto& [ features, values ] : groups )
        ( values.contains( target.value ) ? split.positives : split.negatives ).push_back( features );
    return split;
}

} // namespace

pos_neg_split extract_pos_neg( std::span< const transition > ts, const variable_schema& schema, atom target )
{
    if ( ts.empty() )
        throw error{ "cannot extract examples from an empty transition set" };
    if ( !schema.in_domain( role::target, target.var, target.value ) )
        throw schema_error{ "atom is not a target atom of the schema" };
    validate( schema, ts );
    return split_from( group_by_features( ts, target.var ), target );
}

rule specialize_against( const rule& r, const state& pos, const state& neg, tie_break order )
{
    if ( pos.size() != neg.size() )
        throw schema_error{ "positive and negative states differ in size" };
    const auto n = static_cast< var_t >( pos.size() );
    for ( var_t i = 0; i < n; ++i )
    {
        const var_t v = order == tie_break::lowest_first ? i : n - 1 - i;
        if ( pos[ v ] != neg[ v ] )
            return r.with_condition( atom{ v, pos[ v ] } );
    }
    throw error{ "cannot separate a positive example from an identical negative one" };
}

rule minimize( const rule& r, std::span< const state > negatives )
{
    rule current = r;
    std::size_t i = 0;
    while ( i < current.body().size() )
    {
        rule shorter = current.without_condition( i );
        if ( matches_any( shorter, negatives ) )
            ++i;
        else
            current = std::move( shorter );
    }
    return current;
}

std::vector< rule > learn_atom( const pos_neg_split& split, const learner_config& cfg )
{
    std::vector< state > uncovered = split.positives;
    std::ranges::sort( uncovered );
    if ( cfg.order == tie_break::highest_first )
        std::ranges::reverse( uncovered );

    std::vector< rule > learned;
    while ( !uncovered.empty() )
    {
        const state& pos = uncovered.front();
        rule r{ split.target };
        for ( const auto& neg : split.negatives )
            if ( matches( r, neg ) )
                r = specialize_against( r, pos, neg, cfg.order );
        r = minimize( r, split.negatives );

        std::erase_if( uncovered, [ & ]( const state& s ) { return matches( r, s ); } );
        learned.push_back( std::move( r ) );
    }
    return learned;
}

program pride( std::span< const transition > ts, const variable_schema& schema, const learner_config& cfg )
{
    if ( ts.empty() )
        throw error{ "cannot learn from an empty transition set" };
    validate( schema, ts );

    std::vector< pos_neg_split > splits;
    for ( var_t v = 0; v < schema.targets().size(); ++v )
    {
        const auto groups = group_by_features( ts, v );
        for ( value_t value : schema.target( v ).domain )
            splits.push_back( split_from( groups, atom{ v, value } ) );
    }

    std::vector< std::vector< rule > > per_atom( splits.size() );
    if ( cfg.parallel_targets )
    {
        std::vector< std::future< std::vector< rule > > > jobs;
        jobs.reserve( splits.size() );
        for ( const auto& split : splits )
            jobs.push_back( std::async( std::launch::async, [ &split, &cfg ] { return learn_atom( split, cfg ); } ) );
        for ( std::size_t i = 0; i < jobs.size(); ++i )
            per_atom[ i ] = jobs[ i ].get();
    }
    else
    {
        for ( std::size_t i = 0; i < splits.size(); ++i )
            per_atom[ i ] = learn_atom( splits[ i ], cfg );
    }

    std::vector< rule > rules;
    for ( auto& group : per_atom )
        std::ranges::move( group, std::back_inserter( rules ) );
    return weight_rules( program{ schema, std::move( rules ) }, ts );
}

} // namespace lfit
