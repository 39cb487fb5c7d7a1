#pragma once

#include "lfit/mvl.hpp"
#include "lfit/rng.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace lfit::test
{

inline std::vector< value_t > range( value_t n )
{
    std::vector< value_t > d( static_cast< std::size_t >( n ) );
    std::iota( d.begin(), d.end(), 0 );
    return d;
}

// Boolean features a, b, ... and one Boolean target y.
inline variable_schema boolean_schema( std::size_t features = 2 )
{
    std::vector< variable_decl > fs;
    for ( std::size_t i = 0; i < features; ++i )
        fs.push_back( { std::string( 1, static_cast< char >( 'a' + i ) ), { 0, 1 } } );
    return variable_schema{ std::move( fs ), { { "y", { 0, 1 } } } };
}

// All four rows of y = f(a, b).
template < class F >
std::vector< transition > truth_table( F f )
{
    std::vector< transition > ts;
    for ( value_t a = 0; a < 2; ++a )
        for ( value_t b = 0; b < 2; ++b )
            ts.push_back( { { a, b }, { f( a, b ) } } );
    return ts;
}

struct instance
{
    variable_schema schema;
    std::vector< transition > rows;
};

// Up to 4 features with domains of size <= 3, 1-2 targets, <= 40 rows.
// Repeated feature states get independent targets, so nondeterminism shows up.
inline instance random_instance( rng& gen, std::size_t max_features = 4, value_t max_domain = 3,
                                 std::size_t max_rows = 40 )
{
    const std::size_t nf = 1 + gen.below( max_features );
    const std::size_t nt = 1 + gen.below( 2 );
    std::vector< variable_decl > fs, tgs;
    for ( std::size_t i = 0; i < nf; ++i )
        fs.push_back( { "x" + std::to_string( i ), range( 2 + static_cast< value_t >( gen.below( max_domain - 1 ) ) ) } );
    for ( std::size_t i = 0; i < nt; ++i )
        tgs.push_back( { "y" + std::to_string( i ), range( 2 + static_cast< value_t >( gen.below( max_domain - 1 ) ) ) } );
    instance in{ variable_schema{ fs, tgs }, {} };

    const std::size_t n = 1 + gen.below( max_rows );
    for ( std::size_t r = 0; r < n; ++r )
    {
        transition t;
        for ( const auto& d : fs )
            t.features.push_back( d.domain[ gen.below( d.domain.size() ) ] );
        for ( const auto& d : tgs )
            t.targets.push_back( d.domain[ gen.below( d.domain.size() ) ] );
        in.rows.push_back( std::move( t ) );
    }
    return in;
}

inline rule random_rule( rng& gen, const variable_schema& schema, double p_condition = 0.5 )
{
    const var_t h = static_cast< var_t >( gen.below( schema.targets().size() ) );
    const auto& hd = schema.target( h ).domain;
    std::vector< atom > body;
    for ( var_t v = 0; v < schema.features().size(); ++v )
        if ( gen.unit() < p_condition )
        {
            const auto& d = schema.feature( v ).domain;
            body.push_back( { v, d[ gen.below( d.size() ) ] } );
        }
    return rule{ { h, hd[ gen.below( hd.size() ) ] }, std::move( body ) };
}

inline state random_state( rng& gen, const variable_schema& schema )
{
    state s;
    for ( const auto& d : schema.features() )
        s.push_back( d.domain[ gen.below( d.domain.size() ) ] );
    return s;
}

// Correctness condition written directly from its definition, independent of
// the library: every matched feature state has some row carrying the head.
inline bool consistent_by_definition( const rule& r, const std::vector< transition >& ts )
{
    for ( const auto& t : ts )
    {
        bool match = true;
        for ( const auto& a : r.body() )
            match = match && t.features[ a.var ] == a.value;
        if ( !match )
            continue;
        bool carried = false;
        for ( const auto& u : ts )
            carried = carried || ( u.features == t.features && u.targets[ r.head().var ] == r.head().value );
        if ( !carried )
            return false;
    }
    return true;
}

} // namespace lfit::test
