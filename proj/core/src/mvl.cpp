#include "lfit/mvl.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace lfit
{

namespace
{

void normalise_domain( variable_decl& decl )
{
    if ( decl.name.empty() )
        throw schema_error{ "variable with empty name" };
    if ( decl.domain.empty() )
        throw schema_error{ "variable '" + decl.name + "' has an empty domain" };
    std::ranges::sort( decl.domain );
    auto [first, last] = std::ranges::unique( decl.domain );
    decl.domain.erase( first, last );
    if ( decl.domain.front() < 0 )
        throw schema_error{ "variable '" + decl.name + "' has a negative value in its domain" };
}

} // namespace

variable_schema::variable_schema( std::vector< variable_decl > features, std::vector< variable_decl > targets )
    : _features{ std::move( features ) }, _targets{ std::move( targets ) }
{
    std::unordered_set< std::string > names;
    for ( auto* decls : { &_features, &_targets } )
    {
        for ( auto& decl : *decls )
        {
            normalise_domain( decl );
            if ( !names.insert( decl.name ).second )
                throw schema_error{ "duplicate variable '" + decl.name + "'" };
        }
    }
}

std::optional< variable_schema::lookup > variable_schema::find( std::string_view name ) const
{
    for ( var_t i = 0; i < _features.size(); ++i )
        if ( _features[ i ].name == name )
            return lookup{ role::feature, i };
    for ( var_t i = 0; i < _targets.size(); ++i )
        if ( _targets[ i ].name == name )
            return lookup{ role::target, i };
    return std::nullopt;
}

bool variable_schema::in_domain( role r, var_t v, value_t value ) const
{
    const auto vars = variables( r );
    if ( v >= vars.size() )
        return false;
    return std::ranges::binary_search( vars[ v ].domain, value );
}

std::size_t variable_schema::atom_count( role r ) const
{
    std::size_t n = 0;
    for ( const auto& decl : variables( r ) )
        n += decl.domain.size();
    return n;
}

rule::rule( atom head, std::vector< atom > body, std::uint64_t weight )
    : _head{ head }, _body{ std::move( body ) }, _weight{ weight }
{
    std::ranges::sort( _body );
    for ( std::size_t i = 1; i < _body.size(); ++i )
        if ( _body[ i ].var == _body[ i - 1 ].var )
            throw schema_error{ "rule body mentions feature " + std::to_string( _body[ i ].var ) + " twice" };
}

std::optional< value_t > rule::condition_on( var_t feature ) const
{
    auto it = std::ranges::lower_bound( _body, feature, {}, &atom::var );
    if ( it == _body.end() || it->var != feature )
        return std::nullopt;
    return it->value;
}

bool rule::has_condition( const atom& a ) const
{
    return std::ranges::binary_search( _body, a );
}

rule rule::with_weight( std::uint64_t w ) const
{
    rule r = *this;
    r._weight = w;
    return r;
}

rule rule::with_condition( atom a ) const
{
    rule r = *this;
    auto it = std::ranges::lower_bound( r._body, a.var, {}, &atom::var );
    if ( it != r._body.end() && it->var == a.var )
        throw schema_error{ "rule body already constrains feature " + std::to_string( a.var ) };
    r._body.insert( it, a );
    return r;
}

rule rule::without_condition( std::size_t body_index ) const
{
    rule r = *this;
    r._body.erase( r._body.begin() + static_cast< std::ptrdiff_t >( body_index ) );
    return r;
}

program::program( variable_schema schema, std::vector< rule > rules )
    : _schema{ std::move( schema ) }, _rules{ std::move( rules ) }
{
    for ( const auto& r : _rules )
        validate( _schema, r );
    std::ranges::sort( _rules );
    if ( std::ranges::adjacent_find( _rules ) != _rules.end() )
        throw schema_error{ "program contains the same rule twice" };
}

bool program::contains( const rule& r ) const
{
    return std::ranges::binary_search( _rules, r );
}

void validate( const variable_schema& schema, const rule& r )
{
    if ( !schema.in_domain( role::target, r.head().var, r.head().value ) )
        throw schema_error{ "rule head is not a target atom of the schema" };
    for ( const auto& a : r.body() )
        if ( !schema.in_domain( role::feature, a.var, a.value ) )
            throw schema_error{ "rule body atom is not a feature atom of the schema" };
}

void validate( const variable_schema& schema, const transition& t )
{
    auto check = [ & ]( const state& s, role r, const char* what ) {
        const auto vars = schema.variables( r );
        if ( s.size() != vars.size() )
            throw schema_error{ std::string{ what } + " state has " + std::to_string( s.size() ) +
                                " values, schema declares " + std::to_string( vars.size() ) };
        for ( var_t v = 0; v < s.size(); ++v )
            if ( !schema.in_domain( r, v, s[ v ] ) )
                throw schema_error{ "value " + std::to_string( s[ v ] ) + " outside the domain of '" +
                                    vars[ v ].name + "'" };
    };
    check( t.features, role::feature, "feature" );
    check( t.targets, role::target, "target" );
}

void validate( const variable_schema& schema, std::span< const transition > ts )
{
    for ( const auto& t : ts )
        validate( schema, t );
}

bool matches( const rule& r, const state& features )
{
    for ( const auto& a : r.body() )
    {
        if ( a.var >= features.size() )
            throw schema_error{ "rule body refers to feature " + std::to_string( a.var ) +
                                " absent from a state of size " + std::to_string( features.size() ) };
        if ( features[ a.var ] != a.value )
            return false;
    }
    return true;
}

bool dominates( const rule& r1, const rule& r2 )
{
    if ( r1.head() != r2.head() )
        return false;
    return std::ranges::includes( r2.body(), r1.body() );
}

bool realizes( const rule& r, const transition& t )
{
    const auto& h = r.head();
    return h.var < t.targets.size() && t.targets[ h.var ] == h.value && matches( r, t.features );
}

bool is_consistent( const rule& r, std::span< const transition > ts )
{
    const auto& h = r.head();
    std::set< state > yielding;
    for ( const auto& t : ts )
        if ( h.var < t.targets.size() && t.targets[ h.var ] == h.value )
            yielding.insert( t.features );

    for ( const auto& t : ts )
        if ( matches( r, t.features ) && !yielding.contains( t.features ) )
            return false;
    return true;
}

program weight_rules( const program& p, std::span< const transition > ts )
{
    std::vector< rule > weighted;
    weighted.reserve( p.size() );
    for ( const auto& r : p.rules() )
    {
        const auto n = std::ranges::count_if( ts, [ & ]( const transition& t ) { return matches( r, t.features ); } );
        weighted.push_back( r.with_weight( static_cast< std::uint64_t >( n ) ) );
    }
    return program{ p.schema(), std::move( weighted ) };
}

} // namespace lfit
