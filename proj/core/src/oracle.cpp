#include "lfit/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

namespace lfit
{

namespace
{

// Mixed-radix body code: digit v is 0 when feature v is absent, k when it is
// bound to the k-th value of its domain.
struct body_space
{
    std::vector< std::uint64_t > radix;
    std::uint64_t size = 1;

    explicit body_space( const variable_schema& schema, std::uint64_t cap )
    {
        for ( const auto& f : schema.features() )
        {
            const std::uint64_t r = f.domain.size() + 1;
            radix.push_back( r );
            if ( size > cap / r )
                throw oracle_refusal{ "feature space exceeds the oracle cap of " + std::to_string( cap ) + " bodies" };
            size *= r;
        }
    }

    [[nodiscard]] std::vector< atom > decode( std::uint64_t code, const variable_schema& schema ) const
    {
        std::vector< atom > body;
        for ( var_t v = 0; v < radix.size(); ++v )
        {
            const auto digit = code % radix[ v ];
            code /= radix[ v ];
            if ( digit != 0 )
                body.push_back( atom{ v, schema.feature( v ).domain[ digit - 1 ] } );
        }
        return body;
    }
};

bool body_matches( std::span< const atom > body, const state& s )
{
    return std::ranges::all_of( body, [ & ]( const atom& a ) { return s[ a.var ] == a.value; } );
}

} // namespace

program optimal_program( std::span< const transition > ts, const variable_schema& schema, const oracle_config& cfg )
{
    validate( schema, ts );
    const body_space space{ schema, cfg.body_cap };

    std::vector< std::vector< atom > > bodies;
    bodies.reserve( space.size );
    for ( std::uint64_t code = 0; code < space.size; ++code )
        bodies.push_back( space.decode( code, schema ) );

    std::vector< rule > optimal;
    for ( var_t tv = 0; tv < schema.targets().size(); ++tv )
    {
        std::map< state, std::set< value_t > > observed;
        for ( const auto& t : ts )
            observed[ t.features ].insert( t.targets[ tv ] );

        for ( value_t value : schema.target( tv ).domain )
        {
            std::set< std::vector< atom > > accepted;
            for ( const auto& body : bodies )
            {
                bool hits_positive = false;
                bool consistent = true;
                for ( const auto& [ features, values ] : observed )
                {
                    if ( !body_matches( body, features ) )
                        continue;
                    if ( values.contains( value ) )
                        hits_positive = true;
                    else
                    {
                        consistent = false;
                        break;
                    }
                }
                if ( consistent && hits_positive )
                    accepted.insert( body );
            }

            for ( const auto& body : accepted )
            {
                // Any strictly smaller accepted body dominates this one.
                const std::size_t n = body.size();
                bool dominated = false;
                for ( std::uint64_t mask = 0; mask + 1 < ( std::uint64_t{ 1 } << n ) && !dominated; ++mask )
                {
                    std::vector< atom > sub;
                    for ( std::size_t i = 0; i < n; ++i )
                        if ( mask & ( std::uint64_t{ 1 } << i ) )
                            sub.push_back( body[ i ] );
                    dominated = accepted.contains( sub );
                }
                if ( !dominated )
                    optimal.emplace_back( atom{ tv, value }, body );
            }
        }
    }
    return program{ schema, std::move( optimal ) };
}

} // namespace lfit
