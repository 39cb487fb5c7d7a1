#include "lfit/twin.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace lfit
{

std::optional< value_t > replay( const program& p, const state& features, var_t target )
{
    std::map< value_t, std::uint64_t > votes;
    for ( const auto& r : p.rules() )
        if ( r.head().var == target && matches( r, features ) )
            votes[ r.head().value ] += r.weight();
    if ( votes.empty() )
        return std::nullopt;
    // std::map iterates values ascending, so max_element keeps the lowest on ties.
    return std::ranges::max_element( votes, {}, &std::pair< const value_t, std::uint64_t >::second )->first;
}

std::vector< conflict > find_conflicts( std::span< const transition > ts )
{
    std::map< state, std::pair< std::set< state >, std::size_t > > seen;
    for ( const auto& t : ts )
    {
        auto& [ targets, rows ] = seen[ t.features ];
        targets.insert( t.targets );
        ++rows;
    }
    std::vector< conflict > out;
    for ( auto& [ features, entry ] : seen )
        if ( entry.first.size() > 1 )
            out.push_back( conflict{ features, { entry.first.begin(), entry.first.end() }, entry.second } );
    return out;
}

replay_summary replay_agreement( const program& p, std::span< const transition > ts )
{
    replay_summary summary;
    std::set< state > distinct;
    for ( const auto& t : ts )
    {
        distinct.insert( t.features );
        ++summary.rows;
        bool agree = true;
        bool unmatched = false;
        for ( var_t v = 0; v < t.targets.size(); ++v )
        {
            const auto predicted = replay( p, t.features, v );
            unmatched = unmatched || !predicted;
            agree = agree && predicted && *predicted == t.targets[ v ];
        }
        summary.agreeing += agree ? 1 : 0;
        summary.unmatched += unmatched ? 1 : 0;
    }
    summary.distinct_states = distinct.size();
    summary.conflicting_states = find_conflicts( ts ).size();
    return summary;
}

} // namespace lfit
