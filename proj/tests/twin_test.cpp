#include "lfit/pride.hpp"
#include "lfit/twin.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace lfit;

TEST( Replay, HeaviestValueWins )
{
    const variable_schema s{ { { "a", { 0, 1 } } }, { { "y", { 0, 1, 2 } } } };
    const program p{ s, { rule{ { 0, 1 }, { { 0, 1 } }, 3 }, rule{ { 0, 2 }, {}, 2 }, rule{ { 0, 0 }, { { 0, 0 } }, 5 } } };
    EXPECT_EQ( replay( p, { 1 } ), 1 );
    EXPECT_EQ( replay( p, { 0 } ), 0 );
}

TEST( Replay, TiesGoToLowerValueAndNoMatchIsEmpty )
{
    const variable_schema s{ { { "a", { 0, 1 } } }, { { "y", { 0, 1 } } } };
    const program p{ s, { rule{ { 0, 1 }, { { 0, 1 } }, 2 }, rule{ { 0, 0 }, { { 0, 1 } }, 2 } } };
    EXPECT_EQ( replay( p, { 1 } ), 0 );
    EXPECT_FALSE( replay( p, { 0 } ) );
}

TEST( Conflicts, IndistinguishableStatesAreReported )
{
    const std::vector< transition > ts{ { { 0 }, { 1 } }, { { 1 }, { 0 } }, { { 0 }, { 0 } }, { { 0 }, { 1 } } };
    const auto c = find_conflicts( ts );
    ASSERT_EQ( c.size(), 1u );
    EXPECT_EQ( c[ 0 ].features, ( state{ 0 } ) );
    EXPECT_EQ( c[ 0 ].targets, ( std::vector< state >{ { 0 }, { 1 } } ) );
    EXPECT_EQ( c[ 0 ].rows, 3u );
}

TEST( ReplayAgreement, DeterministicDataIsReplayedExactly )
{
    rng gen{ 5 };
    for ( int i = 0; i < 50; ++i )
    {
        auto in = test::random_instance( gen );
        // Make the data a function of the features.
        for ( auto& t : in.rows )
            for ( auto& u : in.rows )
                if ( u.features == t.features )
                    u.targets = t.targets;
        const auto p = pride( in.rows, in.schema );
        const auto s = replay_agreement( p, in.rows );
        EXPECT_EQ( s.agreeing, s.rows );
        EXPECT_EQ( s.conflicting_states, 0u );
        EXPECT_DOUBLE_EQ( s.accuracy(), 1.0 );
    }
}

TEST( ReplayAgreement, CountsConflicts )
{
    const variable_schema s{ { { "a", { 0, 1 } } }, { { "y", { 0, 1 } } } };
    const std::vector< transition > ts{ { { 0 }, { 1 } }, { { 0 }, { 0 } }, { { 1 }, { 1 } } };
    const auto r = replay_agreement( pride( ts, s ), ts );
    EXPECT_EQ( r.rows, 3u );
    EXPECT_EQ( r.distinct_states, 2u );
    EXPECT_EQ( r.conflicting_states, 1u );
    EXPECT_EQ( r.agreeing, 2u );
}
