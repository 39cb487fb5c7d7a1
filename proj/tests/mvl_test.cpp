#include "lfit/mvl.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace lfit;
using lfit::test::boolean_schema;

namespace
{

// gender, education, experience -> scores
variable_schema listing_schema()
{
    return variable_schema{ { { "gender", { 0, 1 } }, { "education", test::range( 6 ) }, { "experience", test::range( 6 ) } },
                            { { "scores", test::range( 4 ) } } };
}

const atom a1{ 0, 1 }, a0{ 0, 0 }, b0{ 1, 0 }, b1{ 1, 1 };
const atom head1{ 0, 1 }, head0{ 0, 0 };

} // namespace

TEST( Schema, RejectsDuplicateNames )
{
    EXPECT_THROW( ( variable_schema{ { { "a", { 0 } }, { "a", { 1 } } }, {} } ), schema_error );
    EXPECT_THROW( ( variable_schema{ { { "a", { 0 } } }, { { "a", { 1 } } } } ), schema_error );
}

TEST( Schema, RejectsEmptyOrNegativeDomains )
{
    EXPECT_THROW( ( variable_schema{ { { "a", {} } }, {} } ), schema_error );
    EXPECT_THROW( ( variable_schema{ { { "a", { -1, 0 } } }, {} } ), schema_error );
}

TEST( Schema, NormalisesDomainsAndAllowsHoles )
{
    variable_schema s{ { { "a", { 4, 0, 2, 2 } } }, { { "y", { 1 } } } };
    EXPECT_EQ( s.feature( 0 ).domain, ( std::vector< value_t >{ 0, 2, 4 } ) );
    EXPECT_TRUE( s.in_domain( role::feature, 0, 2 ) );
    EXPECT_FALSE( s.in_domain( role::feature, 0, 1 ) );
    EXPECT_EQ( s.atom_count( role::feature ), 3u );
    auto l = s.find( "y" );
    ASSERT_TRUE( l );
    EXPECT_EQ( l->kind, role::target );
    EXPECT_FALSE( s.find( "z" ) );
}

TEST( Rule, BodyIsSortedAndUnique )
{
    rule r{ head1, { b0, a1 } };
    ASSERT_EQ( r.body().size(), 2u );
    EXPECT_EQ( r.body()[ 0 ], a1 );
    EXPECT_THROW( ( rule{ head1, { a1, a0 } } ), schema_error );
}

TEST( Rule, EqualityIgnoresWeight )
{
    EXPECT_EQ( ( rule{ head1, { a1 }, 3 } ), ( rule{ head1, { a1 }, 7 } ) );
    EXPECT_NE( ( rule{ head1, { a1 } } ), ( rule{ head0, { a1 } } ) );
}

TEST( Matches, ListingRuleAgainstStates )
{
    const rule r{ { 0, 3 }, { { 1, 4 }, { 2, 3 } } };
    EXPECT_TRUE( matches( r, { 1, 4, 3 } ) );
    EXPECT_FALSE( matches( r, { 1, 5, 3 } ) );
}

TEST( Matches, EmptyBodyMatchesAnything )
{
    const rule r{ head1 };
    EXPECT_TRUE( matches( r, { 0, 0 } ) );
    EXPECT_TRUE( matches( r, { 1, 1 } ) );
    EXPECT_TRUE( matches( r, {} ) );
}

TEST( Matches, ThrowsOnShortState )
{
    EXPECT_THROW( (void)matches( rule{ head1, { b1 } }, { 1 } ), schema_error );
}

TEST( Dominates, Examples )
{
    EXPECT_TRUE( dominates( rule{ head1, { a1 } }, rule{ head1, { a1, b0 } } ) );
    EXPECT_FALSE( dominates( rule{ head1, { a1 } }, rule{ head0, { a1 } } ) );
    const rule r{ head1, { a1, b0 } };
    EXPECT_TRUE( dominates( r, r ) );
}

TEST( Realizes, Examples )
{
    const transition t1{ { 1, 0 }, { 1 } }, t0{ { 1, 0 }, { 0 } };
    EXPECT_TRUE( realizes( rule{ head1, { a1 } }, t1 ) );
    EXPECT_FALSE( realizes( rule{ head1, { a1 } }, t0 ) );
    EXPECT_FALSE( realizes( rule{ head1, { a0 } }, t1 ) );
}

TEST( IsConsistent, Examples )
{
    const std::vector< transition > single{ { { 1 }, { 1 } } };
    EXPECT_TRUE( is_consistent( rule{ head1, { a1 } }, single ) );

    const std::vector< transition > wrong{ { { 1 }, { 0 } } };
    EXPECT_FALSE( is_consistent( rule{ head1, { a1 } }, wrong ) );

    const std::vector< transition > both{ { { 0 }, { 0 } }, { { 1 }, { 1 } } };
    EXPECT_FALSE( is_consistent( rule{ head1 }, both ) );
    EXPECT_EQ( is_consistent( rule{ head1 }, both ), test::consistent_by_definition( rule{ head1 }, both ) );
}

TEST( IsConsistent, NondeterministicStateCarriesEitherValue )
{
    const std::vector< transition > ts{ { { 1 }, { 0 } }, { { 1 }, { 1 } } };
    EXPECT_TRUE( is_consistent( rule{ head1 }, ts ) );
    EXPECT_TRUE( is_consistent( rule{ head0 }, ts ) );
}

TEST( WeightRules, CountsMatchedTransitions )
{
    const auto schema = boolean_schema( 1 );
    const std::vector< transition > ts{ { { 1 }, { 1 } }, { { 0 }, { 0 } } };
    auto w = weight_rules( program{ schema, { rule{ head1, { a1 } } } }, ts );
    EXPECT_EQ( w.rules()[ 0 ].weight(), 1u );

    const std::vector< transition > five( 5, transition{ { 0 }, { 0 } } );
    EXPECT_EQ( weight_rules( program{ schema, { rule{ head0 } } }, five ).rules()[ 0 ].weight(), 5u );
    EXPECT_EQ( weight_rules( program{ schema, { rule{ head0, { a1 } } } }, five ).rules()[ 0 ].weight(), 0u );
}

TEST( Program, ValidatesAgainstSchema )
{
    const auto schema = boolean_schema();
    EXPECT_THROW( ( program{ schema, { rule{ { 0, 2 } } } } ), schema_error );
    EXPECT_THROW( ( program{ schema, { rule{ head1, { { 5, 0 } } } } } ), schema_error );
    EXPECT_THROW( ( program{ schema, { rule{ head1 }, rule{ head1, {}, 4 } } } ), schema_error );
}

TEST( Program, CanonicalOrder )
{
    const auto schema = boolean_schema();
    program p{ schema, { rule{ head1, { b0 } }, rule{ head1, { a1 } }, rule{ head0, { a0 } } } };
    ASSERT_EQ( p.size(), 3u );
    EXPECT_EQ( p.rules()[ 0 ], ( rule{ head0, { a0 } } ) );
    EXPECT_EQ( p.rules()[ 1 ], ( rule{ head1, { a1 } } ) );
    EXPECT_EQ( p.rules()[ 2 ], ( rule{ head1, { b0 } } ) );
    EXPECT_TRUE( p.contains( rule{ head1, { b0 } } ) );
    EXPECT_FALSE( p.contains( rule{ head1, { b1 } } ) );
}

TEST( Transition, ValidateRejectsOutOfDomain )
{
    const auto schema = listing_schema();
    EXPECT_NO_THROW( validate( schema, transition{ { 1, 5, 3 }, { 3 } } ) );
    EXPECT_THROW( validate( schema, transition{ { 1, 6, 3 }, { 3 } } ), schema_error );
    EXPECT_THROW( validate( schema, transition{ { 1, 5 }, { 3 } } ), schema_error );
    EXPECT_THROW( validate( schema, transition{ { 1, 5, 3 }, { 4 } } ), schema_error );
}

// Properties over random rules and states.

class MvlProperties : public ::testing::TestWithParam< std::uint64_t >
{
};

TEST_P( MvlProperties, DominationIsAPartialOrder )
{
    rng gen{ GetParam() };
    const auto in = test::random_instance( gen );
    for ( int i = 0; i < 200; ++i )
    {
        const auto r1 = test::random_rule( gen, in.schema );
        const auto r2 = test::random_rule( gen, in.schema );
        const auto r3 = test::random_rule( gen, in.schema );
        EXPECT_TRUE( dominates( r1, r1 ) );
        if ( dominates( r1, r2 ) && dominates( r2, r1 ) )
            EXPECT_EQ( r1, r2 );
        if ( dominates( r1, r2 ) && dominates( r2, r3 ) )
            EXPECT_TRUE( dominates( r1, r3 ) );
        // Dropping conditions gives a dominating rule.
        if ( !r2.body().empty() )
            EXPECT_TRUE( dominates( r2.without_condition( gen.below( r2.body().size() ) ), r2 ) );
    }
}

TEST_P( MvlProperties, DominationImpliesMatching )
{
    rng gen{ GetParam() };
    const auto in = test::random_instance( gen );
    for ( int i = 0; i < 200; ++i )
    {
        const auto r2 = test::random_rule( gen, in.schema, 0.7 );
        auto r1 = r2;
        while ( !r1.body().empty() && gen.below( 2 ) == 0 )
            r1 = r1.without_condition( gen.below( r1.body().size() ) );
        ASSERT_TRUE( dominates( r1, r2 ) );
        for ( int k = 0; k < 20; ++k )
        {
            const auto s = test::random_state( gen, in.schema );
            if ( matches( r2, s ) )
                EXPECT_TRUE( matches( r1, s ) );
        }
    }
}

TEST_P( MvlProperties, MatchingIgnoresUnmentionedVariables )
{
    rng gen{ GetParam() };
    const auto in = test::random_instance( gen );
    for ( int i = 0; i < 200; ++i )
    {
        const auto r = test::random_rule( gen, in.schema );
        auto s = test::random_state( gen, in.schema );
        const bool before = matches( r, s );
        for ( var_t v = 0; v < s.size(); ++v )
            if ( !r.condition_on( v ) )
            {
                const auto& d = in.schema.feature( v ).domain;
                s[ v ] = d[ gen.below( d.size() ) ];
            }
        EXPECT_EQ( matches( r, s ), before );
    }
}

TEST_P( MvlProperties, IsConsistentAgreesWithDefinition )
{
    rng gen{ GetParam() };
    const auto in = test::random_instance( gen );
    for ( int i = 0; i < 100; ++i )
    {
        const auto r = test::random_rule( gen, in.schema, 0.4 );
        EXPECT_EQ( is_consistent( r, in.rows ), test::consistent_by_definition( r, in.rows ) );
    }
}

TEST_P( MvlProperties, WeightRulesOnlyChangesWeights )
{
    rng gen{ GetParam() };
    const auto in = test::random_instance( gen );
    std::vector< rule > rules;
    for ( int i = 0; i < 30; ++i )
    {
        auto r = test::random_rule( gen, in.schema );
        if ( std::ranges::find( rules, r ) == rules.end() )
            rules.push_back( r );
    }
    const program p{ in.schema, rules };
    const auto w = weight_rules( p, in.rows );
    EXPECT_EQ( w, p );
    for ( const auto& r : w.rules() )
    {
        std::uint64_t n = 0;
        for ( const auto& t : in.rows )
            n += matches( r, t.features ) ? 1 : 0;
        EXPECT_EQ( r.weight(), n );
    }
}

INSTANTIATE_TEST_SUITE_P( Seeds, MvlProperties, ::testing::Range< std::uint64_t >( 1, 26 ) );
