#include "lfit/oracle.hpp"
#include "lfit/program_io.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace lfit;
using test::boolean_schema;
using test::truth_table;

namespace
{

// Recursive body enumeration, unrelated to the oracle's mixed-radix loop.
void all_bodies( const variable_schema& schema, var_t v, std::vector< atom >& cur, std::vector< std::vector< atom > >& out )
{
    if ( v == schema.features().size() )
    {
        out.push_back( cur );
        return;
    }
    all_bodies( schema, v + 1, cur, out );
    for ( value_t x : schema.feature( v ).domain )
    {
        cur.push_back( { v, x } );
        all_bodies( schema, v + 1, cur, out );
        cur.pop_back();
    }
}

bool matches_positive( const rule& r, const std::vector< transition >& ts )
{
    return std::ranges::any_of( ts, [ & ]( const transition& t ) {
        return t.targets[ r.head().var ] == r.head().value &&
               std::ranges::all_of( r.body(), [ & ]( const atom& a ) { return t.features[ a.var ] == a.value; } );
    } );
}

// Consistent rules that match a positive.
std::vector< rule > accepted( const variable_schema& schema, const std::vector< transition >& ts )
{
    std::vector< std::vector< atom > > bodies;
    std::vector< atom > cur;
    all_bodies( schema, 0, cur, bodies );
    std::vector< rule > out;
    for ( var_t h = 0; h < schema.targets().size(); ++h )
        for ( value_t x : schema.target( h ).domain )
            for ( const auto& b : bodies )
            {
                rule r{ { h, x }, b };
                if ( test::consistent_by_definition( r, ts ) && matches_positive( r, ts ) )
                    out.push_back( r );
            }
    return out;
}

} // namespace

TEST( Oracle, AndTable )
{
    const auto p = optimal_program( truth_table( []( value_t a, value_t b ) { return a & b; } ), boolean_schema() );
    EXPECT_EQ( p, ( program{ boolean_schema(),
                             { rule{ { 0, 1 }, { { 0, 1 }, { 1, 1 } } }, rule{ { 0, 0 }, { { 0, 0 } } },
                               rule{ { 0, 0 }, { { 1, 0 } } } } } ) );
}

TEST( Oracle, ConstantTarget )
{
    const auto p = optimal_program( truth_table( []( value_t, value_t ) { return 1; } ), boolean_schema() );
    EXPECT_EQ( p, ( program{ boolean_schema(), { rule{ { 0, 1 } } } } ) );
}

TEST( Oracle, SingleTransitionGivesEmptyBodies )
{
    const variable_schema schema{ { { "a", { 0, 1 } }, { "b", { 0, 1, 2 } } }, { { "y", { 0, 1 } }, { "z", { 0, 1, 2 } } } };
    const std::vector< transition > ts{ { { 1, 2 }, { 0, 2 } } };
    EXPECT_EQ( optimal_program( ts, schema ), ( program{ schema, { rule{ { 0, 0 } }, rule{ { 1, 2 } } } } ) );
}

TEST( Oracle, RefusesLargeInstances )
{
    const variable_schema schema{ { { "a", test::range( 99 ) }, { "b", test::range( 99 ) } }, { { "y", { 0 } } } };
    const std::vector< transition > ts{ { { 0, 0 }, { 0 } } };
    EXPECT_THROW( (void)optimal_program( ts, schema, { 9'999 } ), oracle_refusal );
    EXPECT_NO_THROW( (void)optimal_program( ts, schema, { 10'000 } ) );
}

TEST( Oracle, OrAndXorTables )
{
    const auto schema = boolean_schema();
    const auto or_p = optimal_program( truth_table( []( value_t a, value_t b ) { return a | b; } ), schema );
    EXPECT_EQ( or_p, ( program{ schema,
                                { rule{ { 0, 0 }, { { 0, 0 }, { 1, 0 } } }, rule{ { 0, 1 }, { { 0, 1 } } },
                                  rule{ { 0, 1 }, { { 1, 1 } } } } } ) );
    const auto xor_p = optimal_program( truth_table( []( value_t a, value_t b ) { return a ^ b; } ), schema );
    EXPECT_EQ( xor_p.size(), 4u );
    for ( const auto& r : xor_p.rules() )
        EXPECT_EQ( r.body().size(), 2u );
}

class OracleProperties : public ::testing::TestWithParam< std::uint64_t >
{
};

TEST_P( OracleProperties, AgreesWithIndependentEnumeration )
{
    rng gen{ GetParam() };
    for ( int round = 0; round < 5; ++round )
    {
        const auto in = test::random_instance( gen );
        const auto opt = optimal_program( in.rows, in.schema );
        const auto acc = accepted( in.schema, in.rows );

        for ( const auto& r : opt.rules() )
        {
            EXPECT_NE( std::ranges::find( acc, r ), acc.end() ) << serialize_rule( in.schema, r );
            for ( const auto& s : opt.rules() )
                if ( !( s == r ) )
                    EXPECT_FALSE( dominates( s, r ) );
        }
        for ( const auto& r : acc )
        {
            EXPECT_TRUE( std::ranges::any_of( opt.rules(), [ & ]( const rule& o ) { return dominates( o, r ); } ) );
            const bool minimal = std::ranges::none_of( acc, [ & ]( const rule& o ) { return !( o == r ) && dominates( o, r ); } );
            EXPECT_EQ( minimal, opt.contains( r ) );
        }
    }
}

INSTANTIATE_TEST_SUITE_P( Seeds, OracleProperties, ::testing::Range< std::uint64_t >( 1, 21 ) );
