#include "lfit/program_io.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace lfit;

namespace
{

class Cli : public ::testing::Test
{
protected:
    fs::path dir;

    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / ( std::string{ "lfit_cli_" } + info->name() );
        fs::remove_all( dir );
        fs::create_directories( dir );
    }
    void TearDown() override { fs::remove_all( dir ); }

    std::string path( const std::string& name ) const { return ( dir / name ).string(); }

    int run( const std::string& args, const std::string& env = "" ) const
    {
        const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" LFIT_CLI_PATH "' " + args + " >stdout.txt 2>stderr.txt";
        const int rc = std::system( cmd.c_str() );
        return WIFEXITED( rc ) ? WEXITSTATUS( rc ) : -1;
    }

    std::string slurp( const std::string& name ) const
    {
        std::ifstream in( dir / name, std::ios::binary );
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void put( const std::string& name, const std::string& text ) const
    {
        std::ofstream( dir / name, std::ios::binary ) << text;
    }
};

const char* and_golden = "@feature a {0,1}\n@feature b {0,1}\n@target y {0,1}\n\n"
                         "y(0) :- a(0).  %% w=2\n"
                         "y(0) :- b(0).  %% w=2\n"
                         "y(1) :- a(1), b(1).  %% w=1\n";

} // namespace

TEST_F( Cli, LearnAndToy )
{
    put( "and.csv", write_transitions_csv( test::boolean_schema(), test::truth_table( []( value_t a, value_t b ) { return a & b; } ) ) );
    ASSERT_EQ( run( "learn --transitions and.csv --out and.lp" ), 0 ) << slurp( "stderr.txt" );
    EXPECT_EQ( slurp( "and.lp" ), and_golden );
    EXPECT_TRUE( fs::exists( dir / "and.lp.config.toml" ) );

    // Schema-less CSV with the schema supplied separately.
    put( "plain.csv", "a,b,y\n0,0,0\n0,1,0\n1,0,0\n1,1,1\n" );
    put( "schema.lp", "@feature a {0,1}\n@feature b {0,1}\n@target y {0,1}\n" );
    ASSERT_EQ( run( "learn --transitions plain.csv --schema schema.lp --parallel --out and2.lp" ), 0 );
    EXPECT_EQ( slurp( "and2.lp" ), and_golden );
}

TEST_F( Cli, FullPipelineNamesGender )
{
    ASSERT_EQ( run( "generate --n 2000 --seed 1 --bias gender --out data.csv" ), 0 ) << slurp( "stderr.txt" );
    for ( std::string b : { "none", "gender" } )
    {
        ASSERT_EQ( run( "train --dataset data.csv --scenario s11 --study gender --bias " + b + " --out m_" + b + ".json" ), 0 )
            << slurp( "stderr.txt" );
        ASSERT_EQ( run( "extract --model m_" + b + ".json --dataset data.csv --out t_" + b + ".csv" ), 0 )
            << slurp( "stderr.txt" );
        ASSERT_EQ( run( "learn --transitions t_" + b + ".csv --out p_" + b + ".lp" ), 0 ) << slurp( "stderr.txt" );
    }
    ASSERT_EQ( run( "audit --pair p_none.lp p_gender.lp --out report.json" ), 0 ) << slurp( "stderr.txt" );
    ASSERT_EQ( run( "report --report report.json --exclude i3 --exclude i7 --out report.csv" ), 0 ) << slurp( "stderr.txt" );
    EXPECT_NE( slurp( "stdout.txt" ).find( "top AIP attribute: g\n" ), std::string::npos ) << slurp( "stdout.txt" );
    EXPECT_TRUE( slurp( "report.csv" ).starts_with( "pair,attribute,value,metric,unbiased,biased\n" ) );

    // Rerunning a stage reproduces its artifact byte for byte.
    const auto model = slurp( "m_gender.json" );
    ASSERT_EQ( run( "train --dataset data.csv --scenario s11 --study gender --bias gender --out again.json" ), 0 );
    EXPECT_EQ( slurp( "again.json" ), model );
}

TEST_F( Cli, ConfigFileAndEnvironment )
{
    put( "gen.toml", "[generate]\nn = 50\nseed = 4\n" );
    ASSERT_EQ( run( "--config gen.toml generate --out a.csv" ), 0 ) << slurp( "stderr.txt" );
    ASSERT_EQ( run( "generate --n 50 --seed 4 --out b.csv" ), 0 );
    EXPECT_EQ( slurp( "a.csv" ), slurp( "b.csv" ) );

    ASSERT_EQ( run( "--config gen.toml generate --seed 5 --out c.csv" ), 0 );
    EXPECT_NE( slurp( "c.csv" ), slurp( "a.csv" ) );
    EXPECT_NE( slurp( "c.csv.config.toml" ).find( "generate.seed=5" ), std::string::npos );

    ASSERT_EQ( run( "generate --n 50 --out d.csv", "LFIT_SEED=4" ), 0 );
    EXPECT_EQ( slurp( "d.csv" ), slurp( "a.csv" ) );

    // The resolved config replays the run.
    ASSERT_EQ( run( "--config a.csv.config.toml generate --out e.csv" ), 0 ) << slurp( "stderr.txt" );
    EXPECT_EQ( slurp( "e.csv" ), slurp( "a.csv" ) );
}

TEST_F( Cli, FailuresAreReportedWithoutPartialOutput )
{
    put( "bad.lp", "@feature a {0,1}\n@target y {0,1}\ny(1) :- a(7).\n" );
    put( "ok.lp", "@feature a {0,1}\n@target y {0,1}\ny(1) :- a(1).\n" );
    EXPECT_EQ( run( "audit --pair ok.lp bad.lp --out r.json" ), 1 );
    EXPECT_NE( slurp( "stderr.txt" ).find( "lfit audit:" ), std::string::npos );
    EXPECT_NE( slurp( "stderr.txt" ).find( "line 3" ), std::string::npos ) << slurp( "stderr.txt" );
    EXPECT_FALSE( fs::exists( dir / "r.json" ) );
    EXPECT_FALSE( fs::exists( dir / "r.json.tmp" ) );

    put( "model.json", "{\"format\": \"lfit-mlp\"}" );
    put( "data.csv", "nonsense\n" );
    EXPECT_EQ( run( "extract --model model.json --dataset data.csv --out t.csv" ), 1 );
    EXPECT_NE( slurp( "stderr.txt" ).find( "lfit extract:" ), std::string::npos );
    EXPECT_FALSE( fs::exists( dir / "t.csv" ) );

    EXPECT_NE( run( "train --dataset missing.csv --out m.json" ), 0 );
    EXPECT_NE( run( "generate --bias sideways --out x.csv" ), 0 );
    EXPECT_NE( run( "" ), 0 );
}
