#include "lfit/audit.hpp"
#include "lfit/blackbox.hpp"
#include "lfit/error.hpp"
#include "lfit/faircv.hpp"
#include "lfit/pride.hpp"
#include "lfit/program_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace fs = std::filesystem;
using namespace lfit;

namespace
{

class stage_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

std::string read_file( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw stage_error{ "cannot open " + path };
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Temp file in the target directory, then rename.
void write_atomic( const std::string& path, std::string_view content )
{
    const fs::path target{ path };
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out( tmp, std::ios::binary | std::ios::trunc );
        if ( !out )
            throw stage_error{ "cannot write " + tmp.string() };
        out.write( content.data(), static_cast< std::streamsize >( content.size() ) );
        out.flush();
        if ( !out )
        {
            out.close();
            fs::remove( tmp );
            throw stage_error{ "cannot write " + tmp.string() };
        }
    }
    std::error_code ec;
    fs::rename( tmp, target, ec );
    if ( ec )
    {
        fs::remove( tmp );
        throw stage_error{ "cannot rename " + tmp.string() + " to " + path + ": " + ec.message() };
    }
}

// Every option can also come from LFIT_<NAME>, e.g. LFIT_SEED.
void add_env_names( CLI::App& sub )
{
    for ( CLI::Option* opt : sub.get_options() )
    {
        if ( opt->get_lnames().empty() || opt->get_lnames().front() == "help" )
            continue;
        std::string env = "LFIT_" + opt->get_lnames().front();
        std::ranges::transform( env, env.begin(), []( unsigned char c ) {
            return c == '-' ? '_' : static_cast< char >( std::toupper( c ) );
        } );
        opt->envname( env );
    }
}

void write_resolved_config( const CLI::App& app, const CLI::App& sub, const std::string& artifact )
{
    std::string text = "# resolved configuration for lfit " + sub.get_name() + "\n";
    const std::string prefix = sub.get_name() + ".";
    std::istringstream all{ app.config_to_str( true, false ) };
    for ( std::string line; std::getline( all, line ); )
        if ( line.starts_with( prefix ) && !line.ends_with( "=\"\"" ) )
            text += line + "\n";
    write_atomic( artifact + ".config.toml", text );
}

faircv::study study_of( const std::string& s )
{
    auto st = faircv::parse_study( s );
    if ( !st )
        throw stage_error{ "unknown study '" + s + "' (expected gender or ethnicity)" };
    return *st;
}

faircv::bias_mode bias_of( const std::string& s )
{
    auto b = faircv::parse_bias_mode( s );
    if ( !b )
        throw stage_error{ "unknown bias '" + s + "' (expected none, gender or ethnicity)" };
    return *b;
}

std::string format_share( const std::optional< double >& x )
{
    if ( !x )
        return "n/a";
    char buf[ 32 ];
    std::snprintf( buf, sizeof buf, "%.1f%%", 100.0 * *x );
    return buf;
}

struct generate_opts
{
    std::size_t n = 24'000;
    std::uint64_t seed = 1;
    std::string bias = "none";
    double correlation = 0.3;
    bool uniform_alphas = false;
    bool raw = false;
    std::size_t workers = 1;
    std::string out;
};

void cmd_generate( const generate_opts& o )
{
    faircv::gen_config cfg;
    cfg.n_records = o.n;
    cfg.seed = o.seed;
    cfg.correlation = o.correlation;
    cfg.workers = o.workers;
    if ( o.uniform_alphas )
        cfg.alphas = faircv::uniform_alphas();
    cfg.gender_correlated_merits = bias_of( o.bias ) == faircv::bias_mode::gender;
    const auto d = faircv::generate( cfg );
    write_atomic( o.out, faircv::write_dataset_csv( d, o.raw ) );
}

struct train_opts
{
    std::string dataset;
    std::string scenario = "s11";
    std::string study = "gender";
    std::string bias = "none";
    blackbox::model_config model;
    std::string out;
};

void cmd_train( const train_opts& o )
{
    const auto d = faircv::read_dataset_csv( read_file( o.dataset ) );
    const auto sc = faircv::scenario::parse( o.scenario, study_of( o.study ) );
    const auto bias = bias_of( o.bias );
    auto model = blackbox::train( faircv::build_scenario( d, sc, bias ), o.model );
    model.metadata = { { "scenario", sc.name() },
                       { "study", std::string{ faircv::to_string( sc.demographic ) } },
                       { "bias", std::string{ faircv::to_string( bias ) } } };
    write_atomic( o.out, blackbox::save_checkpoint( model ) );
}

struct extract_opts
{
    std::string model;
    std::string dataset;
    std::string out;
};

void cmd_extract( const extract_opts& o )
{
    const auto model = blackbox::load_checkpoint( read_file( o.model ) );
    const auto d = faircv::read_dataset_csv( read_file( o.dataset ) );
    auto field = [ & ]( const std::string& key ) {
        auto it = model.metadata.find( key );
        if ( it == model.metadata.end() )
            throw stage_error{ "model checkpoint has no '" + key + "' metadata" };
        return it->second;
    };
    const auto sc = faircv::scenario::parse( field( "scenario" ), study_of( field( "study" ) ) );
    if ( !( faircv::scenario_schema( sc, d.merit_domains ) == model.enc.schema() ) )
        throw stage_error{ "dataset does not match the model's scenario schema" };

    std::vector< state > states;
    states.reserve( d.records.size() );
    for ( const auto& r : d.records )
        states.push_back( faircv::scenario_features( r, sc ) );
    const auto rows = blackbox::extract_transitions( model, states );
    write_atomic( o.out, write_transitions_csv( model.enc.schema(), rows ) );
}

struct learn_opts
{
    std::string transitions;
    std::string schema;
    std::size_t targets = 1;
    bool parallel = false;
    std::string tie_break = "lowest";
    std::string out;
};

void cmd_learn( const learn_opts& o )
{
    csv_schema_options copt;
    copt.inferred_targets = o.targets;
    if ( !o.schema.empty() )
        copt.schema = parse_program( read_file( o.schema ) ).schema();
    const auto table = read_transitions_csv( read_file( o.transitions ), copt );
    learner_config cfg;
    cfg.parallel_targets = o.parallel;
    if ( o.tie_break == "highest" )
        cfg.order = tie_break::highest_first;
    else if ( o.tie_break != "lowest" )
        throw stage_error{ "unknown tie-break '" + o.tie_break + "' (expected lowest or highest)" };
    write_atomic( o.out, serialize_program( pride( table.rows, table.schema, cfg ) ) );
}

struct audit_opts
{
    std::vector< std::pair< std::string, std::string > > pairs;
    bool length_weighted = false;
    std::string out;
};

void cmd_audit( const audit_opts& o )
{
    audit::audit_report report;
    for ( const auto& [ u, b ] : o.pairs )
    {
        const auto pu = parse_program( read_file( u ) );
        const auto pb = parse_program( read_file( b ) );
        report.pairs.push_back( audit::audit_pair(
            pu, pb, fs::path{ b }.stem().string(),
            { { "unbiased", fs::path{ u }.filename().string() }, { "biased", fs::path{ b }.filename().string() } },
            { o.length_weighted } ) );
    }
    write_atomic( o.out, audit::to_json( report ) );
}

struct report_opts
{
    std::string report;
    std::vector< std::string > exclude;
    std::string out;
};

void cmd_report( const report_opts& o )
{
    const auto report = audit::from_json( read_file( o.report ) );
    write_atomic( o.out, audit::to_csv( report ) );

    for ( const auto& p : report.pairs )
    {
        std::cout << "pair " << p.id << "\n";
        const auto top = p.top_attribute( o.exclude );
        std::cout << "  top AIP attribute: " << top.value_or( "none" ) << "\n";
        if ( !top )
            continue;
        if ( const auto* a = p.attribute( *top ); a && a->aip )
            std::cout << "  AIP(" << *top << ") = " << *a->aip << "\n";
        for ( const auto& row : p.atoms )
            if ( row.attribute == *top )
                std::cout << "  " << row.attribute << "(" << row.value
                          << ") GW share: " << format_share( row.gw_share_unbiased ) << " -> "
                          << format_share( row.gw_share_biased ) << "\n";
    }
}

} // namespace

int main( int argc, char** argv )
{
    CLI::App app{ "Explain a classifier with learned logic rules and audit it for bias" };
    app.set_config( "--config", "", "TOML configuration file; command-line flags override it" );
    app.require_subcommand( 1 );

    generate_opts gen;
    auto* g = app.add_subcommand( "generate", "Generate a synthetic resume dataset (CSV)" );
    g->add_option( "--n", gen.n, "Number of records" )->capture_default_str()->check( CLI::PositiveNumber );
    g->add_option( "--seed", gen.seed, "Random seed" )->capture_default_str();
    g->add_option( "--bias", gen.bias, "Study: none, gender or ethnicity" )
        ->capture_default_str()
        ->check( CLI::IsMember( { "none", "gender", "ethnicity" } ) );
    g->add_option( "--correlation", gen.correlation, "Strength of the i3/i7 gender perturbation" )
        ->capture_default_str()
        ->check( CLI::Range( 0.0, 1.0 ) );
    g->add_flag( "--uniform-alphas", gen.uniform_alphas, "Weight all merits equally" );
    g->add_flag( "--raw", gen.raw, "Also write the real-valued scores" );
    g->add_option( "--workers", gen.workers, "Generator threads" )->capture_default_str()->check( CLI::PositiveNumber );
    g->add_option( "--out", gen.out, "Output CSV" )->required();

    train_opts tr;
    auto* t = app.add_subcommand( "train", "Train the classifier on one scenario" );
    t->add_option( "--dataset", tr.dataset, "Dataset CSV" )->required()->check( CLI::ExistingFile );
    t->add_option( "--scenario", tr.scenario, "Scenario s1..s11" )->capture_default_str();
    t->add_option( "--study", tr.study, "gender or ethnicity" )->capture_default_str();
    t->add_option( "--bias", tr.bias, "Score column: none, gender or ethnicity" )->capture_default_str();
    t->add_option( "--hidden", tr.model.hidden_units, "Hidden units" )->capture_default_str();
    t->add_option( "--learning-rate", tr.model.learning_rate, "SGD step size" )->capture_default_str();
    t->add_option( "--epochs", tr.model.epochs, "Training epochs" )->capture_default_str();
    t->add_option( "--batch-size", tr.model.batch_size, "Mini-batch size" )->capture_default_str();
    t->add_option( "--seed", tr.model.seed, "Initialisation and shuffling seed" )->capture_default_str();
    t->add_option( "--out", tr.out, "Output model checkpoint (JSON)" )->required();

    extract_opts ex;
    auto* e = app.add_subcommand( "extract", "Label every dataset record with the classifier" );
    e->add_option( "--model", ex.model, "Model checkpoint" )->required()->check( CLI::ExistingFile );
    e->add_option( "--dataset", ex.dataset, "Dataset CSV" )->required()->check( CLI::ExistingFile );
    e->add_option( "--out", ex.out, "Output transitions CSV" )->required();

    learn_opts le;
    auto* l = app.add_subcommand( "learn", "Learn a logic program from transitions" );
    l->add_option( "--transitions", le.transitions, "Transitions CSV" )->required()->check( CLI::ExistingFile );
    l->add_option( "--schema", le.schema, "Program file whose header declares the variables" )
        ->check( CLI::ExistingFile );
    l->add_option( "--targets", le.targets, "Trailing target columns when the schema is inferred" )
        ->capture_default_str();
    l->add_flag( "--parallel", le.parallel, "Learn target atoms concurrently" );
    l->add_option( "--tie-break", le.tie_break, "Specialisation order: lowest or highest" )->capture_default_str();
    l->add_option( "--out", le.out, "Output program" )->required();

    audit_opts au;
    auto* a = app.add_subcommand( "audit", "Compare unbiased and biased programs" );
    a->add_option( "--pair", au.pairs, "Unbiased and biased program files" )->required();
    a->add_flag( "--length-weighted", au.length_weighted, "Weight each rule by 1/|body|" );
    a->add_option( "--out", au.out, "Output report (JSON)" )->required();

    report_opts re;
    auto* r = app.add_subcommand( "report", "Tabulate an audit report and name the main driver" );
    r->add_option( "--report", re.report, "Audit report (JSON)" )->required()->check( CLI::ExistingFile );
    r->add_option( "--exclude", re.exclude, "Attributes left out of the ranking" );
    r->add_option( "--out", re.out, "Output CSV" )->required();

    for ( auto* sub : { g, t, e, l, a, r } )
        add_env_names( *sub );

    CLI11_PARSE( app, argc, argv );

    CLI::App* sub = app.get_subcommands().front();
    try
    {
        std::string artifact;
        if ( sub == g )
            cmd_generate( gen ), artifact = gen.out;
        else if ( sub == t )
            cmd_train( tr ), artifact = tr.out;
        else if ( sub == e )
            cmd_extract( ex ), artifact = ex.out;
        else if ( sub == l )
            cmd_learn( le ), artifact = le.out;
        else if ( sub == a )
            cmd_audit( au ), artifact = au.out;
        else
            cmd_report( re ), artifact = re.out;
        write_resolved_config( app, *sub, artifact );
    }
    catch ( const std::exception& ex_ )
    {
        std::cerr << "lfit " << sub->get_name() << ": " << ex_.what() << "\n";
        return 1;
    }
    return 0;
}
