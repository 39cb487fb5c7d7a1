#include "lfit/faircv.hpp"

#include "lfit/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <numeric>

namespace lfit::faircv
{

namespace
{

constexpr std::size_t chunk_size = 1024;
constexpr std::size_t i3 = 2; // zero-based merit positions
constexpr std::size_t i7 = 6;

std::vector< value_t > range_domain( value_t hi )
{
    std::vector< value_t > d( static_cast< std::size_t >( hi ) + 1 );
    std::iota( d.begin(), d.end(), 0 );
    return d;
}

// Merit on the unit interval: the value divided by the domain maximum.
double merit_level( value_t v, const std::vector< value_t >& domain )
{
    return domain.back() == 0 ? 0.0 : static_cast< double >( v ) / static_cast< double >( domain.back() );
}

void generate_chunk( const gen_config& cfg, std::size_t chunk, std::span< cv_record > out )
{
    rng gen{ derive_seed( cfg.seed, chunk ) };
    for ( auto& r : out )
    {
        r.gender = static_cast< value_t >( gen.below( 2 ) );
        r.ethnicity = static_cast< value_t >( gen.below( 3 ) );
        for ( std::size_t k = 0; k < merit_count; ++k )
        {
            const auto& dom = cfg.merit_domains[ k ];
            r.merits[ k ] = dom[ gen.below( dom.size() ) ];
        }
        // Drawn unconditionally so the stream stays aligned across configs.
        for ( std::size_t k : { i3, i7 } )
        {
            const double u = gen.unit();
            const bool high = gen.below( 2 ) == 1;
            if ( cfg.gender_correlated_merits && r.gender == 0 && u < cfg.correlation )
            {
                const auto& dom = cfg.merit_domains[ k ];
                r.merits[ k ] = high ? dom.back() : dom.front();
            }
        }

        double merit_sum = 0;
        for ( std::size_t k = 0; k < merit_count; ++k )
            merit_sum += cfg.alphas[ k ] * merit_level( r.merits[ k ], cfg.merit_domains[ k ] );
        r.raw_unbiased = merit_sum;
        r.raw_gender = cfg.beta_gender[ static_cast< std::size_t >( r.gender ) ] + merit_sum;
        r.raw_ethnicity = cfg.beta_ethnicity[ static_cast< std::size_t >( r.ethnicity ) ] + merit_sum;
    }
}

void check_edges( const edges_t& edges )
{
    for ( std::size_t i = 0; i < edges.size(); ++i )
    {
        if ( !std::isfinite( edges[ i ] ) )
            throw error{ "score edges must be finite" };
        if ( i > 0 && !( edges[ i - 1 ] < edges[ i ] ) )
            throw error{ "score edges must be strictly increasing" };
    }
}

void append_real( std::string& out, double x )
{
    char buf[ 64 ];
    auto [ ptr, ec ] = std::to_chars( buf, buf + sizeof buf, x, std::chars_format::fixed, 6 );
    out.append( buf, ptr );
}

const std::array< std::string_view, 3 > score_columns{ "score_u", "score_g", "score_e" };
const std::array< std::string_view, 3 > raw_columns{ "raw_u", "raw_g", "raw_e" };

std::vector< std::string > dataset_header( bool raw )
{
    std::vector< std::string > h{ "g", "e" };
    for ( std::size_t k = 1; k <= merit_count; ++k )
        h.push_back( "i" + std::to_string( k ) );
    for ( auto c : score_columns )
        h.emplace_back( c );
    if ( raw )
        for ( auto c : raw_columns )
            h.emplace_back( c );
    return h;
}

} // namespace

std::string_view to_string( bias_mode b )
{
    switch ( b )
    {
    case bias_mode::unbiased: return "none";
    case bias_mode::gender: return "gender";
    case bias_mode::ethnicity: return "ethnicity";
    }
    return "?";
}

std::string_view to_string( study s )
{
    return s == study::gender ? "gender" : "ethnicity";
}

std::optional< bias_mode > parse_bias_mode( std::string_view s )
{
    if ( s == "none" || s == "unbiased" )
        return bias_mode::unbiased;
    if ( s == "gender" )
        return bias_mode::gender;
    if ( s == "ethnicity" )
        return bias_mode::ethnicity;
    return std::nullopt;
}

std::optional< study > parse_study( std::string_view s )
{
    if ( s == "gender" )
        return study::gender;
    if ( s == "ethnicity" )
        return study::ethnicity;
    return std::nullopt;
}

std::array< double, merit_count > default_alphas()
{
    constexpr std::array< double, merit_count > primes{ 2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37 };
    std::array< double, merit_count > a{};
    double total = 0;
    for ( std::size_t k = 0; k < merit_count; ++k )
        total += a[ k ] = std::sqrt( primes[ k ] );
    for ( auto& x : a )
        x /= total;
    return a;
}

std::array< double, merit_count > uniform_alphas()
{
    std::array< double, merit_count > a{};
    a.fill( 1.0 / merit_count );
    return a;
}

merit_domains_t default_merit_domains()
{
    merit_domains_t d;
    for ( std::size_t k = 0; k < merit_count; ++k )
        d[ k ] = range_domain( k < 2 ? 5 : 4 );
    return d;
}

void gen_config::validate() const
{
    if ( n_records == 0 )
        throw error{ "n_records must be positive" };
    double sum = 0;
    for ( double a : alphas )
    {
        if ( !std::isfinite( a ) || a < 0 )
            throw error{ "merit weights must be finite and non-negative" };
        sum += a;
    }
    if ( std::abs( sum - 1.0 ) > 1e-9 )
        throw error{ "merit weights must sum to 1" };
    if ( !( correlation >= 0 && correlation <= 1 ) )
        throw error{ "correlation must lie in [0, 1]" };
    for ( const auto& dom : merit_domains )
        if ( dom.empty() || !std::ranges::is_sorted( dom ) || dom.front() < 0 )
            throw error{ "merit domains must be non-empty, sorted and non-negative" };
    if ( quantile_edges )
        check_edges( *quantile_edges );
    if ( workers == 0 )
        throw error{ "workers must be positive" };
}

double cv_record::raw( bias_mode b ) const
{
    switch ( b )
    {
    case bias_mode::unbiased: return raw_unbiased;
    case bias_mode::gender: return raw_gender;
    case bias_mode::ethnicity: return raw_ethnicity;
    }
    return raw_unbiased;
}

value_t cv_record::score( bias_mode b ) const
{
    switch ( b )
    {
    case bias_mode::unbiased: return score_unbiased;
    case bias_mode::gender: return score_gender;
    case bias_mode::ethnicity: return score_ethnicity;
    }
    return score_unbiased;
}

dataset generate( const gen_config& cfg )
{
    cfg.validate();
    dataset d;
    d.merit_domains = cfg.merit_domains;
    d.records.resize( cfg.n_records );

    const std::size_t chunks = ( cfg.n_records + chunk_size - 1 ) / chunk_size;
    auto run = [ & ]( std::size_t first_chunk, std::size_t stride ) {
        for ( std::size_t c = first_chunk; c < chunks; c += stride )
        {
            const std::size_t begin = c * chunk_size;
            const std::size_t len = std::min( chunk_size, cfg.n_records - begin );
            generate_chunk( cfg, c, std::span{ d.records }.subspan( begin, len ) );
        }
    };
    if ( cfg.workers <= 1 || chunks <= 1 )
        run( 0, 1 );
    else
    {
        std::vector< std::future< void > > jobs;
        const std::size_t n = std::min( cfg.workers, chunks );
        for ( std::size_t w = 0; w < n; ++w )
            jobs.push_back( std::async( std::launch::async, run, w, n ) );
        for ( auto& j : jobs )
            j.get();
    }

    const edges_t edges = cfg.quantile_edges ? *cfg.quantile_edges : unbiased_quartiles( d.records );
    return discretize_scores( std::move( d ), edges );
}

edges_t unbiased_quartiles( std::span< const cv_record > records )
{
    if ( records.empty() )
        throw error{ "cannot compute quartiles of an empty sample" };
    std::vector< double > raw;
    raw.reserve( records.size() );
    for ( const auto& r : records )
        raw.push_back( r.raw_unbiased );
    std::ranges::sort( raw );
    edges_t edges{};
    for ( std::size_t q = 1; q <= edges.size(); ++q )
    {
        const double h = static_cast< double >( raw.size() - 1 ) * static_cast< double >( q ) / 4.0;
        const auto lo = static_cast< std::size_t >( std::floor( h ) );
        const auto hi = std::min( lo + 1, raw.size() - 1 );
        edges[ q - 1 ] = raw[ lo ] + ( h - static_cast< double >( lo ) ) * ( raw[ hi ] - raw[ lo ] );
    }
    return edges;
}

value_t discretize( double raw, const edges_t& edges )
{
    return static_cast< value_t >( std::ranges::count_if( edges, [ raw ]( double e ) { return e < raw; } ) );
}

dataset discretize_scores( dataset d, const edges_t& edges )
{
    check_edges( edges );
    d.edges = edges;
    for ( auto& r : d.records )
    {
        r.score_unbiased = discretize( r.raw_unbiased, edges );
        r.score_gender = discretize( r.raw_gender, edges );
        r.score_ethnicity = discretize( r.raw_ethnicity, edges );
    }
    return d;
}

scenario::scenario( int id_, study demographic_ ) : id{ id_ }, demographic{ demographic_ }
{
    if ( id < 1 || id > scenario_count )
        throw error{ "unknown scenario s" + std::to_string( id ) + " (expected s1..s11)" };
}

scenario scenario::parse( std::string_view name, study demographic )
{
    int id = 0;
    if ( name.size() < 2 || name.front() != 's' )
        throw error{ "unknown scenario '" + std::string{ name } + "' (expected s1..s11)" };
    auto [ ptr, ec ] = std::from_chars( name.data() + 1, name.data() + name.size(), id );
    if ( ec != std::errc{} || ptr != name.data() + name.size() )
        throw error{ "unknown scenario '" + std::string{ name } + "' (expected s1..s11)" };
    return scenario{ id, demographic };
}

std::vector< std::size_t > scenario::merits() const
{
    std::vector< std::size_t > m( static_cast< std::size_t >( id ) + 1 );
    std::iota( m.begin(), m.end(), 1 );
    return m;
}

variable_schema scenario_schema( const scenario& sc, const merit_domains_t& domains )
{
    std::vector< variable_decl > features;
    if ( sc.demographic == study::gender )
        features.push_back( { "g", { 0, 1 } } );
    else
        features.push_back( { "e", { 0, 1, 2 } } );
    for ( std::size_t k : sc.merits() )
        features.push_back( { "i" + std::to_string( k ), domains[ k - 1 ] } );
    return variable_schema{ std::move( features ), { { "scores", { 0, 1, 2, 3 } } } };
}

state scenario_features( const cv_record& r, const scenario& sc )
{
    state s;
    s.reserve( static_cast< std::size_t >( sc.id ) + 2 );
    s.push_back( sc.demographic == study::gender ? r.gender : r.ethnicity );
    for ( std::size_t k : sc.merits() )
        s.push_back( r.merits[ k - 1 ] );
    return s;
}

transition_table build_scenario( const dataset& d, const scenario& sc, bias_mode bias )
{
    transition_table table{ scenario_schema( sc, d.merit_domains ), {} };
    table.rows.reserve( d.records.size() );
    for ( const auto& r : d.records )
        table.rows.push_back( transition{ scenario_features( r, sc ), { r.score( bias ) } } );
    return table;
}

std::string write_dataset_csv( const dataset& d, bool raw_columns_flag )
{
    if ( raw_columns_flag && !d.has_raw )
        throw error{ "dataset carries no raw scores" };
    std::string out;
    const auto header = dataset_header( raw_columns_flag );
    for ( std::size_t i = 0; i < header.size(); ++i )
    {
        if ( i > 0 )
            out += ',';
        out += header[ i ];
    }
    out += '\n';
    for ( const auto& r : d.records )
    {
        out += std::to_string( r.gender );
        out += ',';
        out += std::to_string( r.ethnicity );
        for ( value_t m : r.merits )
        {
            out += ',';
            out += std::to_string( m );
        }
        for ( value_t s : { r.score_unbiased, r.score_gender, r.score_ethnicity } )
        {
            out += ',';
            out += std::to_string( s );
        }
        if ( raw_columns_flag )
            for ( double x : { r.raw_unbiased, r.raw_gender, r.raw_ethnicity } )
            {
                out += ',';
                append_real( out, x );
            }
        out += '\n';
    }
    return out;
}

dataset read_dataset_csv( std::string_view text, const merit_domains_t& domains )
{
    dataset d;
    d.merit_domains = domains;
    bool header_seen = false;
    std::size_t columns = 0;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while ( start < text.size() )
    {
        auto nl = text.find( '\n', start );
        if ( nl == std::string_view::npos )
            nl = text.size();
        std::string_view line = text.substr( start, nl - start );
        start = nl + 1;
        ++line_no;
        if ( !line.empty() && line.back() == '\r' )
            line.remove_suffix( 1 );
        if ( line.empty() )
            continue;

        std::vector< std::string_view > fields;
        for ( std::size_t pos = 0;; )
        {
            const auto comma = line.find( ',', pos );
            fields.push_back( line.substr( pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos ) );
            if ( comma == std::string_view::npos )
                break;
            pos = comma + 1;
        }

        if ( !header_seen )
        {
            for ( bool raw : { false, true } )
            {
                const auto expected = dataset_header( raw );
                if ( std::ranges::equal( fields, expected ) )
                {
                    header_seen = true;
                    d.has_raw = raw;
                    columns = expected.size();
                }
            }
            if ( !header_seen )
                throw parse_error{ "unexpected dataset header", line_no, 1 };
            continue;
        }
        if ( fields.size() != columns )
            throw parse_error{ "expected " + std::to_string( columns ) + " fields, found " + std::to_string( fields.size() ),
                               line_no, 1 };

        std::size_t column = 1;
        auto integer = [ & ]( std::size_t i ) {
            value_t v = 0;
            const auto f = fields[ i ];
            auto [ ptr, ec ] = std::from_chars( f.data(), f.data() + f.size(), v );
            if ( ec != std::errc{} || ptr != f.data() + f.size() || f.empty() )
                throw parse_error{ "expected an integer, found '" + std::string{ f } + "'", line_no, column };
            return v;
        };
        auto real = [ & ]( std::size_t i ) {
            double v = 0;
            const auto f = fields[ i ];
            auto [ ptr, ec ] = std::from_chars( f.data(), f.data() + f.size(), v );
            if ( ec != std::errc{} || ptr != f.data() + f.size() || f.empty() )
                throw parse_error{ "expected a real number, found '" + std::string{ f } + "'", line_no, column };
            return v;
        };
        auto check = [ & ]( bool ok, const std::string& what ) {
            if ( !ok )
                throw parse_error{ what, line_no, column };
        };

        cv_record r;
        std::size_t i = 0;
        r.gender = integer( i );
        check( r.gender == 0 || r.gender == 1, "gender must be 0 or 1" );
        column += fields[ i++ ].size() + 1;
        r.ethnicity = integer( i );
        check( r.ethnicity >= 0 && r.ethnicity <= 2, "ethnicity must be 0, 1 or 2" );
        column += fields[ i++ ].size() + 1;
        for ( std::size_t k = 0; k < merit_count; ++k )
        {
            r.merits[ k ] = integer( i );
            check( std::ranges::binary_search( domains[ k ], r.merits[ k ] ),
                   "i" + std::to_string( k + 1 ) + " outside its domain" );
            column += fields[ i++ ].size() + 1;
        }
        for ( value_t* s : { &r.score_unbiased, &r.score_gender, &r.score_ethnicity } )
        {
            *s = integer( i );
            check( *s >= 0 && *s < static_cast< value_t >( score_classes ), "score must lie in 0..3" );
            column += fields[ i++ ].size() + 1;
        }
        if ( d.has_raw )
            for ( double* x : { &r.raw_unbiased, &r.raw_gender, &r.raw_ethnicity } )
            {
                *x = real( i );
                column += fields[ i++ ].size() + 1;
            }
        d.records.push_back( r );
    }
    if ( !header_seen )
        throw parse_error{ "missing dataset header", line_no + 1, 1 };
    return d;
}

} // namespace lfit::faircv
