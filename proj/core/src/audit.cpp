#include "lfit/audit.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <limits>

namespace lfit::audit
{

namespace
{

std::optional< double > ratio( double num, double den )
{
    if ( den == 0 )
        return std::nullopt;
    return num / den;
}

std::string fixed6( std::optional< double > x )
{
    if ( !x )
        return {};
    char buf[ 64 ];
    auto [ ptr, ec ] = std::to_chars( buf, buf + sizeof buf, *x, std::chars_format::fixed, 6 );
    return { buf, ptr };
}

nlohmann::json opt_json( std::optional< double > x )
{
    return x ? nlohmann::json( *x ) : nlohmann::json( nullptr );
}

std::optional< double > opt_from( const nlohmann::json& j )
{
    if ( j.is_null() )
        return std::nullopt;
    return j.get< double >();
}

} // namespace

std::size_t partial_weight( const program& p, const atom& head, const atom& body_atom )
{
    return static_cast< std::size_t >( std::ranges::count_if(
        p.rules(), [ & ]( const rule& r ) { return r.head() == head && r.has_condition( body_atom ); } ) );
}

double partial_weight_length_weighted( const program& p, const atom& head, const atom& body_atom )
{
    double total = 0;
    for ( const auto& r : p.rules() )
        if ( r.head() == head && r.has_condition( body_atom ) )
            total += 1.0 / static_cast< double >( r.body().size() );
    return total;
}

double global_weight( const program& p, const atom& body_atom, bool length_weighted )
{
    if ( p.schema().targets().empty() )
        return 0;
    double total = 0;
    for ( value_t v : p.schema().target( 0 ).domain )
    {
        const atom head{ 0, v };
        const double pw = length_weighted ? partial_weight_length_weighted( p, head, body_atom )
                                          : static_cast< double >( partial_weight( p, head, body_atom ) );
        total += pw * v;
    }
    return total;
}

std::size_t attribute_frequency( const program& p, var_t feature )
{
    return static_cast< std::size_t >(
        std::ranges::count_if( p.rules(), [ & ]( const rule& r ) { return r.condition_on( feature ).has_value(); } ) );
}

std::size_t atom_frequency( const program& p, const atom& body_atom )
{
    return static_cast< std::size_t >(
        std::ranges::count_if( p.rules(), [ & ]( const rule& r ) { return r.has_condition( body_atom ); } ) );
}

double normalized_percentage( const program& p, var_t feature )
{
    std::size_t total = 0;
    for ( const auto& r : p.rules() )
        total += r.body().size();
    if ( total == 0 )
        throw error{ "normalized percentage is undefined for a program without body atoms" };
    return static_cast< double >( attribute_frequency( p, feature ) ) / static_cast< double >( total );
}

std::optional< double > absolute_increment( const program& biased, const program& unbiased, var_t feature )
{
    const auto base = static_cast< double >( attribute_frequency( unbiased, feature ) );
    if ( base == 0 )
        return std::nullopt;
    return ( static_cast< double >( attribute_frequency( biased, feature ) ) - base ) / base;
}

const attribute_row* pair_report::attribute( std::string_view name ) const
{
    const auto it = std::ranges::find( attributes, name, &attribute_row::name );
    return it == attributes.end() ? nullptr : &*it;
}

const atom_row* pair_report::find_atom( std::string_view attribute_name, value_t value ) const
{
    const auto it = std::ranges::find_if(
        atoms, [ & ]( const atom_row& a ) { return a.attribute == attribute_name && a.value == value; } );
    return it == atoms.end() ? nullptr : &*it;
}

std::optional< std::string > pair_report::top_attribute( std::span< const std::string > exclude ) const
{
    std::optional< std::string > best;
    double best_score = -std::numeric_limits< double >::infinity();
    for ( const auto& a : attributes )
    {
        if ( std::ranges::find( exclude, a.name ) != exclude.end() )
            continue;
        double score = 0;
        if ( a.aip )
            score = *a.aip;
        else if ( a.freq_biased > 0 )
            score = std::numeric_limits< double >::infinity();
        else
            continue;
        if ( !best || score > best_score )
        {
            best = a.name;
            best_score = score;
        }
    }
    return best;
}

pair_report audit_pair( const program& unbiased, const program& biased, std::string id,
                        std::map< std::string, std::string > metadata, const audit_options& options )
{
    if ( !( unbiased.schema() == biased.schema() ) )
        throw schema_error{ "paired programs must share a schema" };
    const auto& schema = unbiased.schema();
    if ( schema.targets().size() != 1 )
        throw schema_error{ "the audit expects a single target variable" };

    pair_report report;
    report.id = std::move( id );
    report.metadata = std::move( metadata );
    report.length_weighted = options.length_weighted;
    report.target_values = schema.target( 0 ).domain;

    auto total_atoms = []( const program& p ) {
        std::size_t n = 0;
        for ( const auto& r : p.rules() )
            n += r.body().size();
        return n;
    };
    const auto total_u = static_cast< double >( total_atoms( unbiased ) );
    const auto total_b = static_cast< double >( total_atoms( biased ) );

    for ( var_t f = 0; f < schema.features().size(); ++f )
    {
        const auto& decl = schema.feature( f );
        attribute_row row;
        row.name = decl.name;
        row.freq_unbiased = attribute_frequency( unbiased, f );
        row.freq_biased = attribute_frequency( biased, f );
        row.np_unbiased = ratio( static_cast< double >( row.freq_unbiased ), total_u );
        row.np_biased = ratio( static_cast< double >( row.freq_biased ), total_b );
        row.aip = absolute_increment( biased, unbiased, f );
        report.attributes.push_back( row );

        std::vector< atom_row > atoms;
        double gw_total_u = 0, gw_total_b = 0;
        for ( value_t v : decl.domain )
        {
            const atom body{ f, v };
            atom_row a;
            a.attribute = decl.name;
            a.value = v;
            for ( value_t t : report.target_values )
            {
                a.pw_unbiased.push_back( partial_weight( unbiased, atom{ 0, t }, body ) );
                a.pw_biased.push_back( partial_weight( biased, atom{ 0, t }, body ) );
            }
            a.gw_unbiased = global_weight( unbiased, body, options.length_weighted );
            a.gw_biased = global_weight( biased, body, options.length_weighted );
            a.occurrences_unbiased = atom_frequency( unbiased, body );
            a.occurrences_biased = atom_frequency( biased, body );
            gw_total_u += a.gw_unbiased;
            gw_total_b += a.gw_biased;
            atoms.push_back( std::move( a ) );
        }
        for ( auto& a : atoms )
        {
            a.gw_share_unbiased = ratio( a.gw_unbiased, gw_total_u );
            a.gw_share_biased = ratio( a.gw_biased, gw_total_b );
            a.occurrence_share_unbiased = ratio( static_cast< double >( a.occurrences_unbiased ),
                                                 static_cast< double >( row.freq_unbiased ) );
            a.occurrence_share_biased =
                ratio( static_cast< double >( a.occurrences_biased ), static_cast< double >( row.freq_biased ) );
            report.atoms.push_back( std::move( a ) );
        }
    }
    return report;
}

audit_report audit( const std::map< std::string, program >& programs, std::span< const run_pair > pairing,
                    const audit_options& options )
{
    audit_report report;
    for ( const auto& pr : pairing )
    {
        const auto u = programs.find( pr.unbiased );
        const auto b = programs.find( pr.biased );
        if ( u == programs.end() || b == programs.end() )
            throw error{ "unknown run in pairing: " + ( u == programs.end() ? pr.unbiased : pr.biased ) };
        report.pairs.push_back( audit_pair( u->second, b->second, pr.biased,
                                            { { "unbiased", pr.unbiased }, { "biased", pr.biased } }, options ) );
    }
    return report;
}

std::string to_json( const audit_report& r )
{
    using nlohmann::json;
    json pairs = json::array();
    for ( const auto& p : r.pairs )
    {
        json attrs = json::array();
        for ( const auto& a : p.attributes )
            attrs.push_back( { { "name", a.name },
                               { "freq_unbiased", a.freq_unbiased },
                               { "freq_biased", a.freq_biased },
                               { "np_unbiased", opt_json( a.np_unbiased ) },
                               { "np_biased", opt_json( a.np_biased ) },
                               { "aip", opt_json( a.aip ) } } );
        json atoms = json::array();
        for ( const auto& a : p.atoms )
            atoms.push_back( { { "attribute", a.attribute },
                               { "value", a.value },
                               { "pw_unbiased", a.pw_unbiased },
                               { "pw_biased", a.pw_biased },
                               { "gw_unbiased", a.gw_unbiased },
                               { "gw_biased", a.gw_biased },
                               { "gw_share_unbiased", opt_json( a.gw_share_unbiased ) },
                               { "gw_share_biased", opt_json( a.gw_share_biased ) },
                               { "occurrences_unbiased", a.occurrences_unbiased },
                               { "occurrences_biased", a.occurrences_biased },
                               { "occurrence_share_unbiased", opt_json( a.occurrence_share_unbiased ) },
                               { "occurrence_share_biased", opt_json( a.occurrence_share_biased ) } } );
        const auto top = p.top_attribute();
        pairs.push_back( { { "id", p.id },
                           { "metadata", p.metadata },
                           { "length_weighted", p.length_weighted },
                           { "target_values", p.target_values },
                           { "attributes", attrs },
                           { "atoms", atoms },
                           { "top_attribute", top ? json( *top ) : json( nullptr ) } } );
    }
    json j{ { "format", "lfit-audit" }, { "version", audit_report::version }, { "pairs", pairs } };
    return j.dump( 1 ) + "\n";
}

audit_report from_json( std::string_view text )
{
    using nlohmann::json;
    try
    {
        const json j = json::parse( text );
        if ( j.at( "format" ).get< std::string >() != "lfit-audit" )
            throw parse_error{ "not an audit report", 1, 1 };
        if ( j.at( "version" ).get< int >() != audit_report::version )
            throw parse_error{ "unsupported audit report version " + j.at( "version" ).dump(), 1, 1 };
        audit_report r;
        for ( const auto& jp : j.at( "pairs" ) )
        {
            pair_report p;
            p.id = jp.at( "id" ).get< std::string >();
            p.metadata = jp.at( "metadata" ).get< std::map< std::string, std::string > >();
            p.length_weighted = jp.at( "length_weighted" ).get< bool >();
            p.target_values = jp.at( "target_values" ).get< std::vector< value_t > >();
            for ( const auto& ja : jp.at( "attributes" ) )
            {
                attribute_row a;
                a.name = ja.at( "name" ).get< std::string >();
                a.freq_unbiased = ja.at( "freq_unbiased" ).get< std::size_t >();
                a.freq_biased = ja.at( "freq_biased" ).get< std::size_t >();
                a.np_unbiased = opt_from( ja.at( "np_unbiased" ) );
                a.np_biased = opt_from( ja.at( "np_biased" ) );
                a.aip = opt_from( ja.at( "aip" ) );
                p.attributes.push_back( std::move( a ) );
            }
            for ( const auto& ja : jp.at( "atoms" ) )
            {
                atom_row a;
                a.attribute = ja.at( "attribute" ).get< std::string >();
                a.value = ja.at( "value" ).get< value_t >();
                a.pw_unbiased = ja.at( "pw_unbiased" ).get< std::vector< std::size_t > >();
                a.pw_biased = ja.at( "pw_biased" ).get< std::vector< std::size_t > >();
                a.gw_unbiased = ja.at( "gw_unbiased" ).get< double >();
                a.gw_biased = ja.at( "gw_biased" ).get< double >();
                a.gw_share_unbiased = opt_from( ja.at( "gw_share_unbiased" ) );
                a.gw_share_biased = opt_from( ja.at( "gw_share_biased" ) );
                a.occurrences_unbiased = ja.at( "occurrences_unbiased" ).get< std::size_t >();
                a.occurrences_biased = ja.at( "occurrences_biased" ).get< std::size_t >();
                a.occurrence_share_unbiased = opt_from( ja.at( "occurrence_share_unbiased" ) );
                a.occurrence_share_biased = opt_from( ja.at( "occurrence_share_biased" ) );
                p.atoms.push_back( std::move( a ) );
            }
            r.pairs.push_back( std::move( p ) );
        }
        return r;
    }
    catch ( const json::parse_error& e )
    {
        throw parse_error{ std::string{ "malformed audit report: " } + e.what(), 1, e.byte };
    }
    catch ( const json::exception& e )
    {
        throw parse_error{ std::string{ "invalid audit report: " } + e.what(), 1, 1 };
    }
}

std::string to_csv( const audit_report& r )
{
    std::string out = "pair,attribute,value,metric,unbiased,biased\n";
    auto line = [ &out ]( const std::string& pair, const std::string& attr, const std::string& value,
                          const std::string& metric, const std::string& u, const std::string& b ) {
        out += pair + ',' + attr + ',' + value + ',' + metric + ',' + u + ',' + b + '\n';
    };
    for ( const auto& p : r.pairs )
    {
        for ( const auto& a : p.attributes )
        {
            line( p.id, a.name, "", "freq", std::to_string( a.freq_unbiased ), std::to_string( a.freq_biased ) );
            line( p.id, a.name, "", "np", fixed6( a.np_unbiased ), fixed6( a.np_biased ) );
            line( p.id, a.name, "", "aip", "", fixed6( a.aip ) );
        }
        for ( const auto& a : p.atoms )
        {
            const auto v = std::to_string( a.value );
            for ( std::size_t t = 0; t < p.target_values.size(); ++t )
                line( p.id, a.attribute, v, "pw_" + std::to_string( p.target_values[ t ] ),
                      std::to_string( a.pw_unbiased[ t ] ), std::to_string( a.pw_biased[ t ] ) );
            line( p.id, a.attribute, v, "gw", fixed6( a.gw_unbiased ), fixed6( a.gw_biased ) );
            line( p.id, a.attribute, v, "gw_share", fixed6( a.gw_share_unbiased ), fixed6( a.gw_share_biased ) );
            line( p.id, a.attribute, v, "occurrence_share", fixed6( a.occurrence_share_unbiased ),
                  fixed6( a.occurrence_share_biased ) );
        }
    }
    return out;
}

} // namespace lfit::audit
