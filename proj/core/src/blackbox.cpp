#include "lfit/blackbox.hpp"

#include "lfit/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lfit::blackbox
{

namespace
{

constexpr std::string_view checkpoint_format = "lfit-mlp";
constexpr int checkpoint_version = 1;

double sigmoid( double x )
{
    return 1.0 / ( 1.0 + std::exp( -x ) );
}

std::size_t argmax( std::span< const double > xs )
{
    std::size_t best = 0;
    for ( std::size_t i = 1; i < xs.size(); ++i )
        if ( xs[ i ] > xs[ best ] )
            best = i;
    return best;
}

std::vector< sample > encode_rows( const encoding& enc, std::span< const transition > rows )
{
    std::vector< sample > out;
    out.reserve( rows.size() );
    for ( const auto& t : rows )
        out.push_back( sample{ enc.active( t.features ), enc.class_index( t.targets.at( 0 ) ) } );
    return out;
}

} // namespace

void model_config::validate() const
{
    if ( hidden_units == 0 || batch_size == 0 )
        throw error{ "hidden_units and batch_size must be positive" };
    if ( !( learning_rate > 0 ) || !std::isfinite( learning_rate ) )
        throw error{ "learning_rate must be positive and finite" };
}

encoding::encoding( variable_schema schema ) : _schema{ std::move( schema ) }
{
    if ( _schema.targets().size() != 1 )
        throw schema_error{ "the classifier needs exactly one target variable" };
    std::size_t offset = 0;
    for ( const auto& f : _schema.features() )
    {
        _offsets.push_back( offset );
        offset += f.domain.size();
    }
    _offsets.push_back( offset );
}

std::size_t encoding::inputs() const
{
    return _offsets.empty() ? 0 : _offsets.back();
}

std::vector< std::size_t > encoding::active( const state& features ) const
{
    const auto vars = _schema.features();
    if ( features.size() != vars.size() )
        throw schema_error{ "state has " + std::to_string( features.size() ) + " features, model expects " +
                            std::to_string( vars.size() ) };
    std::vector< std::size_t > hot;
    hot.reserve( features.size() );
    for ( std::size_t v = 0; v < features.size(); ++v )
    {
        const auto& dom = vars[ v ].domain;
        const auto it = std::ranges::lower_bound( dom, features[ v ] );
        if ( it == dom.end() || *it != features[ v ] )
            throw schema_error{ "value " + std::to_string( features[ v ] ) + " outside the domain of '" +
                                vars[ v ].name + "'" };
        hot.push_back( _offsets[ v ] + static_cast< std::size_t >( it - dom.begin() ) );
    }
    return hot;
}

std::size_t encoding::class_index( value_t target_value ) const
{
    const auto& dom = _schema.target( 0 ).domain;
    const auto it = std::ranges::lower_bound( dom, target_value );
    if ( it == dom.end() || *it != target_value )
        throw schema_error{ "target value " + std::to_string( target_value ) + " outside the class domain" };
    return static_cast< std::size_t >( it - dom.begin() );
}

parameters::parameters( std::size_t inputs_, std::size_t hidden_, std::size_t outputs_ )
    : inputs{ inputs_ }, hidden{ hidden_ }, outputs{ outputs_ }, w1( hidden_ * inputs_ ), b1( hidden_ ),
      w2( outputs_ * hidden_ ), b2( outputs_ )
{
}

parameters parameters::initialize( std::size_t inputs, std::size_t hidden, std::size_t outputs, std::uint64_t seed )
{
    parameters p{ inputs, hidden, outputs };
    rng gen{ derive_seed( seed, 0 ) };
    const double r1 = std::sqrt( 6.0 / static_cast< double >( inputs + hidden ) );
    const double r2 = std::sqrt( 6.0 / static_cast< double >( hidden + outputs ) );
    for ( auto& w : p.w1 )
        w = gen.uniform( -r1, r1 );
    for ( auto& w : p.w2 )
        w = gen.uniform( -r2, r2 );
    return p;
}

std::vector< double > softmax( std::span< const double > logits )
{
    std::vector< double > out( logits.begin(), logits.end() );
    if ( out.empty() )
        return out;
    const double peak = *std::ranges::max_element( out );
    double total = 0;
    for ( auto& x : out )
        total += x = std::exp( x - peak );
    for ( auto& x : out )
        x /= total;
    return out;
}

activations forward( const parameters& p, std::span< const std::size_t > active )
{
    activations a;
    a.hidden.resize( p.hidden );
    for ( std::size_t h = 0; h < p.hidden; ++h )
    {
        double z = p.b1[ h ];
        const double* row = p.w1.data() + h * p.inputs;
        for ( std::size_t i : active )
            z += row[ i ];
        a.hidden[ h ] = sigmoid( z );
    }
    std::vector< double > logits( p.outputs );
    for ( std::size_t k = 0; k < p.outputs; ++k )
    {
        double z = p.b2[ k ];
        const double* row = p.w2.data() + k * p.hidden;
        for ( std::size_t h = 0; h < p.hidden; ++h )
            z += row[ h ] * a.hidden[ h ];
        logits[ k ] = z;
    }
    a.probabilities = softmax( logits );
    return a;
}

double loss( const parameters& p, std::span< const sample > batch )
{
    double total = 0;
    for ( const auto& s : batch )
        total -= std::log( forward( p, s.active ).probabilities.at( s.label ) );
    return batch.empty() ? 0.0 : total / static_cast< double >( batch.size() );
}

double loss_and_gradient( const parameters& p, std::span< const sample > batch, parameters& grad )
{
    if ( grad.inputs != p.inputs || grad.hidden != p.hidden || grad.outputs != p.outputs )
        grad = parameters{ p.inputs, p.hidden, p.outputs };
    else
        for ( auto* v : { &grad.w1, &grad.b1, &grad.w2, &grad.b2 } )
            std::ranges::fill( *v, 0.0 );
    if ( batch.empty() )
        return 0.0;

    const double scale = 1.0 / static_cast< double >( batch.size() );
    std::vector< double > delta_out( p.outputs );
    std::vector< double > delta_hidden( p.hidden );
    double total = 0;
    for ( const auto& s : batch )
    {
        const auto a = forward( p, s.active );
        total -= std::log( a.probabilities[ s.label ] );

        for ( std::size_t k = 0; k < p.outputs; ++k )
            delta_out[ k ] = ( a.probabilities[ k ] - ( k == s.label ? 1.0 : 0.0 ) ) * scale;

        std::ranges::fill( delta_hidden, 0.0 );
        for ( std::size_t k = 0; k < p.outputs; ++k )
        {
            const double* row = p.w2.data() + k * p.hidden;
            double* grow = grad.w2.data() + k * p.hidden;
            for ( std::size_t h = 0; h < p.hidden; ++h )
            {
                grow[ h ] += delta_out[ k ] * a.hidden[ h ];
                delta_hidden[ h ] += delta_out[ k ] * row[ h ];
            }
            grad.b2[ k ] += delta_out[ k ];
        }
        for ( std::size_t h = 0; h < p.hidden; ++h )
        {
            const double d = delta_hidden[ h ] * a.hidden[ h ] * ( 1.0 - a.hidden[ h ] );
            grad.b1[ h ] += d;
            double* grow = grad.w1.data() + h * p.inputs;
            for ( std::size_t i : s.active )
                grow[ i ] += d;
        }
    }
    return total * scale;
}

trained_model train( const transition_table& data, const model_config& cfg )
{
    cfg.validate();
    if ( data.rows.empty() )
        throw error{ "cannot train on an empty data set" };

    trained_model m;
    m.config = cfg;
    m.enc = encoding{ data.schema };
    m.params = parameters::initialize( m.enc.inputs(), cfg.hidden_units, m.enc.classes(), cfg.seed );

    const auto samples = encode_rows( m.enc, data.rows );
    std::vector< std::size_t > order( samples.size() );
    std::iota( order.begin(), order.end(), 0 );
    rng shuffler{ derive_seed( cfg.seed, 1 ) };

    parameters grad;
    std::vector< sample > batch;
    batch.reserve( cfg.batch_size );
    for ( std::size_t epoch = 0; epoch < cfg.epochs; ++epoch )
    {
        for ( std::size_t i = order.size(); i > 1; --i )
            std::swap( order[ i - 1 ], order[ shuffler.below( i ) ] );

        for ( std::size_t start = 0; start < order.size(); start += cfg.batch_size )
        {
            batch.clear();
            for ( std::size_t j = start; j < std::min( start + cfg.batch_size, order.size() ); ++j )
                batch.push_back( samples[ order[ j ] ] );
            const double l = loss_and_gradient( m.params, batch, grad );
            if ( !std::isfinite( l ) )
                throw divergence_error{ "training diverged at epoch " + std::to_string( epoch ) + ", batch " +
                                        std::to_string( start / cfg.batch_size ) + " (loss " + std::to_string( l ) +
                                        ", learning rate " + std::to_string( cfg.learning_rate ) + ")" };
            for ( auto [ param, g ] : { std::pair{ &m.params.w1, &grad.w1 }, std::pair{ &m.params.b1, &grad.b1 },
                                        std::pair{ &m.params.w2, &grad.w2 }, std::pair{ &m.params.b2, &grad.b2 } } )
                for ( std::size_t k = 0; k < param->size(); ++k )
                    ( *param )[ k ] -= cfg.learning_rate * ( *g )[ k ];
        }
    }

    m.train_accuracy = accuracy( m, data.rows );
    return m;
}

value_t predict( const trained_model& m, const state& features )
{
    const auto a = forward( m.params, m.enc.active( features ) );
    return m.enc.class_value( argmax( a.probabilities ) );
}

double accuracy( const trained_model& m, std::span< const transition > rows )
{
    if ( rows.empty() )
        return 0.0;
    std::size_t hits = 0;
    for ( const auto& t : rows )
        hits += predict( m, t.features ) == t.targets.at( 0 ) ? 1 : 0;
    return static_cast< double >( hits ) / static_cast< double >( rows.size() );
}

std::vector< transition > extract_transitions( const trained_model& m, std::span< const state > states )
{
    std::vector< transition > out;
    out.reserve( states.size() );
    for ( const auto& s : states )
        out.push_back( transition{ s, { predict( m, s ) } } );
    return out;
}

std::string save_checkpoint( const trained_model& m )
{
    using nlohmann::json;
    json j;
    j[ "format" ] = checkpoint_format;
    j[ "version" ] = checkpoint_version;
    j[ "config" ] = { { "hidden_units", m.config.hidden_units },
                      { "learning_rate", m.config.learning_rate },
                      { "epochs", m.config.epochs },
                      { "batch_size", m.config.batch_size },
                      { "seed", m.config.seed } };
    j[ "schema" ] = serialize_schema( m.enc.schema() );
    j[ "train_accuracy" ] = m.train_accuracy;
    j[ "metadata" ] = m.metadata;
    j[ "parameters" ] = { { "inputs", m.params.inputs }, { "hidden", m.params.hidden }, { "outputs", m.params.outputs },
                          { "w1", m.params.w1 },         { "b1", m.params.b1 },         { "w2", m.params.w2 },
                          { "b2", m.params.b2 } };
    return j.dump( 1 ) + "\n";
}

trained_model load_checkpoint( std::string_view text )
{
    using nlohmann::json;
    json j;
    try
    {
        j = json::parse( text );
    }
    catch ( const json::parse_error& e )
    {
        throw parse_error{ std::string{ "malformed checkpoint: " } + e.what(), 1, e.byte };
    }
    try
    {
        if ( j.at( "format" ).get< std::string >() != checkpoint_format )
            throw parse_error{ "not a classifier checkpoint", 1, 1 };
        if ( j.at( "version" ).get< int >() != checkpoint_version )
            throw parse_error{ "unsupported checkpoint version " + j.at( "version" ).dump(), 1, 1 };

        trained_model m;
        const auto& c = j.at( "config" );
        m.config.hidden_units = c.at( "hidden_units" ).get< std::size_t >();
        m.config.learning_rate = c.at( "learning_rate" ).get< double >();
        m.config.epochs = c.at( "epochs" ).get< std::size_t >();
        m.config.batch_size = c.at( "batch_size" ).get< std::size_t >();
        m.config.seed = c.at( "seed" ).get< std::uint64_t >();
        m.enc = encoding{ parse_program( j.at( "schema" ).get< std::string >() ).schema() };
        m.train_accuracy = j.at( "train_accuracy" ).get< double >();
        m.metadata = j.value( "metadata", std::map< std::string, std::string >{} );

        const auto& p = j.at( "parameters" );
        m.params = parameters{ p.at( "inputs" ).get< std::size_t >(), p.at( "hidden" ).get< std::size_t >(),
                               p.at( "outputs" ).get< std::size_t >() };
        m.params.w1 = p.at( "w1" ).get< std::vector< double > >();
        m.params.b1 = p.at( "b1" ).get< std::vector< double > >();
        m.params.w2 = p.at( "w2" ).get< std::vector< double > >();
        m.params.b2 = p.at( "b2" ).get< std::vector< double > >();
        const auto& q = m.params;
        if ( q.inputs != m.enc.inputs() || q.outputs != m.enc.classes() || q.w1.size() != q.hidden * q.inputs ||
             q.b1.size() != q.hidden || q.w2.size() != q.outputs * q.hidden || q.b2.size() != q.outputs )
            throw parse_error{ "checkpoint weight shapes do not match its encoding", 1, 1 };
        return m;
    }
    catch ( const json::exception& e )
    {
        throw parse_error{ std::string{ "invalid checkpoint: " } + e.what(), 1, 1 };
    }
    catch ( const schema_error& e )
    {
        throw parse_error{ std::string{ "invalid checkpoint schema: " } + e.what(), 1, 1 };
    }
}

} // namespace lfit::blackbox
