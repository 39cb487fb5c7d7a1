#pragma once

// The classifier being explained: a one-hidden-layer network (sigmoid hidden
// units, softmax output) over one-hot encoded categorical features, trained
// with mini-batch SGD on cross-entropy.

#include "lfit/mvl.hpp"
#include "lfit/program_io.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lfit::blackbox
{

class divergence_error : public error
{
public:
    using error::error;
};

struct model_config
{
    std::size_t hidden_units = 32;
    double learning_rate = 0.5;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;

    // Throws lfit::error unless the hyperparameters are positive (epochs may be 0).
    void validate() const;

    friend bool operator==( const model_config&, const model_config& ) = default;
};

// One-hot layout of the feature variables of a schema with exactly one target.
class encoding
{
    variable_schema _schema;
    std::vector< std::size_t > _offsets; // first input unit of each feature

public:
    encoding() = default;
    // Throws schema_error unless the schema has exactly one target variable.
    explicit encoding( variable_schema schema );

    [[nodiscard]] const variable_schema& schema() const { return _schema; }
    [[nodiscard]] std::size_t inputs() const;
    [[nodiscard]] std::size_t classes() const { return _schema.target( 0 ).domain.size(); }

    // Indices of the hot input units. Throws schema_error on a mismatched state.
    [[nodiscard]] std::vector< std::size_t > active( const state& features ) const;
    [[nodiscard]] std::size_t class_index( value_t target_value ) const;
    [[nodiscard]] value_t class_value( std::size_t index ) const { return _schema.target( 0 ).domain.at( index ); }
};

// Row-major weight matrices: w1[h * inputs + i], w2[k * hidden + h].
struct parameters
{
    std::size_t inputs = 0;
    std::size_t hidden = 0;
    std::size_t outputs = 0;
    std::vector< double > w1, b1, w2, b2;

    parameters() = default;
    parameters( std::size_t inputs, std::size_t hidden, std::size_t outputs );

    // Xavier-uniform weights, zero biases.
    static parameters initialize( std::size_t inputs, std::size_t hidden, std::size_t outputs, std::uint64_t seed );

    friend bool operator==( const parameters&, const parameters& ) = default;
};

struct sample
{
    std::vector< std::size_t > active;
    std::size_t label = 0;
};

struct activations
{
    std::vector< double > hidden;
    std::vector< double > probabilities;
};

[[nodiscard]] std::vector< double > softmax( std::span< const double > logits );
[[nodiscard]] activations forward( const parameters& p, std::span< const std::size_t > active );

// Mean cross-entropy over the batch.
[[nodiscard]] double loss( const parameters& p, std::span< const sample > batch );
// Mean cross-entropy and its gradient; `grad` is resized to match `p`.
double loss_and_gradient( const parameters& p, std::span< const sample > batch, parameters& grad );

struct trained_model
{
    model_config config;
    encoding enc;
    parameters params;
    double train_accuracy = 0;
    // Free-form labels (scenario, study, bias) carried in checkpoints.
    std::map< std::string, std::string > metadata;
};

// Throws lfit::error on an empty training set and divergence_error when the
// loss stops being finite.
[[nodiscard]] trained_model train( const transition_table& data, const model_config& cfg );

// Argmax of the softmax, ties to the lower class.
[[nodiscard]] value_t predict( const trained_model& m, const state& features );

// Fraction of rows whose target the model predicts.
[[nodiscard]] double accuracy( const trained_model& m, std::span< const transition > rows );

// One transition per input state, labelled with the model's prediction.
[[nodiscard]] std::vector< transition > extract_transitions( const trained_model& m, std::span< const state > states );

// JSON checkpoint; layout documented in docs/formats.md.
[[nodiscard]] std::string save_checkpoint( const trained_model& m );
// Throws parse_error on malformed or incompatible checkpoints.
[[nodiscard]] trained_model load_checkpoint( std::string_view text );

} // namespace lfit::blackbox
