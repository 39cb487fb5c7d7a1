#include "lfit/pipeline.hpp"

namespace lfit::pipeline
{

scenario_run run_scenario( const faircv::dataset& d, const faircv::scenario& sc, faircv::bias_mode bias,
                           const blackbox::model_config& model_cfg, const learner_config& learner_cfg )
{
    const auto data = faircv::build_scenario( d, sc, bias );
    auto model = blackbox::train( data, model_cfg );
    model.metadata = { { "scenario", sc.name() },
                       { "study", std::string{ faircv::to_string( sc.demographic ) } },
                       { "bias", std::string{ faircv::to_string( bias ) } } };

    std::vector< state > states;
    states.reserve( data.rows.size() );
    for ( const auto& t : data.rows )
        states.push_back( t.features );
    transition_table twin{ data.schema, blackbox::extract_transitions( model, states ) };
    auto learned = pride( twin.rows, twin.schema, learner_cfg );
    return scenario_run{ sc, bias, std::move( model ), std::move( twin ), std::move( learned ) };
}

faircv::bias_mode biased_mode( faircv::study s )
{
    return s == faircv::study::gender ? faircv::bias_mode::gender : faircv::bias_mode::ethnicity;
}

paired_run run_pair( const faircv::dataset& d, const faircv::scenario& sc, const blackbox::model_config& model_cfg,
                     const learner_config& learner_cfg )
{
    auto unbiased = run_scenario( d, sc, faircv::bias_mode::unbiased, model_cfg, learner_cfg );
    auto biased = run_scenario( d, sc, biased_mode( sc.demographic ), model_cfg, learner_cfg );
    auto report = audit::audit_pair( unbiased.learned, biased.learned, sc.name(),
                                     { { "scenario", sc.name() },
                                       { "study", std::string{ faircv::to_string( sc.demographic ) } },
                                       { "bias", std::string{ faircv::to_string( biased.bias ) } } } );
    return paired_run{ std::move( unbiased ), std::move( biased ), std::move( report ) };
}

} // namespace lfit::pipeline
