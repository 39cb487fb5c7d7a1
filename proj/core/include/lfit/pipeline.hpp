#pragma once

// The explanation pipeline for one scenario: train the classifier on the
// scenario view of a dataset, relabel every record with the classifier's
// prediction, and learn a program from those relabelled transitions.

#include "lfit/audit.hpp"
#include "lfit/blackbox.hpp"
#include "lfit/faircv.hpp"
#include "lfit/pride.hpp"

namespace lfit::pipeline
{

struct scenario_run
{
    faircv::scenario sc;
    faircv::bias_mode bias;
    blackbox::trained_model model;
    transition_table twin; // classifier-labelled transitions, one per record
    program learned;
};

[[nodiscard]] scenario_run run_scenario( const faircv::dataset& d, const faircv::scenario& sc, faircv::bias_mode bias,
                                         const blackbox::model_config& model_cfg = {},
                                         const learner_config& learner_cfg = {} );

// The biased mode that matches a study: gender bias for the gender study,
// ethnicity bias for the ethnicity study.
[[nodiscard]] faircv::bias_mode biased_mode( faircv::study s );

// Runs the unbiased and biased scores of one scenario and audits the pair.
struct paired_run
{
    scenario_run unbiased;
    scenario_run biased;
    audit::pair_report report;
};

[[nodiscard]] paired_run run_pair( const faircv::dataset& d, const faircv::scenario& sc,
                                   const blackbox::model_config& model_cfg = {},
                                   const learner_config& learner_cfg = {} );

} // namespace lfit::pipeline
