#pragma once

// Synthetic resume profiles with controllable demographic bias.
//
// Each record has a gender g (0 = male, 1 = female), an ethnic group e in
// {0,1,2}, twelve integer merits i1..i12 drawn uniformly and independently of
// the demographics, and three scores
//
//     raw = beta + sum_k alpha_k * i_k / max(dom(i_k))
//
// so that every merit contributes on the unit interval, with beta = 0
// (unbiased), beta = beta_gender[g] or beta = beta_ethnicity[e]. Group e = 0
// receives the largest ethnicity offset.
// Raw scores are discretised into four classes 0..3.

#include "lfit/mvl.hpp"
#include "lfit/program_io.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lfit::faircv
{

inline constexpr std::size_t merit_count = 12;
inline constexpr std::size_t score_classes = 4;

using edges_t = std::array< double, score_classes - 1 >;
using merit_domains_t = std::array< std::vector< value_t >, merit_count >;

enum class bias_mode : std::uint8_t
{
    unbiased,
    gender,
    ethnicity
};

enum class study : std::uint8_t
{
    gender,
    ethnicity
};

[[nodiscard]] std::string_view to_string( bias_mode b );
[[nodiscard]] std::string_view to_string( study s );
[[nodiscard]] std::optional< bias_mode > parse_bias_mode( std::string_view s ); // "none"/"unbiased", "gender", "ethnicity"
[[nodiscard]] std::optional< study > parse_study( std::string_view s );

// alpha_k proportional to the square root of the k-th prime. The weights are
// pairwise incommensurate, so raw scores rarely tie and quartile classes
// come out balanced.
[[nodiscard]] std::array< double, merit_count > default_alphas();
[[nodiscard]] std::array< double, merit_count > uniform_alphas();

// i1 (education) and i2 (experience) take 0..5, the others 0..4.
[[nodiscard]] merit_domains_t default_merit_domains();

struct gen_config
{
    std::size_t n_records = 24'000;
    std::array< double, merit_count > alphas = default_alphas();
    std::array< double, 2 > beta_gender{ 0.2, 0.0 };
    std::array< double, 3 > beta_ethnicity{ 0.30, 0.15, 0.0 };
    // Probability that a male record gets i3 and i7 redrawn from the extremes
    // of their domains. Only applied when gender_correlated_merits is set.
    double correlation = 0.3;
    bool gender_correlated_merits = false;
    std::uint64_t seed = 1;
    // Cut points for discretisation; defaults to the quartiles of the
    // unbiased raw scores of the generated sample.
    std::optional< edges_t > quantile_edges;
    merit_domains_t merit_domains = default_merit_domains();
    // Records are generated in fixed-size chunks with derived seeds, so the
    // output does not depend on the number of workers.
    std::size_t workers = 1;

    // Throws lfit::error.
    void validate() const;
};

struct cv_record
{
    value_t gender = 0;
    value_t ethnicity = 0;
    std::array< value_t, merit_count > merits{};
    double raw_unbiased = 0;
    double raw_gender = 0;
    double raw_ethnicity = 0;
    value_t score_unbiased = 0;
    value_t score_gender = 0;
    value_t score_ethnicity = 0;

    [[nodiscard]] double raw( bias_mode b ) const;
    [[nodiscard]] value_t score( bias_mode b ) const;

    friend bool operator==( const cv_record&, const cv_record& ) = default;
};

struct dataset
{
    std::vector< cv_record > records;
    edges_t edges{};
    merit_domains_t merit_domains = default_merit_domains();
    bool has_raw = true;
};

[[nodiscard]] dataset generate( const gen_config& cfg );

// Type-7 (linear interpolation) quartiles of the unbiased raw scores.
[[nodiscard]] edges_t unbiased_quartiles( std::span< const cv_record > records );

// Number of edges strictly below the raw score.
[[nodiscard]] value_t discretize( double raw, const edges_t& edges );

// Recomputes all three discrete scores. Throws lfit::error unless the edges
// are strictly increasing.
[[nodiscard]] dataset discretize_scores( dataset d, const edges_t& edges );

// Feature state = demographic attribute + merits i1..i{id+1}; target = scores.
struct scenario
{
    int id = 1;
    study demographic = study::gender;

    // Throws lfit::error for ids outside 1..11.
    scenario( int id, study demographic );
    // Parses "s1".."s11".
    static scenario parse( std::string_view name, study demographic );

    [[nodiscard]] std::string name() const { return "s" + std::to_string( id ); }
    // 1-based merit indices.
    [[nodiscard]] std::vector< std::size_t > merits() const;
};

inline constexpr int scenario_count = 11;

[[nodiscard]] variable_schema scenario_schema( const scenario& sc, const merit_domains_t& domains = default_merit_domains() );
[[nodiscard]] state scenario_features( const cv_record& r, const scenario& sc );

// One transition per record, duplicates kept.
[[nodiscard]] transition_table build_scenario( const dataset& d, const scenario& sc, bias_mode bias );

// Header g,e,i1..i12,score_u,score_g,score_e[,raw_u,raw_g,raw_e]; reals with six decimals.
[[nodiscard]] std::string write_dataset_csv( const dataset& d, bool raw_columns = false );
// Throws parse_error.
[[nodiscard]] dataset read_dataset_csv( std::string_view text, const merit_domains_t& domains = default_merit_domains() );

} // namespace lfit::faircv
