#pragma once

// Rule-frequency bias metrics over learned programs.
//
//   PW(body atom, head atom)  rules with that head whose body contains the atom
//   GW(body atom)             sum over target values v of v * PW(body atom, v)
//   freq(attribute)           body occurrences of the attribute over all rules
//   NP(attribute)             freq divided by the total over all attributes
//   AIP(biased, unbiased)     (freq_biased - freq_unbiased) / freq_unbiased
//
// All metrics count rules uniformly and ignore rule weights. GW assumes the
// program has a single target variable.

#include "lfit/mvl.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lfit::audit
{

[[nodiscard]] std::size_t partial_weight( const program& p, const atom& head, const atom& body_atom );
// Variant where each rule counts 1/|body|.
[[nodiscard]] double partial_weight_length_weighted( const program& p, const atom& head, const atom& body_atom );

[[nodiscard]] double global_weight( const program& p, const atom& body_atom, bool length_weighted = false );

[[nodiscard]] std::size_t attribute_frequency( const program& p, var_t feature );
// Occurrences of one body atom over all rules.
[[nodiscard]] std::size_t atom_frequency( const program& p, const atom& body_atom );

// Throws lfit::error when the program has no body atoms at all.
[[nodiscard]] double normalized_percentage( const program& p, var_t feature );

// nullopt when the unbiased frequency is zero.
[[nodiscard]] std::optional< double > absolute_increment( const program& biased, const program& unbiased,
                                                          var_t feature );

struct attribute_row
{
    std::string name;
    std::size_t freq_unbiased = 0;
    std::size_t freq_biased = 0;
    std::optional< double > np_unbiased;
    std::optional< double > np_biased;
    std::optional< double > aip;
};

struct atom_row
{
    std::string attribute;
    value_t value = 0;
    std::vector< std::size_t > pw_unbiased; // indexed like the target domain
    std::vector< std::size_t > pw_biased;
    double gw_unbiased = 0;
    double gw_biased = 0;
    // Shares within the attribute; nullopt when the attribute total is zero.
    std::optional< double > gw_share_unbiased;
    std::optional< double > gw_share_biased;
    std::size_t occurrences_unbiased = 0;
    std::size_t occurrences_biased = 0;
    std::optional< double > occurrence_share_unbiased;
    std::optional< double > occurrence_share_biased;
};

struct pair_report
{
    std::string id;
    std::map< std::string, std::string > metadata;
    std::vector< value_t > target_values;
    std::vector< attribute_row > attributes;
    std::vector< atom_row > atoms;
    bool length_weighted = false;

    [[nodiscard]] const attribute_row* attribute( std::string_view name ) const;
    [[nodiscard]] const atom_row* find_atom( std::string_view attribute, value_t value ) const;

    // Attribute with the largest AIP, skipping `exclude`. An undefined AIP with
    // a positive biased frequency ranks above every defined value; ties go to
    // the earlier attribute.
    [[nodiscard]] std::optional< std::string > top_attribute( std::span< const std::string > exclude = {} ) const;
};

struct audit_report
{
    static constexpr int version = 1;
    std::vector< pair_report > pairs;
};

struct audit_options
{
    bool length_weighted = false;
};

// Throws schema_error when the two programs do not share a schema.
[[nodiscard]] pair_report audit_pair( const program& unbiased, const program& biased, std::string id = {},
                                      std::map< std::string, std::string > metadata = {},
                                      const audit_options& options = {} );

struct run_pair
{
    std::string unbiased;
    std::string biased;
};

// Throws lfit::error for unknown run ids.
[[nodiscard]] audit_report audit( const std::map< std::string, program >& programs, std::span< const run_pair > pairing,
                                  const audit_options& options = {} );

[[nodiscard]] std::string to_json( const audit_report& r );
// Throws parse_error.
[[nodiscard]] audit_report from_json( std::string_view text );
// Long format: pair,attribute,value,metric,unbiased,biased.
[[nodiscard]] std::string to_csv( const audit_report& r );

} // namespace lfit::audit
