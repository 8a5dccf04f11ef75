#pragma once

#include <optional>

#include "genlink/entity.hpp"
#include "genlink/rule.hpp"
#include "genlink/values.hpp"

namespace genlink {

// Transformation functions (closed inventory).
ValueSet transform_lower_case(const ValueSet& in);
ValueSet transform_tokenize(const ValueSet& in);
ValueSet transform_strip_uri_prefix(const ValueSet& in);
ValueSet transform_concatenate(const ValueSet& a, const ValueSet& b);

/// Levenshtein edit distance between two strings.
std::size_t levenshtein(const std::string& a, const std::string& b);

/// Great-circle distance in meters between two "lat lon" points in degrees.
double haversine_meters(double lat1, double lon1, double lat2, double lon2);

// Typed value parsers. Return false on values that do not carry the syntax.
bool parse_numeric(const std::string& s, double& out);
bool parse_geo_point(const std::string& s, double& lat, double& lon);
bool parse_iso_date(const std::string& s, long& days_since_epoch);

/// Distance of a measure over two value sets. Character, numeric, temporal and
/// spatial measures take the minimum over the cross product; jaccard operates
/// on the whole sets. nullopt when no comparable pair exists.
std::optional<double> distance(Measure measure, const ValueSet& a, const ValueSet& b);

/// Evaluates a value operator for one entity.
ValueSet eval_value(const ValueNode& op, const Entity& e);

/// Score of one comparison: 1 - d/theta if d <= theta else 0. A missing
/// distance scores 0; theta = 0 means exact match.
double eval_comparison(const ComparisonNode& cmp, const Entity& a, const Entity& b);

double eval_aggregation(const AggregationNode& agg, const Entity& a, const Entity& b);

double eval_similarity(const SimilarityNode& node, const Entity& a, const Entity& b);

double eval_rule(const LinkageRule& rule, const Entity& a, const Entity& b);

/// Pairs scoring at least 0.5 are matches.
bool is_match(const LinkageRule& rule, const Entity& a, const Entity& b);

}  // namespace genlink
