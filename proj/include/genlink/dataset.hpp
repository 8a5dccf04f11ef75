#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "genlink/entity.hpp"

namespace genlink {

enum class EntityFormat { Csv, NTriples };

/// Deterministic 64-bit generator used everywhere randomness appears.
using Rng = std::mt19937_64;

/// Raised on unreadable or malformed input files; messages carry line numbers.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// CSV: first row is a header containing an `id` column; repeated ids
/// accumulate multi-valued properties. N-Triples subset: one triple per line,
/// subject = entity id, predicate = property name, literal objects (or the id
/// of a non-literal object) as values.
EntitySource load_entities(const std::string& path, EntityFormat format, Source label);

struct LabeledLink {
    std::string source_id;
    std::string target_id;
    bool positive = true;
};

/// Link CSV with columns source_id, target_id and optional label (+ or -,
/// default +). Order preserved; duplicates and dangling ids rejected.
std::vector<LabeledLink> load_links(const std::string& path, const EntitySource& a,
                                    const EntitySource& b);

ReferenceLinkSet split_labels(const std::vector<LabeledLink>& links);

/// Derives negative links from positives: after a seeded shuffle, consecutive
/// links (a,b),(c,d) yield (a,d) and (c,b); an odd leftover pairs with the
/// first link. Sound only when each source is internally duplicate-free.
std::vector<Link> generate_negative_links(const std::vector<Link>& positives, Rng& rng);

/// Stratified k-fold partition: positives and negatives are each shuffled and
/// split into k near-equal parts.
std::vector<ReferenceLinkSet> split_folds(const ReferenceLinkSet& links, std::size_t k, Rng& rng);

/// Union of all folds except `holdout` as training set, fold `holdout` as
/// validation set.
std::pair<ReferenceLinkSet, ReferenceLinkSet> train_validation_split(
    const std::vector<ReferenceLinkSet>& folds, std::size_t holdout);

/// Parses one CSV record (comma separated, double-quote escaping).
std::vector<std::string> parse_csv_record(const std::string& line);

std::string csv_escape(const std::string& field);

}  // namespace genlink
