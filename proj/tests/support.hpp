#pragma once

// Shared builders and synthetic datasets for the test suites.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "genlink/dataset.hpp"
#include "genlink/entity.hpp"
#include "genlink/rule.hpp"

namespace genlink::testing {

// --- terse rule builders ---------------------------------------------------

inline ValueNode prop(Source s, std::string name) {
    return ValueNode{PropertyNode{s, std::move(name)}};
}

inline ValueNode tf(TransformFn fn, std::vector<ValueNode> inputs) {
    return ValueNode{TransformNode{fn, std::move(inputs)}};
}

inline SimilarityNode cmp(ValueNode left, ValueNode right, Measure m, double threshold,
                          double weight = 1.0) {
    return SimilarityNode{
        ComparisonNode{std::move(left), std::move(right), m, threshold, weight}};
}

inline SimilarityNode agg(AggregateFn fn, std::vector<SimilarityNode> operands,
                          double weight = 1.0) {
    return SimilarityNode{AggregationNode{fn, std::move(operands), weight}};
}

/// Single-comparison rule over one property pair.
inline LinkageRule simple_rule(const std::string& pa, const std::string& pb, Measure m,
                               double threshold) {
    return LinkageRule{agg(AggregateFn::Min,
                           {cmp(prop(Source::A, pa), prop(Source::B, pb), m, threshold)})};
}

inline Entity entity(std::string id, std::map<std::string, ValueSet> props) {
    return Entity{std::move(id), std::move(props)};
}

// --- deterministic synthetic datasets --------------------------------------

/// Deterministic pseudo-word of `len` lowercase letters.
inline std::string synth_word(Rng& rng, std::size_t len) {
    std::string out;
    std::uniform_int_distribution<int> letter(0, 25);
    for (std::size_t i = 0; i < len; ++i) out.push_back(static_cast<char>('a' + letter(rng)));
    return out;
}

struct SyntheticDataset {
    EntitySource a;
    EntitySource b;
    ReferenceLinkSet links;
};

/// Two copies of `n` entities with long distinct names; source A stores them
/// upper-cased, source B lower-cased. Separable only by case-folding the
/// values first: the raw edit distance of every matching pair is the full
/// name length.
inline SyntheticDataset make_case_noise_dataset(std::size_t n, std::uint64_t seed = 11) {
    Rng rng(seed);
    std::vector<Entity> ea, eb;
    ReferenceLinkSet links;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(synth_word(rng, 14));
    for (std::size_t i = 0; i < n; ++i) {
        std::string upper = names[i];
        for (char& c : upper) c = static_cast<char>(c - 'a' + 'A');
        std::string ida = "a" + std::to_string(i);
        std::string idb = "b" + std::to_string(i);
        ea.push_back(entity(ida, {{"name", {upper}}}));
        eb.push_back(entity(idb, {{"name", {names[i]}}}));
        links.positive.emplace_back(ida, idb);
        links.negative.emplace_back(ida, "b" + std::to_string((i + 1) % n));
    }
    return {EntitySource(Source::A, std::move(ea)), EntitySource(Source::B, std::move(eb)),
            std::move(links)};
}

/// Movie-style records where neither property separates alone: titles repeat
/// across years and years repeat across titles, so only a conjunction of a
/// title match and a year match labels the links correctly.
inline SyntheticDataset make_conjunctive_dataset(std::size_t n_titles,
                                                 std::uint64_t seed = 23) {
    Rng rng(seed);
    std::vector<Entity> ea, eb;
    ReferenceLinkSet links;
    std::vector<std::string> titles;
    for (std::size_t i = 0; i < n_titles; ++i) titles.push_back(synth_word(rng, 10));
    std::size_t id = 0;
    for (std::size_t i = 0; i < n_titles; ++i) {
        // Each title is released twice, one year apart.
        for (int edition = 0; edition < 2; ++edition) {
            std::string year = std::to_string(1980 + static_cast<int>(i % 20) + edition);
            std::string ida = "a" + std::to_string(id);
            std::string idb = "b" + std::to_string(id);
            ea.push_back(entity(ida, {{"title", {titles[i]}}, {"year", {year}}}));
            eb.push_back(entity(idb, {{"title", {titles[i]}}, {"year", {year}}}));
            links.positive.emplace_back(ida, idb);
            ++id;
        }
        // Same title, different year: a title-only rule calls these matches.
        links.negative.emplace_back("a" + std::to_string(id - 2),
                                    "b" + std::to_string(id - 1));
        links.negative.emplace_back("a" + std::to_string(id - 1),
                                    "b" + std::to_string(id - 2));
    }
    // Different title, same year: a year-only rule calls these matches.
    for (std::size_t i = 0; i + 20 < 2 * n_titles; i += 2)
        links.negative.emplace_back("a" + std::to_string(i), "b" + std::to_string(i + 20));
    return {EntitySource(Source::A, std::move(ea)), EntitySource(Source::B, std::move(eb)),
            std::move(links)};
}

/// Two informative properties buried under `junk` uninformative ones whose
/// values never coincide across sources.
inline SyntheticDataset make_wide_dataset(std::size_t n, std::size_t junk,
                                          std::uint64_t seed = 37) {
    Rng rng(seed);
    std::vector<Entity> ea, eb;
    ReferenceLinkSet links;
    for (std::size_t i = 0; i < n; ++i) {
        std::string name = synth_word(rng, 12);
        std::string city = synth_word(rng, 8);
        std::map<std::string, ValueSet> pa{{"name", {name}}, {"city", {city}}};
        std::map<std::string, ValueSet> pb = pa;
        for (std::size_t j = 0; j < junk; ++j) {
            std::string key = "junk" + std::to_string(j);
            pa[key] = {synth_word(rng, 10)};
            pb[key] = {synth_word(rng, 10)};
        }
        std::string ida = "a" + std::to_string(i);
        std::string idb = "b" + std::to_string(i);
        ea.push_back(entity(ida, std::move(pa)));
        eb.push_back(entity(idb, std::move(pb)));
        links.positive.emplace_back(ida, idb);
        links.negative.emplace_back(ida, "b" + std::to_string((i + 1) % n));
    }
    return {EntitySource(Source::A, std::move(ea)), EntitySource(Source::B, std::move(eb)),
            std::move(links)};
}

}  // namespace genlink::testing
