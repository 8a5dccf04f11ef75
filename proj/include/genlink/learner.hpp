#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "genlink/dataset.hpp"
#include "genlink/entity.hpp"
#include "genlink/metrics.hpp"
#include "genlink/rule.hpp"

namespace genlink {

enum class RepresentationMode { Boolean, Linear, Nonlinear, Full };
enum class CrossoverStrategy { Specialized, Subtree };

bool parse_representation_mode(const std::string& name, RepresentationMode& out);
const char* to_string(RepresentationMode mode);

struct LearnerConfig {
    std::size_t population_size = 500;
    std::size_t max_iterations = 50;
    std::size_t tournament_size = 5;
    double p_crossover = 0.75;
    double p_mutation = 0.25;
    double penalty_per_operator = 0.05;
    RepresentationMode mode = RepresentationMode::Full;
    CrossoverStrategy crossover = CrossoverStrategy::Specialized;
    std::uint64_t rng_seed = 0;
    std::size_t threads = 1;
    // Seeding: measures tried by the compatible-property scan and their
    // distance thresholds.
    std::vector<Measure> seed_measures = {Measure::Levenshtein};
    std::map<Measure, double> seed_thresholds = {{Measure::Levenshtein, 1.0}};

    /// Throws DataError when invariants are violated
    /// (p_crossover + p_mutation = 1, population_size > tournament_size >= 1).
    void check() const;
};

/// Plain-text key=value config file; unknown keys are rejected.
LearnerConfig load_learner_config(const std::string& path);

struct CompatiblePair {
    std::string property_a;
    std::string property_b;
    Measure measure = Measure::Levenshtein;

    auto operator<=>(const CompatiblePair&) const = default;
};

/// A reference link resolved to its entities.
struct LinkedPair {
    const Entity* a = nullptr;
    const Entity* b = nullptr;
    bool positive = true;
};

/// Resolves link ids against the sources; throws DataError on dangling ids.
std::vector<LinkedPair> resolve_links(const ReferenceLinkSet& links, const EntitySource& a,
                                      const EntitySource& b);

/// Scans every linked entity pair, property pair and measure; emits
/// (p_a, p_b, measure) whenever the measure distance over the lowercased
/// (and, for character measures, tokenized) values falls below its threshold.
std::vector<CompatiblePair> find_compatible_properties(
    const std::vector<LinkedPair>& links, const std::vector<Measure>& measures,
    const std::map<Measure, double>& thresholds);

/// Per-measure upper bounds for the log-uniform threshold initialization.
struct ThresholdRanges {
    double levenshtein = 5.0;
    double jaccard = 1.0;
    double numeric = 1.0;  // 10% of the observed value range when available
    double geographic = 50'000.0;
    double date = 365.0;

    double max_for(Measure m) const;
};

ThresholdRanges observe_threshold_ranges(const EntitySource& a, const EntitySource& b);

struct SeedingContext {
    std::vector<CompatiblePair> pairs;
    ThresholdRanges ranges;
    RepresentationMode mode = RepresentationMode::Full;
};

/// Draws a small random rule: a random aggregation over one or two
/// comparisons built from the compatible pairs, each property wrapped in a
/// random transformation with probability 50% (full mode only).
LinkageRule random_rule(const SeedingContext& ctx, Rng& rng);

struct FitnessReport {
    Confusion confusion;
    double mcc = 0.0;
    std::size_t operator_count = 0;
    double fitness = 0.0;     // mcc - penalty * operator_count
    double train_f1 = 0.0;
};

FitnessReport fitness(const LinkageRule& rule, const std::vector<LinkedPair>& links,
                      double penalty_per_operator);

/// Evaluates the whole population, optionally fanning out across threads.
/// Pure per-rule computation, so the result is independent of thread count.
std::vector<FitnessReport> evaluate_population(const std::vector<LinkageRule>& population,
                                               const std::vector<LinkedPair>& links,
                                               double penalty_per_operator, std::size_t threads);

/// Index of the winner among `size` draws with replacement. Ties break by
/// lower operator count, then by draw order.
std::size_t tournament_select(const std::vector<FitnessReport>& reports, std::size_t size,
                              Rng& rng);

// The six specialized crossover operators plus the subtree baseline. Each
// returns a new rule derived from r1; when a required node kind is missing in
// either parent the operator returns a copy of r1 unchanged.
LinkageRule crossover_function(const LinkageRule& r1, const LinkageRule& r2, Rng& rng);
LinkageRule crossover_operators(const LinkageRule& r1, const LinkageRule& r2, Rng& rng);
LinkageRule crossover_aggregation(const LinkageRule& r1, const LinkageRule& r2, Rng& rng);
LinkageRule crossover_transformation(const LinkageRule& r1, const LinkageRule& r2, Rng& rng);
LinkageRule crossover_threshold(const LinkageRule& r1, const LinkageRule& r2, Rng& rng);
LinkageRule crossover_weight(const LinkageRule& r1, const LinkageRule& r2, Rng& rng);
LinkageRule crossover_subtree(const LinkageRule& r1, const LinkageRule& r2, Rng& rng);

/// Applies one uniformly drawn specialized operator (or the subtree baseline).
LinkageRule apply_random_crossover(const LinkageRule& r1, const LinkageRule& r2,
                                   CrossoverStrategy strategy, Rng& rng);

/// Enforces the representation mode: strips transformations and flattens
/// nesting where the mode forbids them, forces a wmean root in linear mode.
LinkageRule repair_for_mode(LinkageRule rule, RepresentationMode mode);

bool mode_allows(const LinkageRule& rule, RepresentationMode mode);

/// One breeding generation: |P'| = |P| children produced by tournament
/// selection plus crossover; with probability p_mutation the second parent is
/// replaced by a fresh random rule (headless-chicken crossover).
std::vector<LinkageRule> breed(const std::vector<LinkageRule>& population,
                               const std::vector<FitnessReport>& reports,
                               const LearnerConfig& config, const SeedingContext& ctx, Rng& rng);

struct IterationRecord {
    std::size_t iteration = 0;
    double seconds = 0.0;       // elapsed since learning started
    double best_train_f1 = 0.0; // max training F1 in the population
    LinkageRule best;           // highest-fitness rule of the population
};

struct LearnResult {
    LinkageRule best;
    std::vector<IterationRecord> history;  // one record per iteration, incl. 0
    std::vector<CompatiblePair> seeded_pairs;
};

/// The full learning loop: seeded initialization, iterated breeding, stop at
/// max_iterations or full training F-measure. Deterministic per seed.
/// `measure_time` = false zeroes the wall-clock column for reproducible output.
LearnResult learn(const ReferenceLinkSet& train, const EntitySource& a, const EntitySource& b,
                  const LearnerConfig& config, bool measure_time = true);

}  // namespace genlink
