#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "genlink/learner.hpp"

namespace genlink {

struct EvalResult {
    Confusion confusion;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Confusion metrics of a rule over the given reference links only.
EvalResult evaluate(const LinkageRule& rule, const ReferenceLinkSet& links, const EntitySource& a,
                    const EntitySource& b);

/// One training episode: a (run, holdout fold) pair.
struct CellCurvePoint {
    std::size_t iteration = 0;
    double seconds = 0.0;
    double train_f1 = 0.0;  // fitness-best rule of the iteration, on training links
    double val_f1 = 0.0;    // same rule on the validation links
};

struct CellResult {
    std::size_t run = 0;
    std::size_t fold = 0;
    std::uint64_t seed = 0;
    std::vector<CellCurvePoint> curve;  // one point per iteration, incl. 0
    LinkageRule best;
};

struct SummaryRow {
    std::size_t iteration = 0;
    double mean_train_f1 = 0.0, sd_train_f1 = 0.0;
    double mean_val_f1 = 0.0, sd_val_f1 = 0.0;
    double mean_seconds = 0.0, sd_seconds = 0.0;
};

struct RunSummary {
    std::vector<SummaryRow> rows;    // iterations 0..max_iterations
    std::vector<CellResult> cells;   // runs x folds episodes
};

/// The repeated cross-validation protocol: per run, a fresh stratified fold
/// split; every fold serves as validation once (both directions for k = 2).
/// Cell seeds derive deterministically from the master seed.
/// `measure_time` = false zeroes the wall-clock columns so output files are
/// byte-reproducible.
RunSummary cross_validate(const EntitySource& a, const EntitySource& b,
                          const ReferenceLinkSet& links, const LearnerConfig& config,
                          std::size_t runs, std::size_t folds, std::uint64_t master_seed,
                          bool measure_time = true);

/// Curves where learning stopped early are extended with their last point so
/// every cell reports a value at each iteration.
double mean_val_f1_at(const RunSummary& summary, std::size_t iteration);

// Ablation axes.

struct RepresentationAblation {
    struct Row {
        RepresentationMode mode;
        double val_f1 = 0.0;  // mean validation F1 at the probe iteration
    };
    std::size_t probe_iteration = 25;
    std::vector<Row> rows;
};

struct SeedingAblation {
    double random_mean_f1 = 0.0, random_sd = 0.0;
    double seeded_mean_f1 = 0.0, seeded_sd = 0.0;
};

struct CrossoverAblation {
    struct Row {
        CrossoverStrategy strategy;
        double val_f1_at_10 = 0.0;
        double val_f1_at_25 = 0.0;
    };
    std::vector<Row> rows;
};

RepresentationAblation ablate_representation(const EntitySource& a, const EntitySource& b,
                                             const ReferenceLinkSet& links,
                                             const LearnerConfig& config, std::size_t runs,
                                             std::uint64_t master_seed);

/// Mean training F1 of the initial population, seeded vs fully random
/// (every property pair), averaged over `repeats` seeds.
SeedingAblation ablate_seeding(const EntitySource& a, const EntitySource& b,
                               const ReferenceLinkSet& links, const LearnerConfig& config,
                               std::size_t repeats, std::uint64_t master_seed);

CrossoverAblation ablate_crossover(const EntitySource& a, const EntitySource& b,
                                   const ReferenceLinkSet& links, const LearnerConfig& config,
                                   std::size_t runs, std::uint64_t master_seed);

// CSV emission. Columns are fixed and documented in the README.
void write_summary_csv(std::ostream& out, const RunSummary& summary);
void write_cells_csv(std::ostream& out, const RunSummary& summary);
void write_representation_csv(std::ostream& out, const RepresentationAblation& ablation);
void write_seeding_csv(std::ostream& out, const SeedingAblation& ablation);
void write_crossover_csv(std::ostream& out, const CrossoverAblation& ablation);

}  // namespace genlink
