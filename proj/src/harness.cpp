#include "genlink/harness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "genlink/eval.hpp"
#include "genlink/numfmt.hpp"

namespace genlink {

namespace {

// Per-cell seeds derive from the master seed through a splitmix64 step so
// cells are independent and order-insensitive.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct MeanSd {
    double mean = 0.0, sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& xs) {
    if (xs.empty()) return {};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return {mean, std::sqrt(var)};
}

const CellCurvePoint& point_at(const CellResult& cell, std::size_t iteration) {
    // Early-stopped curves hold their last value.
    std::size_t i = std::min(iteration, cell.curve.size() - 1);
    return cell.curve[i];
}

}  // namespace

EvalResult evaluate(const LinkageRule& rule, const ReferenceLinkSet& links, const EntitySource& a,
                    const EntitySource& b) {
    std::vector<LinkedPair> pairs = resolve_links(links, a, b);
    EvalResult result;
    for (const LinkedPair& pair : pairs) {
        bool matched = is_match(rule, *pair.a, *pair.b);
        if (pair.positive)
            matched ? ++result.confusion.tp : ++result.confusion.fn;
        else
            matched ? ++result.confusion.fp : ++result.confusion.tn;
    }
    result.precision = precision(result.confusion);
    result.recall = recall(result.confusion);
    result.f1 = f1(result.confusion);
    return result;
}

RunSummary cross_validate(const EntitySource& a, const EntitySource& b,
                          const ReferenceLinkSet& links, const LearnerConfig& config,
                          std::size_t runs, std::size_t folds, std::uint64_t master_seed,
                          bool measure_time) {
    config.check();
    RunSummary summary;
    for (std::size_t run = 0; run < runs; ++run) {
        Rng fold_rng(derive_seed(master_seed, run * 2 + 1));
        std::vector<ReferenceLinkSet> parts = split_folds(links, folds, fold_rng);
        for (std::size_t holdout = 0; holdout < folds; ++holdout) {
            auto [train, validation] = train_validation_split(parts, holdout);
            LearnerConfig cell_config = config;
            cell_config.rng_seed = derive_seed(master_seed, run * folds + holdout);
            LearnResult learned = learn(train, a, b, cell_config, measure_time);

            CellResult cell;
            cell.run = run;
            cell.fold = holdout;
            cell.seed = cell_config.rng_seed;
            for (const IterationRecord& record : learned.history) {
                CellCurvePoint point;
                point.iteration = record.iteration;
                point.seconds = record.seconds;
                point.train_f1 = evaluate(record.best, train, a, b).f1;
                point.val_f1 = evaluate(record.best, validation, a, b).f1;
                cell.curve.push_back(point);
            }
            cell.best = learned.best;
            summary.cells.push_back(std::move(cell));
        }
    }

    for (std::size_t iter = 0; iter <= config.max_iterations; ++iter) {
        std::vector<double> train_f1s, val_f1s, seconds;
        for (const CellResult& cell : summary.cells) {
            const CellCurvePoint& p = point_at(cell, iter);
            train_f1s.push_back(p.train_f1);
            val_f1s.push_back(p.val_f1);
            seconds.push_back(p.seconds);
        }
        MeanSd t = mean_sd(train_f1s), v = mean_sd(val_f1s), s = mean_sd(seconds);
        summary.rows.push_back({iter, t.mean, t.sd, v.mean, v.sd, s.mean, s.sd});
    }
    return summary;
}

double mean_val_f1_at(const RunSummary& summary, std::size_t iteration) {
    std::vector<double> vals;
    for (const CellResult& cell : summary.cells) vals.push_back(point_at(cell, iteration).val_f1);
    return mean_sd(vals).mean;
}

RepresentationAblation ablate_representation(const EntitySource& a, const EntitySource& b,
                                             const ReferenceLinkSet& links,
                                             const LearnerConfig& config, std::size_t runs,
                                             std::uint64_t master_seed) {
    RepresentationAblation ablation;
    ablation.probe_iteration = std::min<std::size_t>(25, config.max_iterations);
    for (RepresentationMode mode :
         {RepresentationMode::Boolean, RepresentationMode::Linear, RepresentationMode::Nonlinear,
          RepresentationMode::Full}) {
        LearnerConfig c = config;
        c.mode = mode;
        RunSummary summary = cross_validate(a, b, links, c, runs, 2, master_seed, false);
        ablation.rows.push_back({mode, mean_val_f1_at(summary, ablation.probe_iteration)});
    }
    return ablation;
}

SeedingAblation ablate_seeding(const EntitySource& a, const EntitySource& b,
                               const ReferenceLinkSet& links, const LearnerConfig& config,
                               std::size_t repeats, std::uint64_t master_seed) {
    config.check();
    std::vector<LinkedPair> pairs = resolve_links(links, a, b);

    SeedingContext seeded;
    seeded.mode = config.mode;
    seeded.ranges = observe_threshold_ranges(a, b);
    seeded.pairs = find_compatible_properties(pairs, config.seed_measures, config.seed_thresholds);

    SeedingContext random = seeded;
    random.pairs.clear();
    for (const std::string& pa : a.property_names())
        for (const std::string& pb : b.property_names())
            random.pairs.push_back({pa, pb, Measure::Levenshtein});

    auto population_mean_f1 = [&](const SeedingContext& ctx, std::uint64_t seed) {
        Rng rng(seed);
        double sum = 0.0;
        for (std::size_t i = 0; i < config.population_size; ++i) {
            LinkageRule rule = repair_for_mode(random_rule(ctx, rng), config.mode);
            sum += fitness(rule, pairs, config.penalty_per_operator).train_f1;
        }
        return sum / static_cast<double>(config.population_size);
    };

    std::vector<double> random_f1s, seeded_f1s;
    for (std::size_t r = 0; r < repeats; ++r) {
        std::uint64_t seed = derive_seed(master_seed, r);
        random_f1s.push_back(population_mean_f1(random, seed));
        if (!seeded.pairs.empty()) seeded_f1s.push_back(population_mean_f1(seeded, seed));
    }
    MeanSd rm = mean_sd(random_f1s), sm = mean_sd(seeded_f1s);
    return {rm.mean, rm.sd, sm.mean, sm.sd};
}

CrossoverAblation ablate_crossover(const EntitySource& a, const EntitySource& b,
                                   const ReferenceLinkSet& links, const LearnerConfig& config,
                                   std::size_t runs, std::uint64_t master_seed) {
    CrossoverAblation ablation;
    std::size_t at10 = std::min<std::size_t>(10, config.max_iterations);
    std::size_t at25 = std::min<std::size_t>(25, config.max_iterations);
    for (CrossoverStrategy strategy : {CrossoverStrategy::Subtree, CrossoverStrategy::Specialized}) {
        LearnerConfig c = config;
        c.crossover = strategy;
        RunSummary summary = cross_validate(a, b, links, c, runs, 2, master_seed, false);
        ablation.rows.push_back(
            {strategy, mean_val_f1_at(summary, at10), mean_val_f1_at(summary, at25)});
    }
    return ablation;
}

void write_summary_csv(std::ostream& out, const RunSummary& summary) {
    out << "iteration,mean_train_f1,sd_train_f1,mean_val_f1,sd_val_f1,mean_seconds,sd_seconds\n";
    for (const SummaryRow& row : summary.rows)
        out << row.iteration << ',' << format_number(row.mean_train_f1) << ','
            << format_number(row.sd_train_f1) << ',' << format_number(row.mean_val_f1) << ','
            << format_number(row.sd_val_f1) << ',' << format_number(row.mean_seconds) << ','
            << format_number(row.sd_seconds) << '\n';
}

void write_cells_csv(std::ostream& out, const RunSummary& summary) {
    out << "run,fold,seed,iteration,seconds,train_f1,val_f1\n";
    for (const CellResult& cell : summary.cells)
        for (const CellCurvePoint& p : cell.curve)
            out << cell.run << ',' << cell.fold << ',' << cell.seed << ',' << p.iteration << ','
                << format_number(p.seconds) << ',' << format_number(p.train_f1) << ','
                << format_number(p.val_f1) << '\n';
}

void write_representation_csv(std::ostream& out, const RepresentationAblation& ablation) {
    out << "mode,probe_iteration,val_f1\n";
    for (const auto& row : ablation.rows)
        out << to_string(row.mode) << ',' << ablation.probe_iteration << ','
            << format_number(row.val_f1) << '\n';
}

void write_seeding_csv(std::ostream& out, const SeedingAblation& ablation) {
    out << "strategy,mean_initial_f1,sd_initial_f1\n";
    out << "random," << format_number(ablation.random_mean_f1) << ','
        << format_number(ablation.random_sd) << '\n';
    out << "seeded," << format_number(ablation.seeded_mean_f1) << ','
        << format_number(ablation.seeded_sd) << '\n';
}

void write_crossover_csv(std::ostream& out, const CrossoverAblation& ablation) {
    out << "strategy,val_f1_at_10,val_f1_at_25\n";
    for (const auto& row : ablation.rows)
        out << (row.strategy == CrossoverStrategy::Subtree ? "subtree" : "specialized") << ','
            << format_number(row.val_f1_at_10) << ',' << format_number(row.val_f1_at_25) << '\n';
}

}  // namespace genlink
