// genlink: learn, execute and benchmark linkage rules from the command line.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "genlink/dataset.hpp"
#include "genlink/eval.hpp"
#include "genlink/harness.hpp"
#include "genlink/learner.hpp"
#include "genlink/numfmt.hpp"
#include "genlink/rule_text.hpp"

namespace {

using namespace genlink;

struct CommonOpts {
    std::string source_a;
    std::string source_b;  // empty: self-join, source A used for both sides
    std::string links;
    std::string rule;
    std::string config;
    std::string out;
    std::string format = "csv";
    std::string mode;
    std::string axis;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t threads = 1;
    std::size_t runs = 10;
    std::size_t folds = 2;
};

EntityFormat parse_format(const std::string& name) {
    if (name == "csv") return EntityFormat::Csv;
    if (name == "ntriples") return EntityFormat::NTriples;
    throw DataError("format must be csv or ntriples");
}

std::pair<EntitySource, EntitySource> load_sources(const CommonOpts& opts) {
    EntityFormat format = parse_format(opts.format);
    EntitySource a = load_entities(opts.source_a, format, Source::A);
    EntitySource b = opts.source_b.empty() ? load_entities(opts.source_a, format, Source::B)
                                           : load_entities(opts.source_b, format, Source::B);
    return {std::move(a), std::move(b)};
}

LearnerConfig make_config(const CommonOpts& opts) {
    LearnerConfig config =
        opts.config.empty() ? LearnerConfig{} : load_learner_config(opts.config);
    if (!opts.mode.empty() && !parse_representation_mode(opts.mode, config.mode))
        throw DataError("unknown representation mode '" + opts.mode + "'");
    if (const char* env = std::getenv("GENLINK_SEED"))
        config.rng_seed = std::stoull(env);
    else if (opts.seed_given)
        config.rng_seed = opts.seed;
    config.threads = opts.threads;
    config.check();
    return config;
}

std::uint64_t master_seed(const CommonOpts& opts) {
    if (const char* env = std::getenv("GENLINK_SEED")) return std::stoull(env);
    return opts.seed;
}

ReferenceLinkSet load_link_set(const CommonOpts& opts, const EntitySource& a,
                               const EntitySource& b) {
    std::vector<LabeledLink> labeled = load_links(opts.links, a, b);
    ReferenceLinkSet links = split_labels(labeled);
    if (links.negative.empty()) {
        Rng rng(master_seed(opts));
        links.negative = generate_negative_links(links.positive, rng);
    }
    return links;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    return out;
}

int cmd_learn(const CommonOpts& opts) {
    auto [a, b] = load_sources(opts);
    ReferenceLinkSet links = load_link_set(opts, a, b);
    LearnerConfig config = make_config(opts);
    LearnResult result = learn(links, a, b, config);

    open_out(opts.out) << serialize(result.best);
    std::string history_path = opts.out + ".history.csv";
    std::ofstream history = open_out(history_path);
    history << "iteration,seconds,best_train_f1\n";
    for (const IterationRecord& record : result.history) {
        history << record.iteration << ',' << format_number(record.seconds) << ','
                << format_number(record.best_train_f1) << '\n';
        std::cerr << "iteration " << record.iteration << ": best train F1 "
                  << format_number(record.best_train_f1) << '\n';
    }
    std::cout << "wrote " << opts.out << " and " << history_path << '\n';
    return 0;
}

int cmd_match(const CommonOpts& opts) {
    auto [a, b] = load_sources(opts);
    std::ifstream in(opts.rule);
    if (!in) throw DataError("cannot read " + opts.rule);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    LinkageRule rule = parse_rule(text);

    std::ofstream out = open_out(opts.out);
    out << "source_id,target_id,score\n";
    bool self_join = opts.source_b.empty();
    for (const Entity& ea : a.entities())
        for (const Entity& eb : b.entities()) {
            if (self_join && ea.id == eb.id) continue;
            double score = eval_rule(rule, ea, eb);
            if (score >= 0.5)
                out << csv_escape(ea.id) << ',' << csv_escape(eb.id) << ','
                    << format_number(score) << '\n';
        }
    return 0;
}

int cmd_eval(const CommonOpts& opts) {
    auto [a, b] = load_sources(opts);
    std::ifstream in(opts.rule);
    if (!in) throw DataError("cannot read " + opts.rule);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    LinkageRule rule = parse_rule(text);
    ReferenceLinkSet links = load_link_set(opts, a, b);
    EvalResult result = evaluate(rule, links, a, b);
    std::cout << "precision=" << format_number(result.precision)
              << " recall=" << format_number(result.recall) << " f1=" << format_number(result.f1)
              << " tp=" << result.confusion.tp << " fp=" << result.confusion.fp
              << " tn=" << result.confusion.tn << " fn=" << result.confusion.fn << '\n';
    return 0;
}

int cmd_bench(const CommonOpts& opts) {
    auto [a, b] = load_sources(opts);
    ReferenceLinkSet links = load_link_set(opts, a, b);
    LearnerConfig config = make_config(opts);
    std::uint64_t seed = master_seed(opts);
    std::filesystem::create_directories(opts.out);
    auto path = [&](const std::string& name) { return opts.out + "/" + name; };

    if (opts.axis.empty()) {
        RunSummary summary =
            cross_validate(a, b, links, config, opts.runs, opts.folds, seed);
        { std::ofstream f = open_out(path("summary.csv")); write_summary_csv(f, summary); }
        { std::ofstream f = open_out(path("cells.csv")); write_cells_csv(f, summary); }
        for (const CellResult& cell : summary.cells) {
            std::string name =
                "rule_run" + std::to_string(cell.run) + "_fold" + std::to_string(cell.fold) + ".txt";
            open_out(path(name)) << serialize(cell.best);
        }
        std::cout << "final mean validation F1: "
                  << format_number(summary.rows.back().mean_val_f1) << '\n';
    } else if (opts.axis == "representation") {
        RepresentationAblation ablation =
            ablate_representation(a, b, links, config, opts.runs, seed);
        std::ofstream f = open_out(path("representation.csv"));
        write_representation_csv(f, ablation);
    } else if (opts.axis == "seeding") {
        SeedingAblation ablation = ablate_seeding(a, b, links, config, opts.runs, seed);
        std::ofstream f = open_out(path("seeding.csv"));
        write_seeding_csv(f, ablation);
    } else if (opts.axis == "crossover") {
        CrossoverAblation ablation = ablate_crossover(a, b, links, config, opts.runs, seed);
        std::ofstream f = open_out(path("crossover.csv"));
        write_crossover_csv(f, ablation);
    } else {
        throw DataError("axis must be representation, seeding or crossover");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"genlink: supervised entity matching with learned linkage rules"};
    app.require_subcommand(1);
    CommonOpts opts;

    auto add_sources = [&](CLI::App* cmd, bool required_b) {
        cmd->add_option("--source-a", opts.source_a, "entity file for source A")->required();
        auto* b = cmd->add_option("--source-b", opts.source_b,
                                  "entity file for source B (default: self-join on A)");
        (void)required_b;
        (void)b;
        cmd->add_option("--format", opts.format, "entity file format: csv|ntriples");
        cmd->add_option("--threads", opts.threads, "worker threads for fitness evaluation");
    };

    CLI::App* learn = app.add_subcommand("learn", "learn a linkage rule from reference links");
    add_sources(learn, false);
    learn->add_option("--links", opts.links, "reference link CSV")->required();
    learn->add_option("--config", opts.config, "learner config file (key=value)");
    learn->add_option("--out", opts.out, "output rule file")->required();
    learn->add_option("--seed", opts.seed, "RNG seed")->each([&](const std::string&) {
        opts.seed_given = true;
    });
    learn->add_option("--mode", opts.mode, "representation mode: boolean|linear|nonlinear|full");

    CLI::App* match = app.add_subcommand("match", "emit all pairs a rule accepts");
    add_sources(match, false);
    match->add_option("--rule", opts.rule, "rule file")->required();
    match->add_option("--out", opts.out, "output link CSV")->required();

    CLI::App* eval = app.add_subcommand("eval", "score a rule against reference links");
    add_sources(eval, false);
    eval->add_option("--rule", opts.rule, "rule file")->required();
    eval->add_option("--links", opts.links, "reference link CSV")->required();
    eval->add_option("--seed", opts.seed, "RNG seed (negative-link generation)")
        ->each([&](const std::string&) { opts.seed_given = true; });

    CLI::App* bench = app.add_subcommand("bench", "cross-validation and ablation runs");
    add_sources(bench, false);
    bench->add_option("--links", opts.links, "reference link CSV")->required();
    bench->add_option("--config", opts.config, "learner config file");
    bench->add_option("--out", opts.out, "output directory")->required();
    bench->add_option("--seed", opts.seed, "master RNG seed")->each([&](const std::string&) {
        opts.seed_given = true;
    });
    bench->add_option("--mode", opts.mode, "representation mode");
    bench->add_option("--axis", opts.axis, "ablation axis: representation|seeding|crossover");
    bench->add_option("--runs", opts.runs, "number of repeated runs");
    bench->add_option("--folds", opts.folds, "cross-validation folds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (learn->parsed()) return cmd_learn(opts);
        if (match->parsed()) return cmd_match(opts);
        if (eval->parsed()) return cmd_eval(opts);
        if (bench->parsed()) return cmd_bench(opts);
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const RuleParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
