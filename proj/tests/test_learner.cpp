#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "genlink/eval.hpp"
#include "genlink/learner.hpp"
#include "genlink/rule_text.hpp"
#include "support.hpp"

using namespace genlink;
using namespace genlink::testing;

TEST_CASE("config files parse and reject unknown keys") {
    std::string path = "genlink_cfg.tmp";
    std::ofstream(path) << "# comment\n"
                           "population_size = 40\n"
                           "max_iterations = 5\n"
                           "tournament_size = 3\n"
                           "p_crossover = 0.8\n"
                           "p_mutation = 0.2\n"
                           "representation_mode = boolean\n"
                           "crossover = subtree\n"
                           "seed_measures = levenshtein, geographic\n"
                           "seed_threshold_geographic = 100\n";
    LearnerConfig cfg = load_learner_config(path);
    CHECK(cfg.population_size == 40);
    CHECK(cfg.max_iterations == 5);
    CHECK(cfg.p_crossover == 0.8);
    CHECK(cfg.mode == RepresentationMode::Boolean);
    CHECK(cfg.crossover == CrossoverStrategy::Subtree);
    CHECK(cfg.seed_measures == std::vector<Measure>{Measure::Levenshtein,
                                                    Measure::Geographic});
    CHECK(cfg.seed_thresholds.at(Measure::Geographic) == 100.0);
    cfg.check();

    std::ofstream(path) << "population = 40\n";
    CHECK_THROWS_AS(load_learner_config(path), DataError);
    std::remove(path.c_str());

    LearnerConfig bad;
    bad.p_crossover = 0.9;  // 0.9 + 0.25 != 1
    CHECK_THROWS_AS(bad.check(), DataError);
    LearnerConfig tiny;
    tiny.population_size = 3;
    tiny.tournament_size = 5;
    CHECK_THROWS_AS(tiny.check(), DataError);
}

TEST_CASE("mcc and fitness on a hand-checked confusion") {
    Confusion c{40, 40, 10, 10};
    CHECK(mcc(c) == doctest::Approx(0.6));
    CHECK(f1(c) == doctest::Approx(0.8));
    CHECK(mcc(Confusion{0, 0, 0, 0}) == 0.0);
    CHECK(mcc(Confusion{5, 0, 0, 0}) == 0.0);  // degenerate marginals

    // A rule matching on exact name equality; 3 operators + the aggregation.
    Entity ax = entity("ax", {{"name", {"x"}}});
    Entity bx = entity("bx", {{"name", {"x"}}});
    Entity by = entity("by", {{"name", {"y"}}});
    LinkageRule rule = simple_rule("name", "name", Measure::Levenshtein, 0.0);

    std::vector<LinkedPair> links;
    for (int i = 0; i < 40; ++i) links.push_back({&ax, &bx, true});   // tp
    for (int i = 0; i < 10; ++i) links.push_back({&ax, &by, true});   // fn
    for (int i = 0; i < 40; ++i) links.push_back({&ax, &by, false});  // tn
    for (int i = 0; i < 10; ++i) links.push_back({&ax, &bx, false});  // fp

    FitnessReport report = fitness(rule, links, 0.05);
    CHECK(report.confusion.tp == 40);
    CHECK(report.confusion.fn == 10);
    CHECK(report.mcc == doctest::Approx(0.6));
    CHECK(report.operator_count == 4);
    CHECK(report.fitness == doctest::Approx(0.6 - 0.05 * 4));
    CHECK(report.train_f1 == doctest::Approx(0.8));
}

TEST_CASE("population evaluation is independent of the thread count") {
    SyntheticDataset data = make_case_noise_dataset(20);
    auto links = resolve_links(data.links, data.a, data.b);
    SeedingContext ctx;
    ctx.pairs = {{"name", "name", Measure::Levenshtein}};
    Rng rng(4);
    std::vector<LinkageRule> population;
    for (int i = 0; i < 64; ++i) population.push_back(random_rule(ctx, rng));
    auto serial = evaluate_population(population, links, 0.05, 1);
    auto parallel = evaluate_population(population, links, 0.05, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].fitness == parallel[i].fitness);
        CHECK(serial[i].confusion.tp == parallel[i].confusion.tp);
    }
}

TEST_CASE("tournament selection prefers fitness, then parsimony") {
    std::vector<FitnessReport> reports(2);
    reports[0].fitness = 0.1;
    reports[1].fitness = 0.9;
    Rng rng(8);
    int wins = 0;
    for (int i = 0; i < 200; ++i)
        if (tournament_select(reports, 5, rng) == 1) ++wins;
    // index 0 only wins when all five draws miss index 1 (p = 2^-5)
    CHECK(wins > 180);

    reports[1].fitness = 0.1;  // tie on fitness
    reports[0].operator_count = 9;
    reports[1].operator_count = 3;
    wins = 0;
    for (int i = 0; i < 200; ++i)
        if (tournament_select(reports, 5, rng) == 1) ++wins;
    CHECK(wins > 180);

    std::vector<FitnessReport> one(1);
    CHECK(tournament_select(one, 5, rng) == 0);
}

TEST_CASE("compatible property discovery pairs label-like and spatial properties") {
    // One source labels entities and stores a geo point under `point`; the
    // other uses `label` and `coord`. A decoy property never agrees.
    std::vector<Entity> ea = {
        entity("a1", {{"label", {"Berlin"}}, {"point", {"52.52 13.405"}},
                      {"mayor", {"Kai Wegner"}}}),
        entity("a2", {{"label", {"Paris"}}, {"point", {"48.86 2.35"}},
                      {"mayor", {"Anne Hidalgo"}}}),
    };
    std::vector<Entity> eb = {
        entity("b1", {{"label", {"berlin"}}, {"coord", {"52.5201 13.4049"}},
                      {"mayor", {"unknown"}}}),
        entity("b2", {{"label", {"paris"}}, {"coord", {"48.8601 2.3501"}},
                      {"mayor", {"n/a"}}}),
    };
    EntitySource a(Source::A, ea), b(Source::B, eb);
    ReferenceLinkSet ref;
    ref.positive = {{"a1", "b1"}, {"a2", "b2"}};
    auto links = resolve_links(ref, a, b);

    auto pairs = find_compatible_properties(
        links, {Measure::Levenshtein, Measure::Geographic},
        {{Measure::Levenshtein, 1.0}, {Measure::Geographic, 100.0}});
    std::set<CompatiblePair> got(pairs.begin(), pairs.end());
    CHECK(got.count({"label", "label", Measure::Levenshtein}) == 1);
    CHECK(got.count({"point", "coord", Measure::Geographic}) == 1);
    CHECK(got.count({"mayor", "mayor", Measure::Levenshtein}) == 0);
    CHECK(got.count({"label", "mayor", Measure::Levenshtein}) == 0);
}

TEST_CASE("resolve_links rejects dangling ids") {
    SyntheticDataset data = make_case_noise_dataset(3);
    data.links.positive.emplace_back("a99", "b0");
    CHECK_THROWS_AS(resolve_links(data.links, data.a, data.b), DataError);
}

TEST_CASE("mode repair strips transforms and flattens nesting") {
    SimilarityNode inner =
        agg(AggregateFn::Min,
            {cmp(tf(TransformFn::LowerCase, {prop(Source::A, "p")}), prop(Source::B, "p"),
                 Measure::Levenshtein, 1.0)});
    LinkageRule nested{agg(
        AggregateFn::Max,
        {std::move(inner),
         cmp(prop(Source::A, "q"), prop(Source::B, "q"), Measure::Levenshtein, 2.0)})};

    CHECK(mode_allows(nested, RepresentationMode::Full));
    CHECK_FALSE(mode_allows(nested, RepresentationMode::Nonlinear));  // transform present
    CHECK_FALSE(mode_allows(nested, RepresentationMode::Boolean));

    LinkageRule boolean = repair_for_mode(nested, RepresentationMode::Boolean);
    CHECK(mode_allows(boolean, RepresentationMode::Boolean));
    CHECK(validate(boolean).ok());
    // both comparisons survive, transform-free, under a flat root
    REQUIRE(boolean.root.is_aggregation());
    CHECK(boolean.root.aggregation().operands.size() == 2);
    for (const SimilarityNode& op : boolean.root.aggregation().operands) {
        REQUIRE(op.is_comparison());
        CHECK(op.comparison().left.is_property());
    }

    LinkageRule linear = repair_for_mode(nested, RepresentationMode::Linear);
    CHECK(mode_allows(linear, RepresentationMode::Linear));
    CHECK(linear.root.aggregation().fn == AggregateFn::WMean);

    LinkageRule nonlinear = repair_for_mode(nested, RepresentationMode::Nonlinear);
    CHECK(mode_allows(nonlinear, RepresentationMode::Nonlinear));
    CHECK(nonlinear.root.aggregation().operands[0].is_aggregation());  // nesting kept
}

TEST_CASE("random rules respect the representation mode") {
    SeedingContext ctx;
    ctx.pairs = {{"name", "name", Measure::Levenshtein}};
    for (RepresentationMode mode :
         {RepresentationMode::Boolean, RepresentationMode::Linear,
          RepresentationMode::Nonlinear}) {
        ctx.mode = mode;
        Rng rng(21);
        for (int i = 0; i < 500; ++i) {
            LinkageRule r = random_rule(ctx, rng);
            CHECK(mode_allows(r, mode));
            CHECK(validate(r).ok());
        }
    }
}

TEST_CASE("learning a separable problem reaches full training F1 quickly") {
    SyntheticDataset data = make_conjunctive_dataset(12);
    LearnerConfig cfg;
    cfg.population_size = 100;
    cfg.max_iterations = 10;
    int solved = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        cfg.rng_seed = seed;
        LearnResult result = learn(data.links, data.a, data.b, cfg, /*measure_time=*/false);
        REQUIRE_FALSE(result.history.empty());
        if (result.history.back().best_train_f1 == 1.0) ++solved;
        CHECK(validate(result.best).ok());
    }
    CHECK(solved >= 9);
}

TEST_CASE("learning stops once training F1 hits 1 and is seed-deterministic") {
    SyntheticDataset data = make_case_noise_dataset(15);
    LearnerConfig cfg;
    cfg.population_size = 120;
    cfg.max_iterations = 25;
    cfg.rng_seed = 42;
    LearnResult r1 = learn(data.links, data.a, data.b, cfg, false);
    LearnResult r2 = learn(data.links, data.a, data.b, cfg, false);
    CHECK(serialize(r1.best) == serialize(r2.best));
    REQUIRE(r1.history.size() == r2.history.size());
    for (std::size_t i = 0; i < r1.history.size(); ++i) {
        CHECK(r1.history[i].best_train_f1 == r2.history[i].best_train_f1);
        CHECK(r1.history[i].seconds == 0.0);
    }
    if (r1.history.back().best_train_f1 == 1.0)
        CHECK(r1.history.size() <= cfg.max_iterations + 1);
    CHECK(r1.seeded_pairs ==
          std::vector<CompatiblePair>{{"name", "name", Measure::Levenshtein}});
}
