#include <doctest.h>

#include <set>

#include "genlink/learner.hpp"
#include "genlink/rule_text.hpp"
#include "support.hpp"

using namespace genlink;
using namespace genlink::testing;

namespace {

LinkageRule two_comparisons(double t1, double t2) {
    return LinkageRule{
        agg(AggregateFn::Min,
            {cmp(prop(Source::A, "p"), prop(Source::B, "p"), Measure::Levenshtein, t1),
             cmp(prop(Source::A, "q"), prop(Source::B, "q"), Measure::Jaccard, t2)})};
}

std::set<double> thresholds_of(const LinkageRule& r) {
    std::set<double> out;
    for (const SimilarityNode* s : similarity_nodes(r))
        if (s->is_comparison()) out.insert(s->comparison().threshold);
    return out;
}

}  // namespace

TEST_CASE("threshold crossover averages one pair of thresholds") {
    LinkageRule r1 = simple_rule("p", "p", Measure::Levenshtein, 1.0);
    LinkageRule r2 = simple_rule("p", "p", Measure::Levenshtein, 3.0);
    Rng rng(1);
    LinkageRule child = crossover_threshold(r1, r2, rng);
    CHECK(thresholds_of(child) == std::set<double>{2.0});
    CHECK(thresholds_of(r1) == std::set<double>{1.0});  // parents untouched
}

TEST_CASE("weight crossover averages one pair of weights") {
    LinkageRule r1 = simple_rule("p", "p", Measure::Levenshtein, 1.0);
    LinkageRule r2 = simple_rule("p", "p", Measure::Levenshtein, 1.0);
    r1.root.aggregation().operands[0].set_weight(1.0);
    r2.root.aggregation().operands[0].set_weight(5.0);
    bool averaged = false;
    Rng rng(2);
    for (int i = 0; i < 50 && !averaged; ++i) {
        LinkageRule child = crossover_weight(r1, r2, rng);
        double w = child.root.aggregation().operands[0].weight();
        CHECK((w == 1.0 || w == 3.0));  // picked the root or the comparison
        averaged |= (w == 3.0);
    }
    CHECK(averaged);
}

TEST_CASE("operators crossover recombines operand subsets") {
    LinkageRule r1 = two_comparisons(1.0, 0.25);
    LinkageRule r2 = two_comparisons(7.0, 0.75);
    Rng rng(3);
    bool saw_keep_all = false, saw_singleton = false;
    for (int i = 0; i < 300; ++i) {
        LinkageRule child = crossover_operators(r1, r2, rng);
        REQUIRE(validate(child).ok());
        std::size_t n = child.root.aggregation().operands.size();
        REQUIRE(n >= 1);
        REQUIRE(n <= 4);
        if (n == 4) saw_keep_all = true;
        if (n == 1) saw_singleton = true;
        // every operand is a copy of an operand of one parent
        for (double t : thresholds_of(child))
            CHECK((t == 1.0 || t == 0.25 || t == 7.0 || t == 0.75));
    }
    CHECK(saw_keep_all);
    CHECK(saw_singleton);
}

TEST_CASE("function crossover only swaps functions of matching arity") {
    LinkageRule r1{cmp(tf(TransformFn::LowerCase, {prop(Source::A, "p")}),
                       prop(Source::B, "p"), Measure::Levenshtein, 1.0)};
    LinkageRule r2{cmp(
        tf(TransformFn::Concatenate, {prop(Source::A, "x"), prop(Source::A, "y")}),
        prop(Source::B, "p"), Measure::Numeric, 1.0)};
    Rng rng(4);
    bool saw_measure_swap = false;
    for (int i = 0; i < 200; ++i) {
        LinkageRule child = crossover_function(r1, r2, rng);
        REQUIRE(validate(child).ok());
        // the only transform donor has arity 2, so the unary slot never changes
        CHECK(child.root.comparison().left.transform().fn == TransformFn::LowerCase);
        if (child.root.comparison().measure == Measure::Numeric) saw_measure_swap = true;
    }
    CHECK(saw_measure_swap);

    // aggregation function swap between aggregation roots
    LinkageRule a1 = two_comparisons(1.0, 0.5);
    LinkageRule a2 = two_comparisons(1.0, 0.5);
    a2.root.aggregation().fn = AggregateFn::WMean;
    bool saw_fn_swap = false;
    for (int i = 0; i < 200 && !saw_fn_swap; ++i)
        saw_fn_swap = crossover_function(a1, a2, rng).root.aggregation().fn ==
                      AggregateFn::WMean;
    CHECK(saw_fn_swap);
}

TEST_CASE("aggregation crossover transplants whole similarity subtrees") {
    LinkageRule r1 = two_comparisons(1.0, 0.5);
    LinkageRule r2{agg(AggregateFn::WMean,
                       {cmp(prop(Source::A, "z"), prop(Source::B, "z"),
                            Measure::Date, 30.0)})};
    Rng rng(5);
    bool saw_date = false;
    for (int i = 0; i < 100; ++i) {
        LinkageRule child = crossover_aggregation(r1, r2, rng);
        REQUIRE(validate(child).ok());
        for (const SimilarityNode* s : similarity_nodes(child))
            if (s->is_comparison() && s->comparison().measure == Measure::Date)
                saw_date = true;
    }
    CHECK(saw_date);
}

TEST_CASE("transformation crossover splices chains and collapses duplicates") {
    // r1: lowerCase(tokenize(p)); r2: tokenize(lowerCase(q))
    LinkageRule r1{cmp(
        tf(TransformFn::LowerCase, {tf(TransformFn::Tokenize, {prop(Source::A, "p")})}),
        prop(Source::B, "p"), Measure::Levenshtein, 1.0)};
    LinkageRule r2{cmp(
        tf(TransformFn::Tokenize, {tf(TransformFn::LowerCase, {prop(Source::A, "q")})}),
        prop(Source::B, "q"), Measure::Levenshtein, 1.0)};
    Rng rng(6);
    bool changed = false;
    for (int i = 0; i < 300; ++i) {
        LinkageRule child = crossover_transformation(r1, r2, rng);
        REQUIRE_MESSAGE(validate(child).ok(), serialize(child));
        if (!(child == r1)) changed = true;
        // no immediate duplicate unary transforms survive
        for (const ValueSlot& slot : value_nodes(child)) {
            if (!slot.node->is_transform()) continue;
            const TransformNode& t = slot.node->transform();
            if (t.inputs.size() == 1 && t.inputs[0].is_transform())
                CHECK(t.inputs[0].transform().fn != t.fn);
        }
        // spliced leaves adopt the side they land on
        for (const ValueSlot& slot : value_nodes(child))
            if (slot.node->is_property())
                CHECK(slot.node->property().source == slot.side);
    }
    CHECK(changed);
}

TEST_CASE("missing node kinds fall back to a copy of the first parent") {
    LinkageRule plain = simple_rule("p", "p", Measure::Levenshtein, 1.0);
    LinkageRule other = simple_rule("q", "q", Measure::Jaccard, 0.5);
    Rng rng(7);
    // no transforms anywhere: transformation crossover must return r1
    for (int i = 0; i < 20; ++i)
        CHECK(crossover_transformation(plain, other, rng) == plain);
}

TEST_CASE("subtree crossover rewrites sources when material crosses sides") {
    LinkageRule r1{cmp(tf(TransformFn::LowerCase, {prop(Source::A, "p")}),
                       prop(Source::B, "p"), Measure::Levenshtein, 1.0)};
    LinkageRule r2 = two_comparisons(2.0, 0.5);
    Rng rng(8);
    for (int i = 0; i < 500; ++i) {
        LinkageRule child = crossover_subtree(r1, r2, rng);
        REQUIRE_MESSAGE(validate(child).ok(), serialize(child));
    }
}

TEST_CASE("breeding preserves grammar, mode and population size over 10k children") {
    SyntheticDataset data = make_conjunctive_dataset(6);
    auto links = resolve_links(data.links, data.a, data.b);
    SeedingContext ctx;
    ctx.pairs = {{"title", "title", Measure::Levenshtein},
                 {"year", "year", Measure::Numeric}};
    LearnerConfig cfg;
    cfg.population_size = 50;

    for (CrossoverStrategy strategy :
         {CrossoverStrategy::Specialized, CrossoverStrategy::Subtree}) {
        for (RepresentationMode mode :
             {RepresentationMode::Full, RepresentationMode::Boolean,
              RepresentationMode::Linear, RepresentationMode::Nonlinear}) {
            cfg.crossover = strategy;
            cfg.mode = mode;
            ctx.mode = mode;
            Rng rng(1000 + static_cast<int>(mode));
            std::vector<LinkageRule> population;
            for (std::size_t i = 0; i < cfg.population_size; ++i)
                population.push_back(random_rule(ctx, rng));
            for (int gen = 0; gen < 30; ++gen) {
                auto reports = evaluate_population(population, links, 0.05, 1);
                population = breed(population, reports, cfg, ctx, rng);
                REQUIRE(population.size() == cfg.population_size);
                for (const LinkageRule& r : population) {
                    REQUIRE_MESSAGE(validate(r).ok(), serialize(r));
                    REQUIRE(mode_allows(r, mode));
                }
            }
        }
    }
}
