#include "genlink/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "genlink/eval.hpp"

namespace genlink {

bool parse_representation_mode(const std::string& name, RepresentationMode& out) {
    if (name == "boolean") out = RepresentationMode::Boolean;
    else if (name == "linear") out = RepresentationMode::Linear;
    else if (name == "nonlinear") out = RepresentationMode::Nonlinear;
    else if (name == "full") out = RepresentationMode::Full;
    else return false;
    return true;
}

const char* to_string(RepresentationMode mode) {
    switch (mode) {
        case RepresentationMode::Boolean: return "boolean";
        case RepresentationMode::Linear: return "linear";
        case RepresentationMode::Nonlinear: return "nonlinear";
        case RepresentationMode::Full: return "full";
    }
    return "?";
}

void LearnerConfig::check() const {
    if (std::abs(p_crossover + p_mutation - 1.0) > 1e-9)
        throw DataError("p_crossover + p_mutation must equal 1");
    if (tournament_size < 1) throw DataError("tournament_size must be at least 1");
    if (population_size <= tournament_size)
        throw DataError("population_size must exceed tournament_size");
    if (seed_measures.empty()) throw DataError("seed_measures must not be empty");
    for (Measure m : seed_measures)
        if (!seed_thresholds.count(m))
            throw DataError(fmt::format("no seeding threshold for measure {}", to_string(m)));
}

LearnerConfig load_learner_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot read {}", path));
    LearnerConfig config;
    std::string line;
    std::size_t lineno = 0;
    bool measures_set = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        // trim
        auto is_space = [](char c) { return c == ' ' || c == '\t'; };
        while (!line.empty() && is_space(line.front())) line.erase(line.begin());
        while (!line.empty() && is_space(line.back())) line.pop_back();
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(fmt::format("{}:{}: expected key=value", path, lineno));
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && is_space(key.back())) key.pop_back();
        while (!value.empty() && is_space(value.front())) value.erase(value.begin());

        auto bad = [&](const std::string& msg) -> DataError {
            return DataError(fmt::format("{}:{}: {}", path, lineno, msg));
        };
        auto as_size = [&] {
            try {
                return static_cast<std::size_t>(std::stoull(value));
            } catch (...) {
                throw bad(fmt::format("invalid integer '{}'", value));
            }
        };
        auto as_double = [&] {
            try {
                return std::stod(value);
            } catch (...) {
                throw bad(fmt::format("invalid number '{}'", value));
            }
        };

        if (key == "population_size") config.population_size = as_size();
        else if (key == "max_iterations") config.max_iterations = as_size();
        else if (key == "tournament_size") config.tournament_size = as_size();
        else if (key == "p_crossover") config.p_crossover = as_double();
        else if (key == "p_mutation") config.p_mutation = as_double();
        else if (key == "penalty_per_operator") config.penalty_per_operator = as_double();
        else if (key == "threads") config.threads = as_size();
        else if (key == "rng_seed") {
            try {
                config.rng_seed = std::stoull(value);
            } catch (...) {
                throw bad(fmt::format("invalid seed '{}'", value));
            }
        } else if (key == "representation_mode") {
            if (!parse_representation_mode(value, config.mode))
                throw bad(fmt::format("unknown representation mode '{}'", value));
        } else if (key == "crossover") {
            if (value == "specialized") config.crossover = CrossoverStrategy::Specialized;
            else if (value == "subtree") config.crossover = CrossoverStrategy::Subtree;
            else throw bad(fmt::format("unknown crossover strategy '{}'", value));
        } else if (key == "seed_measures") {
            config.seed_measures.clear();
            measures_set = true;
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                while (!item.empty() && is_space(item.front())) item.erase(item.begin());
                while (!item.empty() && is_space(item.back())) item.pop_back();
                Measure m;
                if (!parse_measure(item, m)) throw bad(fmt::format("unknown measure '{}'", item));
                config.seed_measures.push_back(m);
            }
        } else if (key.starts_with("seed_threshold_")) {
            Measure m;
            if (!parse_measure(key.substr(15), m))
                throw bad(fmt::format("unknown measure in key '{}'", key));
            config.seed_thresholds[m] = as_double();
        } else {
            throw bad(fmt::format("unknown key '{}'", key));
        }
    }
    // Default thresholds for any measure added without an explicit one.
    ThresholdRanges defaults;
    if (measures_set)
        for (Measure m : config.seed_measures)
            if (!config.seed_thresholds.count(m))
                config.seed_thresholds[m] = m == Measure::Levenshtein ? 1.0 : defaults.max_for(m);
    config.check();
    return config;
}

std::vector<LinkedPair> resolve_links(const ReferenceLinkSet& links, const EntitySource& a,
                                      const EntitySource& b) {
    std::vector<LinkedPair> out;
    out.reserve(links.positive.size() + links.negative.size());
    auto resolve = [&](const Link& link, bool positive) {
        const Entity* ea = a.find(link.first);
        const Entity* eb = b.find(link.second);
        if (!ea) throw DataError(fmt::format("unknown id '{}' in source A", link.first));
        if (!eb) throw DataError(fmt::format("unknown id '{}' in source B", link.second));
        out.push_back({ea, eb, positive});
    };
    for (const Link& l : links.positive) resolve(l, true);
    for (const Link& l : links.negative) resolve(l, false);
    return out;
}

std::vector<CompatiblePair> find_compatible_properties(
    const std::vector<LinkedPair>& links, const std::vector<Measure>& measures,
    const std::map<Measure, double>& thresholds) {
    std::set<CompatiblePair> pairs;
    for (const LinkedPair& link : links) {
        if (!link.positive) continue;
        for (const auto& [pa, values_a] : link.a->properties) {
            ValueSet lower_a = transform_lower_case(values_a);
            ValueSet tokens_a = transform_tokenize(lower_a);
            for (const auto& [pb, values_b] : link.b->properties) {
                ValueSet lower_b = transform_lower_case(values_b);
                ValueSet tokens_b = transform_tokenize(lower_b);
                for (Measure m : measures) {
                    // Tokenizing destroys the syntax of typed values, so the
                    // numeric/spatial/temporal measures see the whole values.
                    bool char_measure = m == Measure::Levenshtein || m == Measure::Jaccard;
                    const ValueSet& va = char_measure ? tokens_a : lower_a;
                    const ValueSet& vb = char_measure ? tokens_b : lower_b;
                    std::optional<double> d = distance(m, va, vb);
                    if (d && *d < thresholds.at(m)) pairs.insert({pa, pb, m});
                }
            }
        }
    }
    return {pairs.begin(), pairs.end()};
}

double ThresholdRanges::max_for(Measure m) const {
    switch (m) {
        case Measure::Levenshtein: return levenshtein;
        case Measure::Jaccard: return jaccard;
        case Measure::Numeric: return numeric;
        case Measure::Geographic: return geographic;
        case Measure::Date: return date;
    }
    return 1.0;
}

ThresholdRanges observe_threshold_ranges(const EntitySource& a, const EntitySource& b) {
    ThresholdRanges ranges;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const EntitySource* src : {&a, &b})
        for (const Entity& e : src->entities())
            for (const auto& [_, values] : e.properties)
                for (const std::string& v : values) {
                    double x;
                    if (!parse_numeric(v, x)) continue;
                    lo = std::min(lo, x);
                    hi = std::max(hi, x);
                }
    if (hi > lo) ranges.numeric = std::max(1e-9, 0.1 * (hi - lo));
    return ranges;
}

namespace {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t pick_index(std::size_t n, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
    return v[pick_index(v.size(), rng)];
}

double draw_threshold(Measure m, const ThresholdRanges& ranges, Rng& rng) {
    double hi = ranges.max_for(m);
    double lo = hi / 1000.0;
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

ValueNode maybe_wrap_transform(ValueNode value, RepresentationMode mode, Rng& rng) {
    if (mode != RepresentationMode::Full) return value;
    if (uniform01(rng) >= 0.5) return value;
    TransformFn fn = pick<TransformFn>(
        {TransformFn::LowerCase, TransformFn::Tokenize, TransformFn::StripUriPrefix}, rng);
    TransformNode t{fn, {std::move(value)}};
    return ValueNode{std::move(t)};
}

}  // namespace

LinkageRule random_rule(const SeedingContext& ctx, Rng& rng) {
    if (ctx.pairs.empty()) throw DataError("seeding produced no compatible properties");
    AggregationNode root;
    switch (ctx.mode) {
        case RepresentationMode::Boolean:
            root.fn = pick<AggregateFn>({AggregateFn::Min, AggregateFn::Max}, rng);
            break;
        case RepresentationMode::Linear:
            root.fn = AggregateFn::WMean;
            break;
        default:
            root.fn = pick<AggregateFn>({AggregateFn::Min, AggregateFn::Max, AggregateFn::WMean},
                                        rng);
            break;
    }
    std::size_t n_cmp = 1 + (uniform01(rng) < 0.5 ? 1 : 0);
    for (std::size_t i = 0; i < n_cmp; ++i) {
        const CompatiblePair& pair = pick(ctx.pairs, rng);
        ComparisonNode cmp;
        cmp.measure = pair.measure;
        cmp.threshold = draw_threshold(pair.measure, ctx.ranges, rng);
        cmp.left = maybe_wrap_transform(ValueNode{PropertyNode{Source::A, pair.property_a}},
                                        ctx.mode, rng);
        cmp.right = maybe_wrap_transform(ValueNode{PropertyNode{Source::B, pair.property_b}},
                                         ctx.mode, rng);
        root.operands.push_back(SimilarityNode{std::move(cmp)});
    }
    return LinkageRule{SimilarityNode{std::move(root)}};
}

FitnessReport fitness(const LinkageRule& rule, const std::vector<LinkedPair>& links,
                      double penalty_per_operator) {
    FitnessReport report;
    for (const LinkedPair& link : links) {
        bool matched = is_match(rule, *link.a, *link.b);
        if (link.positive)
            matched ? ++report.confusion.tp : ++report.confusion.fn;
        else
            matched ? ++report.confusion.fp : ++report.confusion.tn;
    }
    report.mcc = mcc(report.confusion);
    report.operator_count = count_operators(rule);
    report.fitness = report.mcc - penalty_per_operator * static_cast<double>(report.operator_count);
    report.train_f1 = f1(report.confusion);
    return report;
}

std::vector<FitnessReport> evaluate_population(const std::vector<LinkageRule>& population,
                                               const std::vector<LinkedPair>& links,
                                               double penalty_per_operator, std::size_t threads) {
    std::vector<FitnessReport> reports(population.size());
    std::size_t workers = std::min<std::size_t>(std::max<std::size_t>(threads, 1),
                                                population.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < population.size(); ++i)
            reports[i] = fitness(population[i], links, penalty_per_operator);
        return reports;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < population.size(); i += workers)
                reports[i] = fitness(population[i], links, penalty_per_operator);
        });
    }
    for (std::thread& t : pool) t.join();
    return reports;
}

namespace {

bool better(const FitnessReport& x, const FitnessReport& y) {
    if (x.fitness != y.fitness) return x.fitness > y.fitness;
    return x.operator_count < y.operator_count;
}

}  // namespace

std::size_t tournament_select(const std::vector<FitnessReport>& reports, std::size_t size,
                              Rng& rng) {
    std::size_t best = pick_index(reports.size(), rng);
    for (std::size_t i = 1; i < size; ++i) {
        std::size_t candidate = pick_index(reports.size(), rng);
        if (better(reports[candidate], reports[best])) best = candidate;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Crossover operators

namespace {

std::vector<ComparisonNode*> comparison_nodes(LinkageRule& rule) {
    std::vector<ComparisonNode*> out;
    for_each_similarity(rule.root, [&](SimilarityNode& s) {
        if (s.is_comparison()) out.push_back(&s.comparison());
    });
    return out;
}

std::vector<const ComparisonNode*> comparison_nodes(const LinkageRule& rule) {
    std::vector<const ComparisonNode*> out;
    for_each_similarity(rule.root, [&](const SimilarityNode& s) {
        if (s.is_comparison()) out.push_back(&s.comparison());
    });
    return out;
}

std::vector<AggregationNode*> aggregation_nodes(LinkageRule& rule) {
    std::vector<AggregationNode*> out;
    for_each_similarity(rule.root, [&](SimilarityNode& s) {
        if (s.is_aggregation()) out.push_back(&s.aggregation());
    });
    return out;
}

std::vector<const AggregationNode*> aggregation_nodes(const LinkageRule& rule) {
    std::vector<const AggregationNode*> out;
    for_each_similarity(rule.root, [&](const SimilarityNode& s) {
        if (s.is_aggregation()) out.push_back(&s.aggregation());
    });
    return out;
}

std::vector<ValueNode*> transform_slots(LinkageRule& rule) {
    std::vector<ValueNode*> out;
    for (const ValueSlot& slot : value_nodes(rule))
        if (slot.node->is_transform()) out.push_back(slot.node);
    return out;
}

std::vector<const ValueNode*> transform_slots(const LinkageRule& rule) {
    std::vector<const ValueNode*> out;
    for (const ConstValueSlot& slot : value_nodes(rule))
        if (slot.node->is_transform()) out.push_back(slot.node);
    return out;
}

std::vector<ValueNode*> transform_slots_within(ValueNode& root) {
    std::vector<ValueNode*> out;
    for_each_value(root, [&](ValueNode& v) {
        if (v.is_transform()) out.push_back(&v);
    });
    return out;
}

std::vector<const ValueNode*> transform_slots_within(const ValueNode& root) {
    std::vector<const ValueNode*> out;
    for_each_value(root, [&](const ValueNode& v) {
        if (v.is_transform()) out.push_back(&v);
    });
    return out;
}

/// Index trail from `from` down to `to` through transform inputs; empty when
/// from == to. Returns false if `to` is not in the subtree.
bool path_to(const ValueNode& from, const ValueNode* to, std::vector<std::size_t>& trail) {
    if (&from == to) return true;
    if (!from.is_transform()) return false;
    const auto& inputs = from.transform().inputs;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        trail.push_back(i);
        if (path_to(inputs[i], to, trail)) return true;
        trail.pop_back();
    }
    return false;
}

ValueNode* follow(ValueNode& from, const std::vector<std::size_t>& trail) {
    ValueNode* cur = &from;
    for (std::size_t i : trail) cur = &cur->transform().inputs[i];
    return cur;
}

void rewrite_sources(ValueNode& v, Source side) {
    for_each_value(v, [&](ValueNode& n) {
        if (n.is_property()) n.property().source = side;
    });
}

void rewrite_sources(SimilarityNode& s) {
    for_each_similarity(s, [](SimilarityNode& node) {
        if (!node.is_comparison()) return;
        rewrite_sources(node.comparison().left, Source::A);
        rewrite_sources(node.comparison().right, Source::B);
    });
}

/// Collapses chains where a unary transformation directly feeds an identical
/// one (e.g. lowerCase(lowerCase(x)) -> lowerCase(x)).
void remove_duplicate_transforms(ValueNode& v) {
    if (!v.is_transform()) return;
    for (ValueNode& in : v.transform().inputs) remove_duplicate_transforms(in);
    while (v.transform().inputs.size() == 1 && v.transform().inputs[0].is_transform() &&
           v.transform().inputs[0].transform().fn == v.transform().fn) {
        ValueNode child = std::move(v.transform().inputs[0]);
        v = std::move(child);
    }
}

void remove_duplicate_transforms(LinkageRule& rule) {
    for_each_similarity(rule.root, [](SimilarityNode& s) {
        if (!s.is_comparison()) return;
        remove_duplicate_transforms(s.comparison().left);
        remove_duplicate_transforms(s.comparison().right);
    });
}

}  // namespace

LinkageRule crossover_function(const LinkageRule& r1, const LinkageRule& r2, Rng& rng) {
    LinkageRule child = r1;
    switch (pick_index(3, rng)) {
        case 0: {  // transformation function
            std::vector<ValueNode*> own = transform_slots(child);
            if (own.empty()) return child;
            ValueNode* target = pick(own, rng);
            // Only functions of matching arity keep the tree well formed.
            std::vector<TransformFn> donors;
            for (const ValueNode* t : transform_slots(r2))
                if (transform_arity(t->transform().fn) == target->transform().inputs.size())
                    donors.push_back(t->transform().fn);
            if (donors.empty()) return child;
            target->transform().fn = pick(donors, rng);
            break;
        }
        case 1: {  // distance function
            std::vector<ComparisonNode*> own = comparison_nodes(child);
            std::vector<const ComparisonNode*> other = comparison_nodes(r2);
            if (own.empty() || other.empty()) return child;
            pick(own, rng)->measure = pick(other, rng)->measure;
            break;
        }
        default: {  // aggregation function
            std::vector<AggregationNode*> own = aggregation_nodes(child);
            std::vector<const AggregationNode*> other = aggregation_nodes(r2);
            if (own.empty() || other.empty()) return child;
            pick(own, rng)->fn = pick(other, rng)->fn;
            break;
        }
    }
    return child;
}

LinkageRule crossover_operators(const LinkageRule& r1, const LinkageRule& r2, Rng& rng) {
    LinkageRule child = r1;
    std::vector<AggregationNode*> own = aggregation_nodes(child);
    std::vector<const AggregationNode*> other = aggregation_nodes(r2);
    if (own.empty() || other.empty()) return child;
    AggregationNode* target = pick(own, rng);
    const AggregationNode* donor = pick(other, rng);

    std::vector<SimilarityNode> candidates = target->operands;  // copies; subtrees travel whole
    candidates.insert(candidates.end(), donor->operands.begin(), donor->operands.end());
    std::vector<SimilarityNode> kept;
    for (SimilarityNode& op : candidates)
        if (uniform01(rng) < 0.5) kept.push_back(std::move(op));
    if (kept.empty()) kept.push_back(pick(candidates, rng));
    target->operands = std::move(kept);
    return child;
}

LinkageRule crossover_aggregation(const LinkageRule& r1, const LinkageRule& r2, Rng& rng) {
    LinkageRule child = r1;
    std::vector<SimilarityNode*> own = similarity_nodes(child);
    std::vector<const SimilarityNode*> other = similarity_nodes(r2);
    SimilarityNode* target = pick(own, rng);
    *target = *pick(other, rng);
    return child;
}

LinkageRule crossover_transformation(const LinkageRule& r1, const LinkageRule& r2, Rng& rng) {
    LinkageRule child = r1;
    std::vector<ValueNode*> own = transform_slots(child);
    std::vector<const ValueNode*> other = transform_slots(r2);
    if (own.empty() || other.empty()) return r1;

    ValueNode* upper1 = pick(own, rng);
    ValueNode* lower1 = pick(transform_slots_within(*upper1), rng);
    const ValueNode* upper2 = pick(other, rng);
    const ValueNode* lower2 = pick(transform_slots_within(*upper2), rng);

    std::vector<std::size_t> trail;
    path_to(*upper2, lower2, trail);

    // Inputs that hang below the spliced path keep their original side; the
    // spliced nodes themselves may come from the other side of r2.
    std::vector<ValueNode> reattached = lower1->transform().inputs;
    ValueNode replacement = *upper2;
    ValueNode* lower_copy = follow(replacement, trail);
    if (lower_copy->transform().inputs.size() != reattached.size())
        return r1;  // arity mismatch between the splice point and the old inputs

    Source side = Source::A;
    for (const ValueSlot& slot : value_nodes(child))
        if (slot.node == upper1) side = slot.side;
    rewrite_sources(replacement, side);
    lower_copy->transform().inputs = std::move(reattached);
    *upper1 = std::move(replacement);
    remove_duplicate_transforms(child);
    return child;
}

LinkageRule crossover_threshold(const LinkageRule& r1, const LinkageRule& r2, Rng& rng) {
    LinkageRule child = r1;
    std::vector<ComparisonNode*> own = comparison_nodes(child);
    std::vector<const ComparisonNode*> other = comparison_nodes(r2);
    if (own.empty() || other.empty()) return child;
    ComparisonNode* target = pick(own, rng);
    target->threshold = 0.5 * (target->threshold + pick(other, rng)->threshold);
    return child;
}

LinkageRule crossover_weight(const LinkageRule& r1, const LinkageRule& r2, Rng& rng) {
    LinkageRule child = r1;
    std::vector<SimilarityNode*> own = similarity_nodes(child);
    std::vector<const SimilarityNode*> other = similarity_nodes(r2);
    SimilarityNode* target = pick(own, rng);
    target->set_weight(0.5 * (target->weight() + pick(other, rng)->weight()));
    return child;
}

LinkageRule crossover_subtree(const LinkageRule& r1, const LinkageRule& r2, Rng& rng) {
    LinkageRule child = r1;
    std::vector<SimilarityNode*> sim1 = similarity_nodes(child);
    std::vector<ValueSlot> val1 = value_nodes(child);
    // Crossover point uniform over all nodes of r1.
    std::size_t point = pick_index(sim1.size() + val1.size(), rng);
    if (point < sim1.size()) {
        std::vector<const SimilarityNode*> sim2 = similarity_nodes(r2);
        *sim1[point] = *pick(sim2, rng);
        rewrite_sources(child.root);
        return child;
    }
    const ValueSlot& slot = val1[point - sim1.size()];
    std::vector<ConstValueSlot> val2 = value_nodes(r2);
    if (val2.empty()) return child;
    ValueNode replacement = *pick(val2, rng).node;
    rewrite_sources(replacement, slot.side);
    *slot.node = std::move(replacement);
    return child;
}

LinkageRule apply_random_crossover(const LinkageRule& r1, const LinkageRule& r2,
                                   CrossoverStrategy strategy, Rng& rng) {
    if (strategy == CrossoverStrategy::Subtree) return crossover_subtree(r1, r2, rng);
    switch (pick_index(6, rng)) {
        case 0: return crossover_function(r1, r2, rng);
        case 1: return crossover_operators(r1, r2, rng);
        case 2: return crossover_aggregation(r1, r2, rng);
        case 3: return crossover_transformation(r1, r2, rng);
        case 4: return crossover_threshold(r1, r2, rng);
        default: return crossover_weight(r1, r2, rng);
    }
}

namespace {

ValueNode strip_transforms(const ValueNode& v) {
    if (v.is_property()) return v;
    return strip_transforms(v.transform().inputs.front());
}

}  // namespace

bool mode_allows(const LinkageRule& rule, RepresentationMode mode) {
    if (mode == RepresentationMode::Full) return true;
    bool ok = true;
    for (const ConstValueSlot& slot : value_nodes(rule))
        if (slot.node->is_transform()) ok = false;
    if (mode == RepresentationMode::Nonlinear) return ok;
    // boolean / linear: a single flat aggregation over comparisons
    if (!rule.root.is_aggregation()) return false;
    const AggregationNode& root = rule.root.aggregation();
    for (const SimilarityNode& op : root.operands)
        if (!op.is_comparison()) ok = false;
    if (mode == RepresentationMode::Linear && root.fn != AggregateFn::WMean) ok = false;
    if (mode == RepresentationMode::Boolean && root.fn == AggregateFn::WMean) ok = false;
    return ok;
}

LinkageRule repair_for_mode(LinkageRule rule, RepresentationMode mode) {
    if (mode == RepresentationMode::Full) return rule;
    for_each_similarity(rule.root, [](SimilarityNode& s) {
        if (!s.is_comparison()) return;
        s.comparison().left = strip_transforms(s.comparison().left);
        s.comparison().right = strip_transforms(s.comparison().right);
    });
    if (mode == RepresentationMode::Nonlinear) return rule;

    // Flatten every comparison into a single root aggregation.
    AggregationNode flat;
    if (mode == RepresentationMode::Linear) {
        flat.fn = AggregateFn::WMean;
    } else {
        flat.fn = AggregateFn::Min;
        if (rule.root.is_aggregation() && rule.root.aggregation().fn != AggregateFn::WMean)
            flat.fn = rule.root.aggregation().fn;
    }
    for_each_similarity(rule.root, [&](const SimilarityNode& s) {
        if (s.is_comparison()) flat.operands.push_back(s);
    });
    rule.root = SimilarityNode{std::move(flat)};
    return rule;
}

std::vector<LinkageRule> breed(const std::vector<LinkageRule>& population,
                               const std::vector<FitnessReport>& reports,
                               const LearnerConfig& config, const SeedingContext& ctx, Rng& rng) {
    std::vector<LinkageRule> next;
    next.reserve(population.size());
    while (next.size() < population.size()) {
        const LinkageRule& r1 = population[tournament_select(reports, config.tournament_size, rng)];
        const LinkageRule& r2 = population[tournament_select(reports, config.tournament_size, rng)];
        LinkageRule child;
        if (uniform01(rng) < config.p_mutation) {
            LinkageRule fresh = random_rule(ctx, rng);
            child = apply_random_crossover(r1, fresh, config.crossover, rng);
        } else {
            child = apply_random_crossover(r1, r2, config.crossover, rng);
        }
        next.push_back(repair_for_mode(std::move(child), config.mode));
    }
    return next;
}

LearnResult learn(const ReferenceLinkSet& train, const EntitySource& a, const EntitySource& b,
                  const LearnerConfig& config, bool measure_time) {
    config.check();
    if (train.positive.empty() || train.negative.empty())
        throw DataError("training requires positive and negative reference links");
    std::vector<LinkedPair> links = resolve_links(train, a, b);

    SeedingContext ctx;
    ctx.mode = config.mode;
    ctx.ranges = observe_threshold_ranges(a, b);
    ctx.pairs = find_compatible_properties(links, config.seed_measures, config.seed_thresholds);
    if (ctx.pairs.empty()) {
        // Unseeded baseline: every property pair with the levenshtein measure.
        for (const std::string& pa : a.property_names())
            for (const std::string& pb : b.property_names())
                ctx.pairs.push_back({pa, pb, Measure::Levenshtein});
    }
    if (ctx.pairs.empty()) throw DataError("sources carry no properties to seed from");

    Rng rng(config.rng_seed);
    auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        if (!measure_time) return 0.0;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    std::vector<LinkageRule> population;
    population.reserve(config.population_size);
    for (std::size_t i = 0; i < config.population_size; ++i)
        population.push_back(repair_for_mode(random_rule(ctx, rng), config.mode));
    std::vector<FitnessReport> reports =
        evaluate_population(population, links, config.penalty_per_operator, config.threads);

    LearnResult result;
    result.seeded_pairs = ctx.pairs;
    auto best_index = [&] {
        std::size_t best = 0;
        for (std::size_t i = 1; i < reports.size(); ++i)
            if (better(reports[i], reports[best])) best = i;
        return best;
    };
    auto record = [&](std::size_t iteration) {
        double top_f1 = 0.0;
        for (const FitnessReport& r : reports) top_f1 = std::max(top_f1, r.train_f1);
        result.history.push_back({iteration, elapsed(), top_f1, population[best_index()]});
    };
    record(0);

    for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
        if (result.history.back().best_train_f1 >= 1.0) break;  // full F-measure reached
        population = breed(population, reports, config, ctx, rng);
        reports = evaluate_population(population, links, config.penalty_per_operator,
                                      config.threads);
        record(iter);
    }
    result.best = population[best_index()];
    return result;
}

}  // namespace genlink
