#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace genlink {

enum class Source { A, B };

// Closed function inventories. The grammar is strongly typed: value operators
// feed comparisons, similarity operators feed aggregations.
enum class TransformFn { LowerCase, Tokenize, StripUriPrefix, Concatenate };
enum class Measure { Levenshtein, Jaccard, Numeric, Geographic, Date };
enum class AggregateFn { Min, Max, WMean };

const char* to_string(Source s);
const char* to_string(TransformFn f);
const char* to_string(Measure m);
const char* to_string(AggregateFn f);

bool parse_transform_fn(const std::string& name, TransformFn& out);
bool parse_measure(const std::string& name, Measure& out);
bool parse_aggregate_fn(const std::string& name, AggregateFn& out);

/// concatenate takes exactly 2 inputs, the rest exactly 1.
std::size_t transform_arity(TransformFn f);

struct ValueNode;

struct PropertyNode {
    Source source = Source::A;
    std::string property;

    bool operator==(const PropertyNode&) const = default;
};

struct TransformNode {
    TransformFn fn = TransformFn::LowerCase;
    std::vector<ValueNode> inputs;

    bool operator==(const TransformNode&) const = default;
};

/// A value operator: yields a set of strings for one entity.
struct ValueNode {
    std::variant<PropertyNode, TransformNode> node;

    bool is_property() const { return node.index() == 0; }
    bool is_transform() const { return node.index() == 1; }
    PropertyNode& property() { return std::get<PropertyNode>(node); }
    const PropertyNode& property() const { return std::get<PropertyNode>(node); }
    TransformNode& transform() { return std::get<TransformNode>(node); }
    const TransformNode& transform() const { return std::get<TransformNode>(node); }

    bool operator==(const ValueNode&) const = default;
};

struct SimilarityNode;

/// Thresholded distance comparison: score = 1 - d/theta if d <= theta, else 0.
struct ComparisonNode {
    ValueNode left;   // reads source A
    ValueNode right;  // reads source B
    Measure measure = Measure::Levenshtein;
    double threshold = 1.0;
    double weight = 1.0;

    bool operator==(const ComparisonNode&) const = default;
};

struct AggregationNode {
    AggregateFn fn = AggregateFn::Min;
    std::vector<SimilarityNode> operands;
    double weight = 1.0;

    bool operator==(const AggregationNode&) const = default;
};

/// A similarity operator: scores an entity pair in [0,1]. The weight is the
/// node's weight within its parent aggregation (ignored at the root).
struct SimilarityNode {
    std::variant<ComparisonNode, AggregationNode> node;

    bool is_comparison() const { return node.index() == 0; }
    bool is_aggregation() const { return node.index() == 1; }
    ComparisonNode& comparison() { return std::get<ComparisonNode>(node); }
    const ComparisonNode& comparison() const { return std::get<ComparisonNode>(node); }
    AggregationNode& aggregation() { return std::get<AggregationNode>(node); }
    const AggregationNode& aggregation() const { return std::get<AggregationNode>(node); }

    double weight() const {
        return is_comparison() ? comparison().weight : aggregation().weight;
    }
    void set_weight(double w) {
        if (is_comparison())
            comparison().weight = w;
        else
            aggregation().weight = w;
    }

    bool operator==(const SimilarityNode&) const = default;
};

struct LinkageRule {
    SimilarityNode root;

    bool operator==(const LinkageRule&) const = default;
};

struct Violation {
    std::string path;     // e.g. "root.operands[1].left.inputs[0]"
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks every node against the grammar: arities, non-negative finite
/// thresholds, positive weights, non-empty property names, and the source
/// discipline (all leaves under `left` read A, under `right` read B).
ValidationReport validate(const LinkageRule& rule);

/// Total node count across all four operator kinds (parsimony penalty base).
std::size_t count_operators(const LinkageRule& rule);

// Tree traversal helpers shared by the evaluator, the serializer and the
// crossover operators. Mutable overloads visit a rule being edited in place.

template <typename F>
void for_each_value(const ValueNode& v, F&& f) {
    f(v);
    if (v.is_transform())
        for (const ValueNode& in : v.transform().inputs) for_each_value(in, f);
}

template <typename F>
void for_each_value(ValueNode& v, F&& f) {
    f(v);
    if (v.is_transform())
        for (ValueNode& in : v.transform().inputs) for_each_value(in, f);
}

template <typename F>
void for_each_similarity(const SimilarityNode& s, F&& f) {
    f(s);
    if (s.is_aggregation())
        for (const SimilarityNode& op : s.aggregation().operands) for_each_similarity(op, f);
}

template <typename F>
void for_each_similarity(SimilarityNode& s, F&& f) {
    f(s);
    if (s.is_aggregation())
        for (SimilarityNode& op : s.aggregation().operands) for_each_similarity(op, f);
}

/// Pointers to every similarity node, pre-order. Stable while the tree
/// structure is not modified.
std::vector<SimilarityNode*> similarity_nodes(LinkageRule& rule);
std::vector<const SimilarityNode*> similarity_nodes(const LinkageRule& rule);

/// Pointers to every value node, pre-order, paired with the side it sits on.
struct ValueSlot {
    ValueNode* node;
    Source side;
};
struct ConstValueSlot {
    const ValueNode* node;
    Source side;
};
std::vector<ValueSlot> value_nodes(LinkageRule& rule);
std::vector<ConstValueSlot> value_nodes(const LinkageRule& rule);

}  // namespace genlink
