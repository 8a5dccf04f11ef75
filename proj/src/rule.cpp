#include "genlink/rule.hpp"

#include <cmath>
#include <fmt/format.h>

namespace genlink {

const char* to_string(Source s) { return s == Source::A ? "A" : "B"; }

const char* to_string(TransformFn f) {
    switch (f) {
        case TransformFn::LowerCase: return "lowerCase";
        case TransformFn::Tokenize: return "tokenize";
        case TransformFn::StripUriPrefix: return "stripUriPrefix";
        case TransformFn::Concatenate: return "concatenate";
    }
    return "?";
}

const char* to_string(Measure m) {
    switch (m) {
        case Measure::Levenshtein: return "levenshtein";
        case Measure::Jaccard: return "jaccard";
        case Measure::Numeric: return "numeric";
        case Measure::Geographic: return "geographic";
        case Measure::Date: return "date";
    }
    return "?";
}

const char* to_string(AggregateFn f) {
    switch (f) {
        case AggregateFn::Min: return "min";
        case AggregateFn::Max: return "max";
        case AggregateFn::WMean: return "wmean";
    }
    return "?";
}

bool parse_transform_fn(const std::string& name, TransformFn& out) {
    for (TransformFn f : {TransformFn::LowerCase, TransformFn::Tokenize,
                          TransformFn::StripUriPrefix, TransformFn::Concatenate}) {
        if (name == to_string(f)) {
            out = f;
            return true;
        }
    }
    return false;
}

bool parse_measure(const std::string& name, Measure& out) {
    for (Measure m : {Measure::Levenshtein, Measure::Jaccard, Measure::Numeric,
                      Measure::Geographic, Measure::Date}) {
        if (name == to_string(m)) {
            out = m;
            return true;
        }
    }
    return false;
}

bool parse_aggregate_fn(const std::string& name, AggregateFn& out) {
    for (AggregateFn f : {AggregateFn::Min, AggregateFn::Max, AggregateFn::WMean}) {
        if (name == to_string(f)) {
            out = f;
            return true;
        }
    }
    return false;
}

std::size_t transform_arity(TransformFn f) {
    return f == TransformFn::Concatenate ? 2 : 1;
}

namespace {

void validate_value(const ValueNode& v, Source expected_side, const std::string& path,
                    std::vector<Violation>& out) {
    if (v.is_property()) {
        const PropertyNode& p = v.property();
        if (p.property.empty())
            out.push_back({path, "property name must be non-empty"});
        if (p.source != expected_side)
            out.push_back({path, fmt::format("property reads source {} but sits on the {} side",
                                             to_string(p.source), to_string(expected_side))});
        return;
    }
    const TransformNode& t = v.transform();
    if (t.inputs.empty())
        out.push_back({path, "transformation requires at least one input"});
    std::size_t want = transform_arity(t.fn);
    if (t.inputs.size() != want)
        out.push_back({path, fmt::format("{} requires exactly {} input{}", to_string(t.fn), want,
                                         want == 1 ? "" : "s")});
    for (std::size_t i = 0; i < t.inputs.size(); ++i)
        validate_value(t.inputs[i], expected_side, fmt::format("{}.inputs[{}]", path, i), out);
}

void validate_similarity(const SimilarityNode& s, const std::string& path,
                         std::vector<Violation>& out) {
    if (s.is_comparison()) {
        const ComparisonNode& c = s.comparison();
        if (!(c.threshold >= 0.0) || !std::isfinite(c.threshold))
            out.push_back({path, "threshold must be non-negative and finite"});
        if (!(c.weight > 0.0) || !std::isfinite(c.weight))
            out.push_back({path, "weight must be positive and finite"});
        validate_value(c.left, Source::A, path + ".left", out);
        validate_value(c.right, Source::B, path + ".right", out);
        return;
    }
    const AggregationNode& a = s.aggregation();
    if (a.operands.empty())
        out.push_back({path, "aggregation requires at least one operand"});
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
        out.push_back({path, "weight must be positive and finite"});
    for (std::size_t i = 0; i < a.operands.size(); ++i)
        validate_similarity(a.operands[i], fmt::format("{}.operands[{}]", path, i), out);
}

}  // namespace

ValidationReport validate(const LinkageRule& rule) {
    ValidationReport report;
    validate_similarity(rule.root, "root", report.violations);
    return report;
}

std::size_t count_operators(const LinkageRule& rule) {
    std::size_t n = 0;
    for_each_similarity(rule.root, [&](const SimilarityNode& s) {
        ++n;
        if (s.is_comparison()) {
            for_each_value(s.comparison().left, [&](const ValueNode&) { ++n; });
            for_each_value(s.comparison().right, [&](const ValueNode&) { ++n; });
        }
    });
    return n;
}

std::vector<SimilarityNode*> similarity_nodes(LinkageRule& rule) {
    std::vector<SimilarityNode*> out;
    for_each_similarity(rule.root, [&](SimilarityNode& s) { out.push_back(&s); });
    return out;
}

std::vector<const SimilarityNode*> similarity_nodes(const LinkageRule& rule) {
    std::vector<const SimilarityNode*> out;
    for_each_similarity(rule.root, [&](const SimilarityNode& s) { out.push_back(&s); });
    return out;
}

std::vector<ValueSlot> value_nodes(LinkageRule& rule) {
    std::vector<ValueSlot> out;
    for_each_similarity(rule.root, [&](SimilarityNode& s) {
        if (!s.is_comparison()) return;
        for_each_value(s.comparison().left, [&](ValueNode& v) { out.push_back({&v, Source::A}); });
        for_each_value(s.comparison().right, [&](ValueNode& v) { out.push_back({&v, Source::B}); });
    });
    return out;
}

std::vector<ConstValueSlot> value_nodes(const LinkageRule& rule) {
    std::vector<ConstValueSlot> out;
    for_each_similarity(rule.root, [&](const SimilarityNode& s) {
        if (!s.is_comparison()) return;
        for_each_value(s.comparison().left,
                       [&](const ValueNode& v) { out.push_back({&v, Source::A}); });
        for_each_value(s.comparison().right,
                       [&](const ValueNode& v) { out.push_back({&v, Source::B}); });
    });
    return out;
}

}  // namespace genlink
