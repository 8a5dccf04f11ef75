#include "genlink/rule_text.hpp"

#include "genlink/numfmt.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <optional>
#include <vector>

namespace genlink {

namespace {

constexpr const char* kHeader = "genlink-rule v1";

bool needs_quoting(const std::string& s) {
    if (s.empty()) return true;
    for (char c : s) {
        unsigned char u = static_cast<unsigned char>(c);
        if (!(std::isalnum(u) || c == '_' || c == '-' || c == '.' || c == ':' || c == '/' ||
              c == '#'))
            return true;
    }
    return false;
}

std::string quote(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

void write_value(const ValueNode& v, int depth, std::string& out) {
    indent(out, depth);
    if (v.is_property()) {
        const PropertyNode& p = v.property();
        out += fmt::format("property(source={}, name={})\n", to_string(p.source), quote(p.property));
        return;
    }
    const TransformNode& t = v.transform();
    out += fmt::format("transform(fn={}) {{\n", to_string(t.fn));
    for (const ValueNode& in : t.inputs) write_value(in, depth + 1, out);
    indent(out, depth);
    out += "}\n";
}

void write_similarity(const SimilarityNode& s, int depth, std::string& out) {
    indent(out, depth);
    if (s.is_comparison()) {
        const ComparisonNode& c = s.comparison();
        out += fmt::format("compare(measure={}, threshold={}, weight={}) {{\n",
                           to_string(c.measure), format_number(c.threshold),
                           format_number(c.weight));
        indent(out, depth + 1);
        out += "left {\n";
        write_value(c.left, depth + 2, out);
        indent(out, depth + 1);
        out += "}\n";
        indent(out, depth + 1);
        out += "right {\n";
        write_value(c.right, depth + 2, out);
        indent(out, depth + 1);
        out += "}\n";
        indent(out, depth);
        out += "}\n";
        return;
    }
    const AggregationNode& a = s.aggregation();
    std::string weights;
    for (std::size_t i = 0; i < a.operands.size(); ++i) {
        if (i) weights += ", ";
        weights += format_number(a.operands[i].weight());
    }
    out += fmt::format("aggregate(fn={}, weights=[{}]) {{\n", to_string(a.fn), weights);
    for (const SimilarityNode& op : a.operands) write_similarity(op, depth + 1, out);
    indent(out, depth);
    out += "}\n";
}

// ---------------------------------------------------------------------------
// Parser: hand-rolled tokenizer + recursive descent with line:column errors.

enum class Tok { Ident, Number, String, LParen, RParen, LBrace, RBrace, LBracket, RBracket,
                 Equals, Comma, End };

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    int line = 0, col = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_space();
        int line = line_, col = col_;
        if (pos_ >= text_.size()) return {Tok::End, "", 0.0, line, col};
        char c = text_[pos_];
        switch (c) {
            case '(': advance(); return {Tok::LParen, "(", 0.0, line, col};
            case ')': advance(); return {Tok::RParen, ")", 0.0, line, col};
            case '{': advance(); return {Tok::LBrace, "{", 0.0, line, col};
            case '}': advance(); return {Tok::RBrace, "}", 0.0, line, col};
            case '[': advance(); return {Tok::LBracket, "[", 0.0, line, col};
            case ']': advance(); return {Tok::RBracket, "]", 0.0, line, col};
            case '=': advance(); return {Tok::Equals, "=", 0.0, line, col};
            case ',': advance(); return {Tok::Comma, ",", 0.0, line, col};
            case '"': return lex_string(line, col);
            default: break;
        }
        if (is_bare(c)) return lex_bare(line, col);
        fail(line, col, fmt::format("unexpected character '{}'", c));
    }

    [[noreturn]] void fail(int line, int col, const std::string& msg) const {
        throw RuleParseError(fmt::format("{}:{}: {}", line, col, msg));
    }

private:
    static bool is_bare(char c) {
        unsigned char u = static_cast<unsigned char>(c);
        return std::isalnum(u) || c == '_' || c == '-' || c == '+' || c == '.' || c == ':' ||
               c == '/' || c == '#';
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            advance();
    }

    Token lex_string(int line, int col) {
        advance();  // opening quote
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_];
            if (c == '\\') {
                advance();
                if (pos_ >= text_.size()) fail(line, col, "unterminated string");
                c = text_[pos_];
            }
            out.push_back(c);
            advance();
        }
        if (pos_ >= text_.size()) fail(line, col, "unterminated string");
        advance();  // closing quote
        return {Tok::String, out, 0.0, line, col};
    }

    Token lex_bare(int line, int col) {
        std::string out;
        while (pos_ < text_.size() && is_bare(text_[pos_])) {
            out.push_back(text_[pos_]);
            advance();
        }
        double num;
        auto [ptr, ec] = std::from_chars(out.data(), out.data() + out.size(), num);
        if (ec == std::errc{} && ptr == out.data() + out.size())
            return {Tok::Number, out, num, line, col};
        return {Tok::Ident, out, 0.0, line, col};
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lexer_(text) { shift(); }

    LinkageRule parse() {
        // Header line.
        expect_ident("genlink-rule");
        Token version = expect(Tok::Ident, "format version");
        if (version.text != "v1")
            lexer_.fail(version.line, version.col,
                        fmt::format("unsupported version '{}'", version.text));
        LinkageRule rule{parse_similarity()};
        if (tok_.kind != Tok::End)
            lexer_.fail(tok_.line, tok_.col, "trailing content after rule");
        // Grammar-level checks the parser structure cannot express.
        ValidationReport report = validate(rule);
        if (!report.ok()) {
            const Violation& v = report.violations.front();
            throw RuleParseError(fmt::format("invalid rule: {}: {}", v.path, v.message));
        }
        return rule;
    }

private:
    void shift() { tok_ = lexer_.next(); }

    Token expect(Tok kind, const char* what) {
        if (tok_.kind != kind)
            lexer_.fail(tok_.line, tok_.col, fmt::format("expected {}, got '{}'", what, tok_.text));
        Token t = tok_;
        shift();
        return t;
    }

    Token expect_ident(const std::string& name) {
        if (tok_.kind != Tok::Ident || tok_.text != name)
            lexer_.fail(tok_.line, tok_.col,
                        fmt::format("expected '{}', got '{}'", name, tok_.text));
        Token t = tok_;
        shift();
        return t;
    }

    // key=value pairs inside parentheses; each value is a token or a number list.
    struct Attr {
        Token value;
        std::vector<double> list;
        bool is_list = false;
    };

    std::map<std::string, Attr> parse_attrs(std::initializer_list<const char*> allowed) {
        std::map<std::string, Attr> attrs;
        expect(Tok::LParen, "'('");
        while (tok_.kind != Tok::RParen) {
            Token key = expect(Tok::Ident, "attribute name");
            bool known = false;
            for (const char* k : allowed) known = known || key.text == k;
            if (!known)
                lexer_.fail(key.line, key.col, fmt::format("unknown key '{}'", key.text));
            if (attrs.count(key.text))
                lexer_.fail(key.line, key.col, fmt::format("duplicate key '{}'", key.text));
            expect(Tok::Equals, "'='");
            Attr attr;
            if (tok_.kind == Tok::LBracket) {
                shift();
                attr.is_list = true;
                while (tok_.kind != Tok::RBracket) {
                    attr.list.push_back(expect(Tok::Number, "number").number);
                    if (tok_.kind == Tok::Comma) shift();
                }
                shift();  // ']'
            } else if (tok_.kind == Tok::Number || tok_.kind == Tok::Ident ||
                       tok_.kind == Tok::String) {
                attr.value = tok_;
                shift();
            } else {
                lexer_.fail(tok_.line, tok_.col, "expected attribute value");
            }
            attrs.emplace(key.text, std::move(attr));
            if (tok_.kind == Tok::Comma) shift();
        }
        shift();  // ')'
        return attrs;
    }

    const Attr& require(const std::map<std::string, Attr>& attrs, const char* key,
                        const Token& at) {
        auto it = attrs.find(key);
        if (it == attrs.end())
            lexer_.fail(at.line, at.col, fmt::format("missing key '{}'", key));
        return it->second;
    }

    SimilarityNode parse_similarity() {
        Token head = expect(Tok::Ident, "'aggregate' or 'compare'");
        if (head.text == "aggregate") return parse_aggregate(head);
        if (head.text == "compare") return parse_compare(head);
        lexer_.fail(head.line, head.col,
                    fmt::format("expected similarity operator, got '{}'", head.text));
    }

    SimilarityNode parse_aggregate(const Token& head) {
        auto attrs = parse_attrs({"fn", "weights"});
        const Attr& fn = require(attrs, "fn", head);
        AggregationNode agg;
        if (!parse_aggregate_fn(fn.value.text, agg.fn))
            lexer_.fail(fn.value.line, fn.value.col,
                        fmt::format("unknown aggregation function '{}'", fn.value.text));
        expect(Tok::LBrace, "'{'");
        while (tok_.kind != Tok::RBrace) agg.operands.push_back(parse_similarity());
        shift();  // '}'
        if (auto it = attrs.find("weights"); it != attrs.end()) {
            if (!it->second.is_list)
                lexer_.fail(head.line, head.col, "weights must be a list");
            if (it->second.list.size() != agg.operands.size())
                lexer_.fail(head.line, head.col,
                            fmt::format("weights list has {} entries for {} operands",
                                        it->second.list.size(), agg.operands.size()));
            for (std::size_t i = 0; i < agg.operands.size(); ++i) {
                double w = it->second.list[i];
                // A comparison operand may also declare weight=; they must agree.
                if (agg.operands[i].is_comparison() && agg.operands[i].weight() != 1.0 &&
                    agg.operands[i].weight() != w)
                    lexer_.fail(head.line, head.col,
                                fmt::format("operand {} declares weight {} but the aggregate "
                                            "weights list says {}",
                                            i, agg.operands[i].weight(), w));
                agg.operands[i].set_weight(w);
            }
        }
        return SimilarityNode{agg};
    }

    SimilarityNode parse_compare(const Token& head) {
        auto attrs = parse_attrs({"measure", "threshold", "weight"});
        ComparisonNode cmp;
        const Attr& measure = require(attrs, "measure", head);
        if (!parse_measure(measure.value.text, cmp.measure))
            lexer_.fail(measure.value.line, measure.value.col,
                        fmt::format("unknown distance function '{}'", measure.value.text));
        const Attr& threshold = require(attrs, "threshold", head);
        if (threshold.value.kind != Tok::Number)
            lexer_.fail(threshold.value.line, threshold.value.col, "threshold must be a number");
        cmp.threshold = threshold.value.number;
        if (cmp.threshold < 0.0)
            lexer_.fail(threshold.value.line, threshold.value.col,
                        "threshold must be non-negative");
        if (auto it = attrs.find("weight"); it != attrs.end()) {
            if (it->second.value.kind != Tok::Number)
                lexer_.fail(it->second.value.line, it->second.value.col,
                            "weight must be a number");
            cmp.weight = it->second.value.number;
        }
        expect(Tok::LBrace, "'{'");
        expect_ident("left");
        expect(Tok::LBrace, "'{'");
        cmp.left = parse_value(Source::A);
        expect(Tok::RBrace, "'}'");
        expect_ident("right");
        expect(Tok::LBrace, "'{'");
        cmp.right = parse_value(Source::B);
        expect(Tok::RBrace, "'}'");
        expect(Tok::RBrace, "'}'");
        return SimilarityNode{cmp};
    }

    ValueNode parse_value(Source side) {
        Token head = expect(Tok::Ident, "'transform' or 'property'");
        if (head.text == "property") {
            auto attrs = parse_attrs({"source", "name"});
            PropertyNode p;
            const Attr& source = require(attrs, "source", head);
            if (source.value.text == "A")
                p.source = Source::A;
            else if (source.value.text == "B")
                p.source = Source::B;
            else
                lexer_.fail(source.value.line, source.value.col,
                            fmt::format("source must be A or B, got '{}'", source.value.text));
            p.property = require(attrs, "name", head).value.text;
            if (p.source != side)
                lexer_.fail(head.line, head.col,
                            fmt::format("property reads source {} under the {} side",
                                        to_string(p.source), to_string(side)));
            return ValueNode{p};
        }
        if (head.text == "transform") {
            auto attrs = parse_attrs({"fn"});
            TransformNode t;
            const Attr& fn = require(attrs, "fn", head);
            if (!parse_transform_fn(fn.value.text, t.fn))
                lexer_.fail(fn.value.line, fn.value.col,
                            fmt::format("unknown transformation function '{}'", fn.value.text));
            expect(Tok::LBrace, "'{'");
            while (tok_.kind != Tok::RBrace) t.inputs.push_back(parse_value(side));
            shift();  // '}'
            if (t.inputs.size() != transform_arity(t.fn))
                lexer_.fail(head.line, head.col,
                            fmt::format("{} requires exactly {} input{}", to_string(t.fn),
                                        transform_arity(t.fn),
                                        transform_arity(t.fn) == 1 ? "" : "s"));
            return ValueNode{t};
        }
        lexer_.fail(head.line, head.col,
                    fmt::format("expected value operator, got '{}'", head.text));
    }

    Lexer lexer_;
    Token tok_;
};

}  // namespace

std::string serialize(const LinkageRule& rule) {
    std::string out = kHeader;
    out += "\n";
    write_similarity(rule.root, 0, out);
    return out;
}

LinkageRule parse_rule(const std::string& text) { return Parser(text).parse(); }

}  // namespace genlink
