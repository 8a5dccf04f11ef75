#include "genlink/eval.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

namespace genlink {

ValueSet transform_lower_case(const ValueSet& in) {
    ValueSet out;
    out.reserve(in.size());
    for (const std::string& v : in) {
        std::string lower = v;
        for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.push_back(std::move(lower));
    }
    normalize(out);
    return out;
}

ValueSet transform_tokenize(const ValueSet& in) {
    // Splits on runs of whitespace and punctuation, drops empty tokens.
    ValueSet out;
    for (const std::string& v : in) {
        std::string token;
        for (char c : v) {
            unsigned char u = static_cast<unsigned char>(c);
            if (std::isspace(u) || std::ispunct(u)) {
                if (!token.empty()) out.push_back(std::move(token));
                token.clear();
            } else {
                token.push_back(c);
            }
        }
        if (!token.empty()) out.push_back(std::move(token));
    }
    normalize(out);
    return out;
}

ValueSet transform_strip_uri_prefix(const ValueSet& in) {
    ValueSet out;
    out.reserve(in.size());
    for (const std::string& v : in) {
        std::size_t pos = v.find_last_of("/#");
        out.push_back(pos == std::string::npos ? v : v.substr(pos + 1));
    }
    normalize(out);
    return out;
}

ValueSet transform_concatenate(const ValueSet& a, const ValueSet& b) {
    ValueSet out;
    out.reserve(a.size() * b.size());
    for (const std::string& x : a)
        for (const std::string& y : b) out.push_back(x + " " + y);
    normalize(out);
    return out;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    std::vector<std::size_t> prev(b.size() + 1), curr(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        curr[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, sub});
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

double haversine_meters(double lat1, double lon1, double lat2, double lon2) {
    constexpr double kEarthRadius = 6371008.8;  // IUGG mean radius
    constexpr double deg = std::numbers::pi / 180.0;
    double dlat = (lat2 - lat1) * deg;
    double dlon = (lon2 - lon1) * deg;
    double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
               std::cos(lat1 * deg) * std::cos(lat2 * deg) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(h)));
}

namespace {

std::string_view trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return {s.data() + b, e - b};
}

bool parse_double(std::string_view sv, double& out) {
    const char* first = sv.data();
    const char* last = sv.data() + sv.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

}  // namespace

bool parse_numeric(const std::string& s, double& out) { return parse_double(trimmed(s), out); }

bool parse_geo_point(const std::string& s, double& lat, double& lon) {
    std::string_view sv = trimmed(s);
    std::size_t sep = sv.find_first_of(" \t,");
    if (sep == std::string_view::npos) return false;
    std::string_view first = sv.substr(0, sep);
    std::size_t rest = sv.find_first_not_of(" \t,", sep);
    if (rest == std::string_view::npos) return false;
    if (!parse_double(first, lat) || !parse_double(sv.substr(rest), lon)) return false;
    return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

bool parse_iso_date(const std::string& s, long& days_since_epoch) {
    std::string_view sv = trimmed(s);
    if (sv.size() != 10 || sv[4] != '-' || sv[7] != '-') return false;
    int y, m, d;
    auto num = [&](std::size_t off, std::size_t len, int& out) {
        auto [ptr, ec] = std::from_chars(sv.data() + off, sv.data() + off + len, out);
        return ec == std::errc{} && ptr == sv.data() + off + len;
    };
    if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return false;
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                    std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) return false;
    days_since_epoch = std::chrono::sys_days{ymd}.time_since_epoch().count();
    return true;
}

std::optional<double> distance(Measure measure, const ValueSet& a, const ValueSet& b) {
    if (measure == Measure::Jaccard) {
        if (a.empty() && b.empty()) return std::nullopt;
        // Both sets are sorted; count the sorted-merge intersection.
        std::size_t inter = 0, i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] < b[j])
                ++i;
            else if (b[j] < a[i])
                ++j;
            else {
                ++inter;
                ++i;
                ++j;
            }
        }
        std::size_t uni = a.size() + b.size() - inter;
        return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
    }
    if (a.empty() || b.empty()) return std::nullopt;

    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    switch (measure) {
        case Measure::Levenshtein:
            for (const std::string& x : a)
                for (const std::string& y : b) {
                    best = std::min(best, static_cast<double>(levenshtein(x, y)));
                    any = true;
                }
            break;
        case Measure::Numeric:
            for (const std::string& x : a) {
                double vx;
                if (!parse_numeric(x, vx)) continue;
                for (const std::string& y : b) {
                    double vy;
                    if (!parse_numeric(y, vy)) continue;
                    best = std::min(best, std::abs(vx - vy));
                    any = true;
                }
            }
            break;
        case Measure::Geographic:
            for (const std::string& x : a) {
                double lat1, lon1;
                if (!parse_geo_point(x, lat1, lon1)) continue;
                for (const std::string& y : b) {
                    double lat2, lon2;
                    if (!parse_geo_point(y, lat2, lon2)) continue;
                    best = std::min(best, haversine_meters(lat1, lon1, lat2, lon2));
                    any = true;
                }
            }
            break;
        case Measure::Date:
            for (const std::string& x : a) {
                long dx;
                if (!parse_iso_date(x, dx)) continue;
                for (const std::string& y : b) {
                    long dy;
                    if (!parse_iso_date(y, dy)) continue;
                    best = std::min(best, static_cast<double>(std::abs(dx - dy)));
                    any = true;
                }
            }
            break;
        case Measure::Jaccard:
            break;  // handled above
    }
    if (!any) return std::nullopt;
    return best;
}

ValueSet eval_value(const ValueNode& op, const Entity& e) {
    if (op.is_property()) return e.values(op.property().property);
    const TransformNode& t = op.transform();
    switch (t.fn) {
        case TransformFn::LowerCase:
            return transform_lower_case(eval_value(t.inputs[0], e));
        case TransformFn::Tokenize:
            return transform_tokenize(eval_value(t.inputs[0], e));
        case TransformFn::StripUriPrefix:
            return transform_strip_uri_prefix(eval_value(t.inputs[0], e));
        case TransformFn::Concatenate:
            return transform_concatenate(eval_value(t.inputs[0], e), eval_value(t.inputs[1], e));
    }
    return {};
}

double eval_comparison(const ComparisonNode& cmp, const Entity& a, const Entity& b) {
    std::optional<double> d = distance(cmp.measure, eval_value(cmp.left, a), eval_value(cmp.right, b));
    if (!d) return 0.0;
    if (cmp.threshold == 0.0) return *d == 0.0 ? 1.0 : 0.0;
    if (*d > cmp.threshold) return 0.0;
    return 1.0 - *d / cmp.threshold;
}

double eval_aggregation(const AggregationNode& agg, const Entity& a, const Entity& b) {
    double out = 0.0;
    switch (agg.fn) {
        case AggregateFn::Min: {
            out = 1.0;
            for (const SimilarityNode& op : agg.operands)
                out = std::min(out, eval_similarity(op, a, b));
            break;
        }
        case AggregateFn::Max: {
            out = 0.0;
            for (const SimilarityNode& op : agg.operands)
                out = std::max(out, eval_similarity(op, a, b));
            break;
        }
        case AggregateFn::WMean: {
            double sum = 0.0, wsum = 0.0;
            for (const SimilarityNode& op : agg.operands) {
                sum += op.weight() * eval_similarity(op, a, b);
                wsum += op.weight();
            }
            out = wsum > 0.0 ? sum / wsum : 0.0;
            break;
        }
    }
    return out;
}

double eval_similarity(const SimilarityNode& node, const Entity& a, const Entity& b) {
    return node.is_comparison() ? eval_comparison(node.comparison(), a, b)
                                : eval_aggregation(node.aggregation(), a, b);
}

double eval_rule(const LinkageRule& rule, const Entity& a, const Entity& b) {
    return eval_similarity(rule.root, a, b);
}

bool is_match(const LinkageRule& rule, const Entity& a, const Entity& b) {
    return eval_rule(rule, a, b) >= 0.5;
}

}  // namespace genlink
