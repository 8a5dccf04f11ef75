#include "genlink/dataset.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace genlink {

std::vector<std::string> parse_csv_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

EntitySource load_entities_csv(const std::string& path, std::ifstream& in, Source label) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(fmt::format("{}: empty file", path));
    std::vector<std::string> header = parse_csv_record(strip_cr(line));
    std::size_t id_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == "id") id_col = i;
    if (id_col == header.size()) throw DataError(fmt::format("{}: no id column", path));
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != id_col && header[i].empty())
            throw DataError(fmt::format("{}: empty property name in header column {}", path, i + 1));

    std::vector<Entity> entities;
    std::map<std::string, std::size_t> index;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        std::vector<std::string> fields = parse_csv_record(line);
        if (fields.size() != header.size())
            throw DataError(fmt::format("{}:{}: expected {} fields, got {}", path, lineno,
                                        header.size(), fields.size()));
        const std::string& id = fields[id_col];
        if (id.empty()) throw DataError(fmt::format("{}:{}: empty id", path, lineno));
        auto [it, inserted] = index.emplace(id, entities.size());
        if (inserted) entities.push_back(Entity{id, {}});
        Entity& e = entities[it->second];
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i == id_col || fields[i].empty()) continue;
            e.properties[header[i]].push_back(fields[i]);
        }
    }
    for (Entity& e : entities)
        for (auto& [_, values] : e.properties) normalize(values);
    return EntitySource(label, std::move(entities));
}

// N-Triples subset: `<subj> <pred> "literal" .` or `<subj> <pred> <obj> .`
struct Triple {
    std::string subject, predicate, object;
};

Triple parse_triple(const std::string& path, std::size_t lineno, const std::string& line) {
    std::size_t pos = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw DataError(fmt::format("{}:{}: {}", path, lineno, msg));
    };
    auto skip_ws = [&] {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    };
    auto read_iri = [&]() -> std::string {
        if (pos >= line.size() || line[pos] != '<') fail("expected '<'");
        std::size_t end = line.find('>', pos);
        if (end == std::string::npos) fail("unterminated IRI");
        std::string iri = line.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        return iri;
    };
    Triple t;
    skip_ws();
    t.subject = read_iri();
    skip_ws();
    t.predicate = read_iri();
    skip_ws();
    if (pos < line.size() && line[pos] == '<') {
        t.object = read_iri();
    } else if (pos < line.size() && line[pos] == '"') {
        std::string lit;
        ++pos;
        while (pos < line.size() && line[pos] != '"') {
            char c = line[pos];
            if (c == '\\' && pos + 1 < line.size()) {
                ++pos;
                switch (line[pos]) {
                    case 'n': c = '\n'; break;
                    case 't': c = '\t'; break;
                    case 'r': c = '\r'; break;
                    case '"': c = '"'; break;
                    case '\\': c = '\\'; break;
                    default: fail(fmt::format("unknown escape '\\{}'", line[pos]));
                }
            }
            lit.push_back(c);
            ++pos;
        }
        if (pos >= line.size()) fail("unterminated literal");
        ++pos;
        // Ignore language tags and datatype annotations.
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '.') ++pos;
        t.object = lit;
    } else {
        fail("expected object");
    }
    skip_ws();
    if (pos >= line.size() || line[pos] != '.') fail("expected terminating '.'");
    return t;
}

EntitySource load_entities_ntriples(const std::string& path, std::ifstream& in, Source label) {
    std::vector<Entity> entities;
    std::map<std::string, std::size_t> index;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        Triple t = parse_triple(path, lineno, line);
        auto [it, inserted] = index.emplace(t.subject, entities.size());
        if (inserted) entities.push_back(Entity{t.subject, {}});
        entities[it->second].properties[t.predicate].push_back(t.object);
    }
    for (Entity& e : entities)
        for (auto& [_, values] : e.properties) normalize(values);
    return EntitySource(label, std::move(entities));
}

}  // namespace

EntitySource load_entities(const std::string& path, EntityFormat format, Source label) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot read {}", path));
    return format == EntityFormat::Csv ? load_entities_csv(path, in, label)
                                       : load_entities_ntriples(path, in, label);
}

std::vector<LabeledLink> load_links(const std::string& path, const EntitySource& a,
                                    const EntitySource& b) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot read {}", path));
    std::string line;
    if (!std::getline(in, line)) throw DataError(fmt::format("{}: empty file", path));
    std::vector<std::string> header = parse_csv_record(strip_cr(line));
    if (header.size() < 2 || header[0] != "source_id" || header[1] != "target_id")
        throw DataError(fmt::format("{}: expected header source_id,target_id[,label]", path));
    bool has_label = header.size() >= 3 && header[2] == "label";
    if (header.size() > (has_label ? 3u : 2u))
        throw DataError(fmt::format("{}: unexpected extra columns", path));

    std::vector<LabeledLink> links;
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        std::vector<std::string> fields = parse_csv_record(line);
        if (fields.size() != header.size())
            throw DataError(fmt::format("{}:{}: expected {} fields, got {}", path, lineno,
                                        header.size(), fields.size()));
        LabeledLink link{fields[0], fields[1], true};
        if (has_label) {
            if (fields[2] == "-")
                link.positive = false;
            else if (fields[2] != "+" && !fields[2].empty())
                throw DataError(fmt::format("{}:{}: label must be + or -", path, lineno));
        }
        if (!a.contains(link.source_id))
            throw DataError(
                fmt::format("{}:{}: unknown id '{}' in source A", path, lineno, link.source_id));
        if (!b.contains(link.target_id))
            throw DataError(
                fmt::format("{}:{}: unknown id '{}' in source B", path, lineno, link.target_id));
        if (!seen.insert({link.source_id, link.target_id}).second)
            throw DataError(fmt::format("{}:{}: duplicate link {},{}", path, lineno,
                                        link.source_id, link.target_id));
        links.push_back(std::move(link));
    }
    return links;
}

ReferenceLinkSet split_labels(const std::vector<LabeledLink>& links) {
    ReferenceLinkSet out;
    for (const LabeledLink& l : links)
        (l.positive ? out.positive : out.negative).emplace_back(l.source_id, l.target_id);
    return out;
}

std::vector<Link> generate_negative_links(const std::vector<Link>& positives, Rng& rng) {
    if (positives.size() < 2) throw DataError("cannot derive negatives from fewer than 2 links");
    std::vector<Link> shuffled = positives;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    std::set<Link> positive_set(positives.begin(), positives.end());
    std::set<Link> emitted;
    std::vector<Link> out;
    auto emit = [&](const Link& first, const Link& second) {
        for (Link candidate : {Link{first.first, second.second}, Link{second.first, first.second}}) {
            if (positive_set.count(candidate)) continue;
            if (!emitted.insert(candidate).second) continue;
            out.push_back(std::move(candidate));
        }
    };
    for (std::size_t i = 0; i + 1 < shuffled.size(); i += 2) emit(shuffled[i], shuffled[i + 1]);
    if (shuffled.size() % 2 == 1) emit(shuffled.back(), shuffled.front());
    return out;
}

std::vector<ReferenceLinkSet> split_folds(const ReferenceLinkSet& links, std::size_t k, Rng& rng) {
    if (k < 2) throw DataError("fold count must be at least 2");
    if (links.positive.size() < k || links.negative.size() < k)
        throw DataError(fmt::format("need at least {} positive and negative links to stratify", k));

    std::vector<ReferenceLinkSet> folds(k);
    auto partition = [&](const std::vector<Link>& pool, auto member) {
        std::vector<Link> shuffled = pool;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        for (std::size_t i = 0; i < shuffled.size(); ++i)
            (folds[i % k].*member).push_back(shuffled[i]);
    };
    partition(links.positive, &ReferenceLinkSet::positive);
    partition(links.negative, &ReferenceLinkSet::negative);
    return folds;
}

std::pair<ReferenceLinkSet, ReferenceLinkSet> train_validation_split(
    const std::vector<ReferenceLinkSet>& folds, std::size_t holdout) {
    ReferenceLinkSet train, validation = folds.at(holdout);
    for (std::size_t i = 0; i < folds.size(); ++i) {
        if (i == holdout) continue;
        train.positive.insert(train.positive.end(), folds[i].positive.begin(),
                              folds[i].positive.end());
        train.negative.insert(train.negative.end(), folds[i].negative.begin(),
                              folds[i].negative.end());
    }
    return {std::move(train), std::move(validation)};
}

}  // namespace genlink
