#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "genlink/rule.hpp"
#include "genlink/values.hpp"

namespace genlink {

struct Entity {
    std::string id;
    std::map<std::string, ValueSet> properties;

    /// Values of a property; empty set if absent.
    const ValueSet& values(const std::string& property) const;
};

/// An immutable, id-indexed collection of entities belonging to one source.
class EntitySource {
public:
    EntitySource() = default;
    EntitySource(Source label, std::vector<Entity> entities);

    Source label() const { return label_; }
    const std::vector<Entity>& entities() const { return entities_; }
    const std::vector<std::string>& property_names() const { return property_names_; }

    const Entity* find(const std::string& id) const;
    bool contains(const std::string& id) const { return find(id) != nullptr; }
    std::size_t size() const { return entities_.size(); }

private:
    Source label_ = Source::A;
    std::vector<Entity> entities_;
    std::vector<std::string> property_names_;  // sorted union over all entities
    std::unordered_map<std::string, std::size_t> index_;
};

using Link = std::pair<std::string, std::string>;  // (id in A, id in B)

struct ReferenceLinkSet {
    std::vector<Link> positive;
    std::vector<Link> negative;
};

}  // namespace genlink
