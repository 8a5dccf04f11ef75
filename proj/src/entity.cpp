#include "genlink/entity.hpp"

#include <algorithm>

namespace genlink {

const ValueSet& Entity::values(const std::string& property) const {
    static const ValueSet kEmpty;
    auto it = properties.find(property);
    return it == properties.end() ? kEmpty : it->second;
}

EntitySource::EntitySource(Source label, std::vector<Entity> entities)
    : label_(label), entities_(std::move(entities)) {
    index_.reserve(entities_.size());
    for (std::size_t i = 0; i < entities_.size(); ++i) {
        index_.emplace(entities_[i].id, i);
        for (const auto& [name, _] : entities_[i].properties) property_names_.push_back(name);
    }
    std::sort(property_names_.begin(), property_names_.end());
    property_names_.erase(std::unique(property_names_.begin(), property_names_.end()),
                          property_names_.end());
}

const Entity* EntitySource::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &entities_[it->second];
}

}  // namespace genlink
