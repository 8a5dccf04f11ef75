#include "genlink/values.hpp"

#include <algorithm>

namespace genlink {

void normalize(ValueSet& values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
}

ValueSet make_value_set(std::vector<std::string> values) {
    normalize(values);
    return values;
}

}  // namespace genlink
