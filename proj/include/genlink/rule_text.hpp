#pragma once

#include <stdexcept>
#include <string>

#include "genlink/rule.hpp"

namespace genlink {

/// Raised on malformed rule text; the message carries line:column.
class RuleParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Renders a rule in the versioned `genlink-rule v1` block format.
std::string serialize(const LinkageRule& rule);

/// Inverse of serialize. Rejects unknown keys, unknown function names and
/// grammar violations with a position-annotated RuleParseError.
LinkageRule parse_rule(const std::string& text);

}  // namespace genlink
