#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>

#include "hypoflow/core/types.hpp"

namespace hypoflow::agents {

// Splits model output into labeled sections. A header line names one of
// `names` in either "Name: inline text" form or as a markdown heading
// ("## Name"), optionally bolded or numbered. Matching is case-insensitive and
// treats '_' like a space. Each body runs to the next header and is trimmed.
// Keys of the result are the names as given. Throws DuplicateField.
std::map<std::string, std::string> parse_labeled_sections(std::string_view text,
                                                          std::span<const std::string_view> names);

// Extracts the eight idea sections in any order. Throws MissingField(name)
// (lower-case field name) or DuplicateField(name).
ResearchIdea parse_idea(std::string_view text);

// Canonical "Field: body" rendering; parse_idea(format_idea(x)) == x.
std::string format_idea(const ResearchIdea& idea);

}  // namespace hypoflow::agents
