#pragma once

#include <string>

#include "bmc/catalog.hpp"
#include "bmc/query.hpp"

namespace bmc {

// Parses the textual query form and validates it against the catalog.
// Throws ParseError (position) or ValidationError (normal-form clause).
UnionQuery parse_query(const std::string& text, const Catalog& catalog);

UnionQuery load_query(const std::string& path, const Catalog& catalog);

}  // namespace bmc
