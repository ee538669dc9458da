#pragma once

#include <map>
#include <string>

#include "bmc/engine.hpp"

namespace bmc::detail {

// Attribute environment built up while walking a join combination.
using Env = std::map<AttrRef, Value>;

enum class Tri { t, f, unknown };

std::string base_source(const std::string& alias);
bool env_get(const Env& env, const AttrRef& ref, Value& out);
void bind_tuple(Env& env, const SourceDecl& decl, const std::string& alias, const Tuple& tuple);
bool compare_values(Value a, CompareOp op, Value b);
Tri eval_atom(const Atom& atom, const Env& env);
OutputRow project_row(const SpjQuery& q, const Env& env);

}  // namespace bmc::detail
