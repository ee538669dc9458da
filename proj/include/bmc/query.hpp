#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bmc/catalog.hpp"
#include "bmc/types.hpp"

namespace bmc {

enum class CompareOp { lt, eq, gt, ne };

std::string op_text(CompareOp op);
CompareOp flip(CompareOp op);  // mirror across the comparison

struct AttrRef {
    std::string source;  // alias; repeated relations get R#2, R#3, ...
    std::string attr;

    auto operator<=>(const AttrRef&) const = default;
    std::string text() const { return source + "." + attr; }
};

struct Operand {
    enum class Tag { attribute, int_literal, ts_literal };

    Tag tag = Tag::int_literal;
    AttrRef ref;       // tag == attribute
    Value value = 0;   // literals

    static Operand attribute(AttrRef r) { return {Tag::attribute, std::move(r), 0}; }
    static Operand int_lit(Value v) { return {Tag::int_literal, {}, v}; }
    static Operand ts_lit(Value v) { return {Tag::ts_literal, {}, v}; }

    bool is_attr() const { return tag == Tag::attribute; }
    bool is_literal() const { return tag != Tag::attribute; }
    std::string text() const;
    auto operator<=>(const Operand&) const = default;
};

// Normal-form atom: attribute on the left, never timestamp vs integer.
struct Atom {
    Operand lhs;
    CompareOp op = CompareOp::eq;
    Operand rhs;

    std::string text() const { return lhs.text() + " " + op_text(op) + " " + rhs.text(); }
    auto operator<=>(const Atom&) const = default;
};

enum class ProjectionMode { preserving, eliminating };

std::string mode_text(ProjectionMode mode);

struct SpjQuery {
    ProjectionMode mode = ProjectionMode::preserving;
    std::vector<Value> constants;       // a_1..a_m, prepended to every output row
    std::vector<AttrRef> project_list;  // L, attribute references only
    std::vector<std::string> relations;     // aliases, repeats become R#2...
    std::vector<std::string> inf_streams;   // no repeats
    std::vector<std::string> fin_streams;   // no repeats
    std::vector<Atom> selection;            // conjunction P

    std::vector<std::string> stream_names() const;  // inf then fin
    std::vector<std::string> source_names() const;  // relations, inf, fin
    bool uses_source(const std::string& name) const;
    std::string to_text() const;
};

struct UnionQuery {
    std::vector<SpjQuery> branches;  // non-empty, same mode, same output arity

    ProjectionMode mode() const { return branches.at(0).mode; }
    std::string to_text() const;
};

struct OutputColumn {
    int position = 0;
    AttrKind kind = AttrKind::integer;
};

// Arity = |constants| + |project_list|; all columns integer-kind.
std::vector<OutputColumn> output_schema(const UnionQuery& q);

// Enforces every Def-style normal form clause; throws ValidationError
// naming the violated clause. The catalog here is the effective one for
// the query's aliases (see resolve_aliases).
void validate_query(const UnionQuery& q, const Catalog& catalog);

// Expands repeated relation occurrences into aliased catalog entries
// (R, R -> R#1 named "R", R#2) and returns the effective catalog.
Catalog effective_catalog(const SpjQuery& q, const Catalog& base);

}  // namespace bmc
