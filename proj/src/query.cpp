#include "bmc/query.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace bmc {

std::string row_text(const OutputRow& row) {
    std::string out;
    for (size_t i = 0; i < row.values.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(row.values[i]);
    }
    return out;
}

std::string op_text(CompareOp op) {
    switch (op) {
        case CompareOp::lt: return "<";
        case CompareOp::eq: return "=";
        case CompareOp::gt: return ">";
        case CompareOp::ne: return "!=";
    }
    return "?";
}

CompareOp flip(CompareOp op) {
    switch (op) {
        case CompareOp::lt: return CompareOp::gt;
        case CompareOp::gt: return CompareOp::lt;
        default: return op;
    }
}

std::string Operand::text() const {
    if (is_attr()) return ref.text();
    return std::to_string(value);
}

std::string mode_text(ProjectionMode mode) {
    return mode == ProjectionMode::preserving ? "DISTINCTLESS" : "DISTINCT";
}

std::vector<std::string> SpjQuery::stream_names() const {
    std::vector<std::string> out = inf_streams;
    out.insert(out.end(), fin_streams.begin(), fin_streams.end());
    return out;
}

std::vector<std::string> SpjQuery::source_names() const {
    std::vector<std::string> out = relations;
    for (const auto& s : inf_streams) out.push_back(s);
    for (const auto& s : fin_streams) out.push_back(s);
    return out;
}

bool SpjQuery::uses_source(const std::string& name) const {
    auto names = source_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

// Aliased relation names print as the base name so text round-trips.
std::string print_source(const std::string& alias) {
    auto hash = alias.find('#');
    return hash == std::string::npos ? alias : alias.substr(0, hash);
}

}  // namespace

std::string SpjQuery::to_text() const {
    std::ostringstream out;
    out << mode_text(mode) << " SELECT ";
    bool first = true;
    for (Value c : constants) {
        if (!first) out << ", ";
        out << c;
        first = false;
    }
    for (const auto& ref : project_list) {
        if (!first) out << ", ";
        out << ref.text();
        first = false;
    }
    out << " FROM ";
    auto names = source_names();
    for (size_t i = 0; i < names.size(); ++i) {
        if (i) out << ", ";
        out << print_source(names[i]);
    }
    if (!selection.empty()) {
        out << " WHERE ";
        for (size_t i = 0; i < selection.size(); ++i) {
            if (i) out << " AND ";
            out << selection[i].text();
        }
    }
    return out.str();
}

std::string UnionQuery::to_text() const {
    std::string out;
    for (size_t i = 0; i < branches.size(); ++i) {
        if (i) out += " UNION ALL ";
        out += branches[i].to_text();
    }
    return out;
}

std::vector<OutputColumn> output_schema(const UnionQuery& q) {
    const SpjQuery& b = q.branches.at(0);
    std::vector<OutputColumn> out;
    int arity = static_cast<int>(b.constants.size() + b.project_list.size());
    for (int i = 0; i < arity; ++i) out.push_back({i, AttrKind::integer});
    return out;
}

Catalog effective_catalog(const SpjQuery& q, const Catalog& base) {
    Catalog out;
    std::set<std::string> added;
    for (const auto& name : q.source_names()) {
        if (added.count(name)) continue;
        added.insert(name);
        auto hash = name.find('#');
        if (hash == std::string::npos) {
            out.add(base.at(name));
        } else {
            SourceDecl decl = base.at(name.substr(0, hash));
            decl.name = name;
            out.add(std::move(decl));
        }
    }
    return out;
}

namespace {

void validate_atom(const Atom& atom, const SpjQuery& q, const Catalog& catalog) {
    if (!atom.lhs.is_attr())
        throw ValidationError("selection atom must have an attribute on the left: " + atom.text());
    auto check_ref = [&](const AttrRef& ref) -> AttrKind {
        if (!q.uses_source(ref.source) || !catalog.has(ref.source))
            throw ValidationError("unknown source in selection: " + ref.text());
        const SourceDecl& decl = catalog.at(ref.source);
        if (decl.attr_index(ref.attr) < 0)
            throw ValidationError("unknown attribute in selection: " + ref.text());
        return decl.attr_kind(ref.attr);
    };
    AttrKind lhs_kind = check_ref(atom.lhs.ref);
    AttrKind rhs_kind;
    if (atom.rhs.is_attr()) {
        rhs_kind = check_ref(atom.rhs.ref);
    } else {
        rhs_kind = atom.rhs.tag == Operand::Tag::ts_literal ? AttrKind::timestamp : AttrKind::integer;
        if (rhs_kind == AttrKind::timestamp && atom.rhs.value < 0)
            throw ValidationError("negative timestamp literal: " + atom.text());
    }
    if (lhs_kind != rhs_kind)
        throw ValidationError("comparison of timestamp and integer attributes is forbidden: " + atom.text());
}

void validate_branch(const SpjQuery& q, const Catalog& base) {
    Catalog catalog = effective_catalog(q, base);
    catalog.validate();

    auto check_no_repeat = [](const std::vector<std::string>& names, const char* what) {
        std::set<std::string> seen;
        for (const auto& n : names)
            if (!seen.insert(n).second)
                throw ValidationError(std::string("repeated ") + what + " name: " + n);
    };
    check_no_repeat(q.inf_streams, "infinite-stream");
    check_no_repeat(q.fin_streams, "finite-stream");

    for (const auto& name : q.relations)
        if (catalog.at(name).kind != SourceKind::static_relation)
            throw ValidationError("source " + name + " is not a static relation");
    for (const auto& name : q.inf_streams)
        if (catalog.at(name).kind != SourceKind::infinite_stream)
            throw ValidationError("source " + name + " is not an infinite stream");
    for (const auto& name : q.fin_streams)
        if (catalog.at(name).kind != SourceKind::finite_stream)
            throw ValidationError("source " + name + " is not a finite stream");

    for (const auto& ref : q.project_list) {
        if (!q.uses_source(ref.source) || !catalog.has(ref.source))
            throw ValidationError("unknown source in project list: " + ref.text());
        const SourceDecl& decl = catalog.at(ref.source);
        if (decl.attr_index(ref.attr) < 0)
            throw ValidationError("unknown attribute in project list: " + ref.text());
        if (decl.attr_kind(ref.attr) == AttrKind::timestamp)
            throw ValidationError("timestamp attribute in project list: " + ref.text());
    }

    for (const auto& atom : q.selection) validate_atom(atom, q, catalog);
}

}  // namespace

void validate_query(const UnionQuery& q, const Catalog& catalog) {
    if (q.branches.empty()) throw ValidationError("union query has no branches");
    for (const auto& b : q.branches) validate_branch(b, catalog);
    const SpjQuery& first = q.branches.front();
    int arity = static_cast<int>(first.constants.size() + first.project_list.size());
    for (const auto& b : q.branches) {
        if (b.mode != first.mode)
            throw ValidationError("union branches mix projection modes");
        int a = static_cast<int>(b.constants.size() + b.project_list.size());
        if (a != arity)
            throw ValidationError("union branches have mismatched output arity");
    }
}

}  // namespace bmc
