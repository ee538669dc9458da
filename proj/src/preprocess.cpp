#include "bmc/preprocess.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace bmc {

namespace {

bool is_stream_source(const Catalog& catalog, const std::string& name) {
    return catalog.has(name) && catalog.at(name).kind != SourceKind::static_relation;
}

bool is_cross_stream_atom(const Atom& a, const Catalog& catalog) {
    if (!a.lhs.is_attr() || !a.rhs.is_attr()) return false;
    if (a.lhs.ref.source == a.rhs.ref.source) return false;
    return is_stream_source(catalog, a.lhs.ref.source) && is_stream_source(catalog, a.rhs.ref.source);
}

}  // namespace

std::vector<SpjQuery> split_disequality(const SpjQuery& q, const Catalog& catalog) {
    std::vector<size_t> targets;
    for (size_t i = 0; i < q.selection.size(); ++i)
        if (q.selection[i].op == CompareOp::ne && is_cross_stream_atom(q.selection[i], catalog))
            targets.push_back(i);
    if (targets.empty()) return {q};

    std::vector<SpjQuery> out;
    size_t combos = size_t{1} << targets.size();
    for (size_t mask = 0; mask < combos; ++mask) {
        SpjQuery copy = q;
        for (size_t t = 0; t < targets.size(); ++t)
            copy.selection[targets[t]].op = (mask >> t) & 1 ? CompareOp::gt : CompareOp::lt;
        out.push_back(std::move(copy));
    }
    return out;
}

namespace {

std::string fresh_name(const Catalog& catalog, std::string base) {
    std::string name = base;
    int suffix = 2;
    while (catalog.has(name)) name = base + "_" + std::to_string(suffix++);
    return name;
}

void rewrite_ref(AttrRef& ref, const MergedStreamSpec& spec, const Catalog& catalog) {
    if (std::find(spec.constituents.begin(), spec.constituents.end(), ref.source) == spec.constituents.end())
        return;
    const SourceDecl& decl = catalog.at(ref.source);
    if (decl.attr_kind(ref.attr) == AttrKind::timestamp) {
        ref = {spec.name, spec.ts_attr};
    } else {
        ref = {spec.name, spec.attr_map.at({ref.source, ref.attr})};
    }
}

}  // namespace

SpjQuery merge_equal_timestamp_streams(const SpjQuery& q, Catalog& catalog,
                                       std::vector<MergedStreamSpec>& out_specs) {
    SpjQuery cur = q;
    PredicateClosure closure = close_query(cur, catalog);

    auto streams = cur.stream_names();
    int n = static_cast<int>(streams.size());
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> root = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < n; ++i) {
        const SourceDecl& a = catalog.at(streams[i]);
        Element ea = Element::attribute({a.name, a.timestamp_attr()}, AttrKind::timestamp);
        for (int j = i + 1; j < n; ++j) {
            const SourceDecl& b = catalog.at(streams[j]);
            Element eb = Element::attribute({b.name, b.timestamp_attr()}, AttrKind::timestamp);
            if (closure.eq(ea, eb)) parent[root(i)] = root(j);
        }
    }

    std::map<int, std::vector<std::string>> classes;
    for (int i = 0; i < n; ++i) classes[root(i)].push_back(streams[i]);

    for (auto& [rep, members] : classes) {
        if (members.size() < 2) continue;

        MergedStreamSpec spec;
        spec.constituents = members;
        std::string base;
        for (const auto& m : members) base += (base.empty() ? "" : "_") + m;
        spec.name = fresh_name(catalog, base);

        SourceDecl merged;
        merged.name = spec.name;
        merged.kind = SourceKind::infinite_stream;
        for (const auto& m : members) {
            const SourceDecl& decl = catalog.at(m);
            if (decl.kind == SourceKind::finite_stream) {
                merged.kind = SourceKind::finite_stream;
                Timestamp last = *decl.last_timestamp;
                merged.last_timestamp = merged.last_timestamp
                                            ? std::min(*merged.last_timestamp, last)
                                            : last;
            }
            for (const auto& attr : decl.schema) {
                if (attr.kind != AttrKind::integer) continue;
                std::string name = m + "_" + attr.name;
                spec.attr_map[{m, attr.name}] = name;
                merged.schema.push_back({name, AttrKind::integer});
            }
        }
        spec.ts_attr = "ts";
        while (std::any_of(merged.schema.begin(), merged.schema.end(),
                           [&](const AttrDecl& a) { return a.name == spec.ts_attr; }))
            spec.ts_attr += "_";
        merged.schema.push_back({spec.ts_attr, AttrKind::timestamp});
        catalog.add(merged);

        // Replace the first constituent in place, drop the rest.
        auto replace_in = [&](std::vector<std::string>& list, bool keep_here) {
            bool placed = false;
            std::vector<std::string> next;
            for (const auto& name : list) {
                if (std::find(members.begin(), members.end(), name) == members.end()) {
                    next.push_back(name);
                } else if (!placed && keep_here) {
                    next.push_back(spec.name);
                    placed = true;
                }
            }
            list = std::move(next);
        };
        bool merged_finite = merged.kind == SourceKind::finite_stream;
        bool first_in_inf = std::find(members.begin(), members.end(), cur.inf_streams.empty() ? "" : cur.inf_streams.front()) != members.end();
        (void)first_in_inf;
        replace_in(cur.inf_streams, !merged_finite);
        replace_in(cur.fin_streams, merged_finite);
        if (!cur.uses_source(spec.name)) {
            // All constituents were in the other list.
            (merged_finite ? cur.fin_streams : cur.inf_streams).push_back(spec.name);
        }

        for (auto& ref : cur.project_list) rewrite_ref(ref, spec, catalog);
        std::vector<Atom> kept;
        for (auto atom : cur.selection) {
            if (atom.lhs.is_attr()) rewrite_ref(atom.lhs.ref, spec, catalog);
            if (atom.rhs.is_attr()) rewrite_ref(atom.rhs.ref, spec, catalog);
            if (atom.op == CompareOp::eq && atom.lhs == atom.rhs) continue;  // (K = K)
            kept.push_back(std::move(atom));
        }
        cur.selection = std::move(kept);
        out_specs.push_back(std::move(spec));
    }
    return cur;
}

SpjQuery demote_to_finite(const SpjQuery& q, Catalog& catalog, std::vector<std::string>& diagnostics) {
    SpjQuery cur = q;
    bool changed = true;
    while (changed) {
        changed = false;
        PredicateClosure closure = close_query(cur, catalog);
        for (auto it = cur.inf_streams.begin(); it != cur.inf_streams.end(); ++it) {
            const SourceDecl& decl = catalog.at(*it);
            Element ts = Element::attribute({decl.name, decl.timestamp_attr()}, AttrKind::timestamp);
            int idx = closure.find(ts);
            if (idx < 0) continue;

            std::optional<Timestamp> last;
            bool bounded_via_finite = false;
            for (int j = 0; j < static_cast<int>(closure.universe().size()); ++j) {
                const Element& e = closure.universe()[j];
                if (e.kind != AttrKind::timestamp || j == idx) continue;
                if (e.is_literal()) {
                    Timestamp candidate = -1;
                    if (closure.lt(idx, j)) candidate = e.value - 1;  // discrete flow: predecessor
                    else if (closure.eq(idx, j)) candidate = e.value;
                    else continue;
                    candidate = std::max<Timestamp>(candidate, 0);
                    last = last ? std::min(*last, candidate) : candidate;
                } else if (closure.lt(idx, j)) {
                    if (catalog.has(e.ref.source) &&
                        catalog.at(e.ref.source).kind == SourceKind::finite_stream)
                        bounded_via_finite = true;
                }
            }
            if (!last && !bounded_via_finite) continue;

            SourceDecl demoted = decl;
            demoted.kind = SourceKind::finite_stream;
            demoted.last_timestamp = last;
            if (!last)
                diagnostics.push_back("stream " + decl.name +
                                      ": timestamp upper-bounded only through a finite source; "
                                      "no last timestamp derivable, execution refused");
            catalog.replace(std::move(demoted));
            cur.fin_streams.push_back(*it);
            cur.inf_streams.erase(it);
            changed = true;
            break;
        }
    }
    return cur;
}

PreparedBranch prepare_branch(const SpjQuery& q, const Catalog& catalog, std::string provenance) {
    PreparedBranch branch;
    branch.catalog = effective_catalog(q, catalog);
    branch.provenance = std::move(provenance);
    SpjQuery merged = merge_equal_timestamp_streams(q, branch.catalog, branch.merges);
    branch.query = demote_to_finite(merged, branch.catalog, branch.diagnostics);
    branch.executable = branch.diagnostics.empty();
    branch.closure = close_query(branch.query, branch.catalog);
    branch.bounds = bounds(branch.closure, branch.catalog);
    branch.refs = ref_sets(branch.closure, branch.bounds, branch.catalog);
    return branch;
}

namespace {

// All ordered set partitions (weak orders) of {0..n-1}.
void weak_orders(int n, std::vector<std::vector<std::vector<int>>>& out) {
    std::vector<std::vector<int>> blocks;
    std::vector<int> items(n);
    for (int i = 0; i < n; ++i) items[i] = i;
    std::function<void(size_t)> rec = [&](size_t next) {
        if (next == items.size()) {
            out.push_back(blocks);
            return;
        }
        for (size_t b = 0; b <= blocks.size(); ++b) {
            if (b < blocks.size()) {
                blocks[b].push_back(items[next]);
                rec(next + 1);
                blocks[b].pop_back();
            } else {
                // New block can be inserted at any rank position.
                for (size_t pos = 0; pos <= blocks.size(); ++pos) {
                    blocks.insert(blocks.begin() + pos, {items[next]});
                    rec(next + 1);
                    blocks.erase(blocks.begin() + pos);
                }
            }
        }
    };
    rec(0);
}

// Rank of each element under a weak order; equal rank means equal.
std::vector<int> ranks_of(const std::vector<std::vector<int>>& blocks, int n) {
    std::vector<int> rank(n, -1);
    for (size_t b = 0; b < blocks.size(); ++b)
        for (int item : blocks[b]) rank[item] = static_cast<int>(b);
    return rank;
}

Atom make_order_atom(const Element& a, const Element& b, CompareOp op) {
    auto to_operand = [](const Element& e) {
        if (e.is_attr()) return Operand::attribute(e.ref);
        return e.kind == AttrKind::timestamp ? Operand::ts_lit(e.value) : Operand::int_lit(e.value);
    };
    if (a.is_attr()) return {to_operand(a), op, to_operand(b)};
    return {to_operand(b), flip(op), to_operand(a)};
}

}  // namespace

std::vector<LtoQuery> derive_lto_queries(const PreparedBranch& branch) {
    if (!branch.closure.satisfiable()) return {};
    const SpjQuery& q = branch.query;
    const Catalog& catalog = branch.catalog;

    std::set<Value> constant_values(q.constants.begin(), q.constants.end());
    for (const auto& atom : q.selection)
        if (atom.rhs.is_literal() && atom.rhs.tag == Operand::Tag::int_literal)
            constant_values.insert(atom.rhs.value);

    struct StreamChoice {
        std::vector<Element> elems;
        std::vector<std::vector<int>> consistent_ranks;  // per accepted weak order
        std::vector<std::string> descriptions;
    };
    std::vector<StreamChoice> per_stream;

    for (const auto& name : q.inf_streams) {
        StreamChoice choice;
        for (const auto& attr : catalog.at(name).integer_attrs())
            choice.elems.push_back(Element::attribute({name, attr}, AttrKind::integer));
        for (Value v : constant_values) choice.elems.push_back(Element::literal(v, AttrKind::integer));
        int m = static_cast<int>(choice.elems.size());
        if (m <= 1) {
            choice.consistent_ranks.push_back(std::vector<int>(m, 0));
            choice.descriptions.push_back("-");
            per_stream.push_back(std::move(choice));
            continue;
        }
        std::vector<std::vector<std::vector<int>>> orders;
        weak_orders(m, orders);
        for (const auto& blocks : orders) {
            auto rank = ranks_of(blocks, m);
            bool ok = true;
            for (int i = 0; i < m && ok; ++i) {
                for (int j = i + 1; j < m && ok; ++j) {
                    const Element &a = choice.elems[i], &b = choice.elems[j];
                    if (rank[i] < rank[j] && (branch.closure.lt(b, a) || branch.closure.eq(a, b))) ok = false;
                    if (rank[i] > rank[j] && (branch.closure.lt(a, b) || branch.closure.eq(a, b))) ok = false;
                    if (rank[i] == rank[j] &&
                        (branch.closure.lt(a, b) || branch.closure.lt(b, a) || branch.closure.ne(a, b)))
                        ok = false;
                }
            }
            if (!ok) continue;
            choice.consistent_ranks.push_back(rank);
            std::string desc = name + ": ";
            for (size_t b = 0; b < blocks.size(); ++b) {
                if (b) desc += " < ";
                for (size_t k = 0; k < blocks[b].size(); ++k)
                    desc += (k ? "=" : "") + choice.elems[blocks[b][k]].text();
            }
            choice.descriptions.push_back(desc);
        }
        per_stream.push_back(std::move(choice));
    }

    std::vector<LtoQuery> out;
    std::set<std::string> seen;
    std::vector<size_t> pick(per_stream.size(), 0);

    std::function<void(size_t)> rec = [&](size_t s) {
        if (s < per_stream.size()) {
            for (size_t i = 0; i < per_stream[s].consistent_ranks.size(); ++i) {
                pick[s] = i;
                rec(s + 1);
            }
            return;
        }
        std::vector<Atom> added;
        std::string order_desc;
        for (size_t si = 0; si < per_stream.size(); ++si) {
            const auto& choice = per_stream[si];
            const auto& rank = choice.consistent_ranks[pick[si]];
            if (choice.descriptions[pick[si]] != "-") {
                if (!order_desc.empty()) order_desc += "; ";
                order_desc += choice.descriptions[pick[si]];
            }
            int m = static_cast<int>(choice.elems.size());
            for (int i = 0; i < m; ++i) {
                for (int j = i + 1; j < m; ++j) {
                    const Element &a = choice.elems[i], &b = choice.elems[j];
                    if (a.is_literal() && b.is_literal()) continue;
                    bool decided = branch.closure.lt(a, b) || branch.closure.lt(b, a) ||
                                   branch.closure.eq(a, b);
                    if (decided) continue;
                    CompareOp op = rank[i] == rank[j] ? CompareOp::eq
                                                      : (rank[i] < rank[j] ? CompareOp::lt : CompareOp::gt);
                    added.push_back(make_order_atom(a, b, op));
                }
            }
        }
        LtoQuery lto;
        lto.query = q;
        lto.query.selection.insert(lto.query.selection.end(), added.begin(), added.end());
        lto.closure = close_query(lto.query, catalog);
        if (!lto.closure.satisfiable()) return;
        if (!seen.insert(lto.closure.signature()).second) return;
        lto.bounds = bounds(lto.closure, catalog);
        lto.refs = ref_sets(lto.closure, lto.bounds, catalog);
        lto.added_atoms = std::move(added);
        lto.provenance = branch.provenance + (order_desc.empty() ? "" : " | " + order_desc);
        out.push_back(std::move(lto));
    };
    rec(0);
    return out;
}

PreprocessResult preprocess(const UnionQuery& u, const Catalog& catalog) {
    PreprocessResult result;
    for (size_t bi = 0; bi < u.branches.size(); ++bi) {
        auto splits = split_disequality(u.branches[bi], catalog);
        for (size_t si = 0; si < splits.size(); ++si) {
            std::string provenance = "branch " + std::to_string(bi + 1);
            if (splits.size() > 1) provenance += ", split " + std::to_string(si + 1);
            PreparedBranch branch = prepare_branch(splits[si], catalog, provenance);
            int branch_index = static_cast<int>(result.branches.size());
            auto ltos = derive_lto_queries(branch);
            for (auto& lto : ltos) {
                lto.exec_branch = branch_index;
                result.ltos.push_back(std::move(lto));
            }
            result.branches.push_back(std::move(branch));
        }
    }
    return result;
}

std::vector<std::string> modified_lto_violations(const LtoQuery& q, const Catalog& catalog) {
    std::vector<std::string> out;
    if (!q.closure.satisfiable()) out.push_back("selection unsatisfiable");

    for (const auto& atom : q.query.selection)
        if (atom.op == CompareOp::ne && is_cross_stream_atom(atom, catalog))
            out.push_back("cross-stream disequality: " + atom.text());

    auto streams = q.query.stream_names();
    for (size_t i = 0; i < streams.size(); ++i) {
        const SourceDecl& a = catalog.at(streams[i]);
        Element ea = Element::attribute({a.name, a.timestamp_attr()}, AttrKind::timestamp);
        for (size_t j = i + 1; j < streams.size(); ++j) {
            const SourceDecl& b = catalog.at(streams[j]);
            Element eb = Element::attribute({b.name, b.timestamp_attr()}, AttrKind::timestamp);
            if (q.closure.eq(ea, eb))
                out.push_back("cross-stream timestamp equality: " + streams[i] + ", " + streams[j]);
        }
    }

    std::set<Value> constant_values(q.query.constants.begin(), q.query.constants.end());
    for (const auto& atom : q.query.selection)
        if (atom.rhs.is_literal() && atom.rhs.tag == Operand::Tag::int_literal)
            constant_values.insert(atom.rhs.value);

    for (const auto& name : q.query.inf_streams) {
        const SourceDecl& decl = catalog.at(name);
        Element ts = Element::attribute({name, decl.timestamp_attr()}, AttrKind::timestamp);
        int idx = q.closure.find(ts);
        if (idx >= 0) {
            for (int j = 0; j < static_cast<int>(q.closure.universe().size()); ++j) {
                const Element& e = q.closure.universe()[j];
                if (j == idx || e.kind != AttrKind::timestamp) continue;
                bool finite_attr = e.is_attr() && catalog.has(e.ref.source) &&
                                   catalog.at(e.ref.source).kind == SourceKind::finite_stream;
                if ((e.is_literal() || finite_attr) && (q.closure.lt(idx, j) || q.closure.eq(idx, j)))
                    out.push_back("infinite stream with upper-bounded timestamp: " + name);
            }
        }
        std::vector<Element> elems;
        for (const auto& attr : decl.integer_attrs())
            elems.push_back(Element::attribute({name, attr}, AttrKind::integer));
        for (Value v : constant_values) elems.push_back(Element::literal(v, AttrKind::integer));
        if (!totally_ordered(elems, q.closure))
            out.push_back("per-stream element set not totally ordered: " + name);
    }
    return out;
}

}  // namespace bmc
