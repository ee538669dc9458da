#include "bmc/decide.hpp"

#include <algorithm>

namespace bmc {

std::string decision_text(BranchDecision d) {
    switch (d) {
        case BranchDecision::bounded: return "bounded";
        case BranchDecision::not_bounded: return "not-bounded";
        case BranchDecision::not_guaranteed: return "not-guaranteed";
    }
    return "?";
}

std::string decision_text(AggregateDecision d) {
    switch (d) {
        case AggregateDecision::bounded: return "bounded";
        case AggregateDecision::not_guaranteed: return "not-guaranteed";
        case AggregateDecision::trivially_bounded: return "trivially-bounded";
    }
    return "?";
}

namespace {

bool infinite_stream(const Catalog& catalog, const std::string& name) {
    return catalog.has(name) && catalog.at(name).kind == SourceKind::infinite_stream;
}

// Cross joins between two distinct infinite streams; finite streams and
// static relations only influence boundedness.
bool cross_infinite_atom(const Atom& a, const Catalog& catalog) {
    return a.lhs.is_attr() && a.rhs.is_attr() && a.lhs.ref.source != a.rhs.ref.source &&
           infinite_stream(catalog, a.lhs.ref.source) && infinite_stream(catalog, a.rhs.ref.source);
}

bool integer_atom(const Atom& a, const Catalog& catalog) {
    return catalog.at(a.lhs.ref.source).attr_kind(a.lhs.ref.attr) == AttrKind::integer;
}

ConditionReport make_report(std::string id, std::vector<std::string> witnesses) {
    std::sort(witnesses.begin(), witnesses.end());
    witnesses.erase(std::unique(witnesses.begin(), witnesses.end()), witnesses.end());
    return {std::move(id), witnesses.empty(), std::move(witnesses)};
}

}  // namespace

std::vector<ConditionReport> check_preserving(const LtoQuery& q, const DependencyForest& f,
                                              const Catalog& catalog) {
    std::vector<ConditionReport> out;
    bool single_tree = f.component_count == 1;

    // C1: every component reduces to a tree.
    std::vector<std::string> c1;
    for (int comp = 0; comp < f.component_count; ++comp) {
        if (f.is_tree(comp)) continue;
        for (int v : f.comp_members[comp]) {
            auto parents = f.parents_of(v);
            if (parents.size() > 1) {
                std::string w = "stream " + f.vertices[v] + " has " + std::to_string(parents.size()) + " parents:";
                for (int p : parents) w += " " + f.vertices[p];
                c1.push_back(w);
            }
        }
        if (c1.empty()) c1.push_back("component of " + f.vertices[f.comp_members[comp].front()] + " is not a tree");
    }
    out.push_back(make_report("T1.C1", std::move(c1)));

    auto tree_ok = [&](int v) { return f.is_tree(f.component[v]); };

    // C2: integer joins stay between parent/child or siblings; across trees
    // both endpoints sit at the root.
    std::vector<std::string> c2;
    for (const auto& atom : q.query.selection) {
        if (atom.op == CompareOp::ne) continue;
        if (!cross_infinite_atom(atom, catalog) || !integer_atom(atom, catalog)) continue;
        int i = f.index_of(atom.lhs.ref.source);
        int j = f.index_of(atom.rhs.ref.source);
        if (!tree_ok(i) || !tree_ok(j)) continue;  // C1 already failed
        if (f.component[i] == f.component[j]) {
            bool related = f.parent[i] == j || f.parent[j] == i ||
                           (f.parent[i] >= 0 && f.parent[i] == f.parent[j]);
            if (!related)
                c2.push_back("join " + atom.text() + ": " + atom.lhs.ref.source + " and " +
                             atom.rhs.ref.source + " are neither parent-child nor siblings");
        } else {
            if (f.depth[i] != 0 || f.depth[j] != 0)
                c2.push_back("join " + atom.text() + ": cross-tree endpoints must both be roots (depths " +
                             std::to_string(f.depth[i]) + ", " + std::to_string(f.depth[j]) + ")");
        }
    }
    out.push_back(make_report("T1.C2", std::move(c2)));

    // C3: projected integer attributes sit at depth <= 1 and are bounded
    // except for the single-tree root.
    std::vector<std::string> c3;
    for (const auto& ref : q.query.project_list) {
        if (!infinite_stream(catalog, ref.source)) continue;
        int v = f.index_of(ref.source);
        if (v < 0 || !tree_ok(v)) continue;
        int d = f.depth[v];
        if (d > 1) {
            c3.push_back(ref.text() + ": stream depth " + std::to_string(d) + " exceeds 1");
            continue;
        }
        if (!single_tree && !q.bounds.bounded(ref))
            c3.push_back(ref.text() + ": unbounded projected attribute with multiple trees");
        else if (single_tree && d == 1 && !q.bounds.bounded(ref))
            c3.push_back(ref.text() + ": unbounded projected attribute at depth 1");
    }
    out.push_back(make_report("T1.C3", std::move(c3)));

    // C4: integer equality joins have both sides bounded, except the
    // single-tree root arm (other side bounded at depth 1).
    std::vector<std::string> c4;
    for (const auto& atom : q.query.selection) {
        if (atom.op != CompareOp::eq) continue;
        if (!cross_infinite_atom(atom, catalog) || !integer_atom(atom, catalog)) continue;
        const AttrRef& a = atom.lhs.ref;
        const AttrRef& b = atom.rhs.ref;
        int i = f.index_of(a.source);
        int j = f.index_of(b.source);
        if (!tree_ok(i) || !tree_ok(j)) continue;
        if (q.bounds.bounded(a) && q.bounds.bounded(b)) continue;
        if (single_tree && f.depth[i] == 0) {
            if (!(q.bounds.bounded(b) && f.depth[j] == 1))
                c4.push_back("join " + atom.text() + ": root exemption requires " + b.text() +
                             " bounded at depth 1");
        } else if (single_tree && f.depth[j] == 0) {
            if (!(q.bounds.bounded(a) && f.depth[i] == 1))
                c4.push_back("join " + atom.text() + ": root exemption requires " + a.text() +
                             " bounded at depth 1");
        } else {
            c4.push_back("join " + atom.text() + ": both sides must be bounded");
        }
    }
    out.push_back(make_report("T1.C4", std::move(c4)));

    // C5: MaxRef/MinRef empty everywhere but the single-tree root.
    std::vector<std::string> c5;
    for (const auto& name : q.query.inf_streams) {
        size_t total = q.refs.total(name);
        if (total == 0) continue;
        int v = f.index_of(name);
        if (v < 0 || !tree_ok(v)) continue;
        if (single_tree && f.depth[v] == 0) continue;
        if (auto it = q.refs.max_ref.find(name); it != q.refs.max_ref.end())
            for (const auto& attr : it->second) c5.push_back(name + "." + attr + " in MaxRef(" + name + ")");
        if (auto it = q.refs.min_ref.find(name); it != q.refs.min_ref.end())
            for (const auto& attr : it->second) c5.push_back(name + "." + attr + " in MinRef(" + name + ")");
    }
    out.push_back(make_report("T1.C5", std::move(c5)));
    return out;
}

std::vector<ConditionReport> check_eliminating(const LtoQuery& q, const DependencyForest& f,
                                               const Catalog& catalog) {
    (void)f;  // no tree requirement: counters are unnecessary
    std::vector<ConditionReport> out;

    std::vector<std::string> c1;
    for (const auto& ref : q.query.project_list) {
        if (!infinite_stream(catalog, ref.source)) continue;
        if (!q.bounds.bounded(ref)) c1.push_back(ref.text() + " unbounded");
    }
    out.push_back(make_report("T2.C1", std::move(c1)));

    std::vector<std::string> c2;
    for (const auto& atom : q.query.selection) {
        if (atom.op != CompareOp::eq) continue;
        if (!cross_infinite_atom(atom, catalog) || !integer_atom(atom, catalog)) continue;
        if (!q.bounds.bounded(atom.lhs.ref) || !q.bounds.bounded(atom.rhs.ref))
            c2.push_back("join " + atom.text() + ": both sides must be bounded");
    }
    out.push_back(make_report("T2.C2", std::move(c2)));

    std::vector<std::string> c3;
    for (const auto& name : q.query.inf_streams) {
        auto to_elements = [&](const std::set<std::string>& attrs) {
            std::vector<Element> es;
            for (const auto& a : attrs) es.push_back(Element::attribute({name, a}, AttrKind::integer));
            return es;
        };
        int classes = 0;
        if (auto it = q.refs.max_ref.find(name); it != q.refs.max_ref.end() && !it->second.empty())
            classes += equivalence_class_count(to_elements(it->second), q.closure);
        if (auto it = q.refs.min_ref.find(name); it != q.refs.min_ref.end() && !it->second.empty())
            classes += equivalence_class_count(to_elements(it->second), q.closure);
        if (classes > 1)
            c3.push_back("stream " + name + ": " + std::to_string(classes) + " reference classes exceed 1");
    }
    out.push_back(make_report("T2.C3", std::move(c3)));
    return out;
}

Verdict decide(const PreprocessResult& pre, ProjectionMode mode, const Catalog& catalog) {
    (void)catalog;
    Verdict verdict;
    verdict.mode = mode;
    for (const auto& branch : pre.branches)
        for (const auto& d : branch.diagnostics) verdict.notes.push_back(d);

    if (pre.ltos.empty()) {
        verdict.aggregate = AggregateDecision::trivially_bounded;
        return verdict;
    }

    bool all_bounded = true;
    for (size_t i = 0; i < pre.ltos.size(); ++i) {
        const LtoQuery& lto = pre.ltos[i];
        const Catalog& bc = pre.branches[lto.exec_branch].catalog;
        BranchReport report;
        report.lto_index = static_cast<int>(i);
        report.provenance = lto.provenance;
        report.query_text = lto.query.to_text();

        size_t l = lto.query.inf_streams.size();
        if (l <= 1) {
            // Every predicate is a filter; all other inputs are finite.
            report.decision = BranchDecision::bounded;
        } else {
            DependencyForest forest = build_forest(lto.query, bc, lto.closure);
            report.conditions = mode == ProjectionMode::preserving
                                    ? check_preserving(lto, forest, bc)
                                    : check_eliminating(lto, forest, bc);
            bool holds = std::all_of(report.conditions.begin(), report.conditions.end(),
                                     [](const ConditionReport& c) { return c.holds; });
            if (holds)
                report.decision = BranchDecision::bounded;
            else
                report.decision = mode == ProjectionMode::preserving ? BranchDecision::not_bounded
                                                                     : BranchDecision::not_guaranteed;
        }
        all_bounded = all_bounded && report.decision == BranchDecision::bounded;
        verdict.branches.push_back(std::move(report));
    }
    verdict.aggregate = all_bounded ? AggregateDecision::bounded : AggregateDecision::not_guaranteed;
    return verdict;
}

Verdict decide(const UnionQuery& u, const Catalog& catalog) {
    PreprocessResult pre = preprocess(u, catalog);
    return decide(pre, u.mode(), catalog);
}

}  // namespace bmc
