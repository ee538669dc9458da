#include "bmc/closure.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace bmc {

Element Element::from_operand(const Operand& op, const Catalog& catalog) {
    switch (op.tag) {
        case Operand::Tag::attribute:
            return attribute(op.ref, catalog.at(op.ref.source).attr_kind(op.ref.attr));
        case Operand::Tag::int_literal:
            return literal(op.value, AttrKind::integer);
        case Operand::Tag::ts_literal:
            return literal(op.value, AttrKind::timestamp);
    }
    throw Error("bad operand");
}

std::string Element::text() const {
    if (is_attr()) return ref.text();
    return std::to_string(value) + (kind == AttrKind::timestamp ? "t" : "");
}

ElemAtom ElemAtom::from_atom(const Atom& a, const Catalog& catalog) {
    return {Element::from_operand(a.lhs, catalog), a.op, Element::from_operand(a.rhs, catalog)};
}

int PredicateClosure::find(const Element& e) const {
    auto it = index_.find(e);
    return it == index_.end() ? -1 : it->second;
}

bool PredicateClosure::lt(const Element& a, const Element& b) const {
    int i = find(a), j = find(b);
    return i >= 0 && j >= 0 && lt(i, j);
}

bool PredicateClosure::eq(const Element& a, const Element& b) const {
    if (a == b) return true;
    int i = find(a), j = find(b);
    return i >= 0 && j >= 0 && eq(i, j);
}

bool PredicateClosure::ne(const Element& a, const Element& b) const {
    int i = find(a), j = find(b);
    return i >= 0 && j >= 0 && ne(i, j);
}

bool PredicateClosure::is_redundant_lt(int i, int j) const {
    int n = static_cast<int>(elems_.size());
    for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (lt(i, k) && lt(k, j)) return true;  // interpolating element
    }
    for (int k = 0; k < n; ++k) {
        if (!elems_[k].is_literal() || elems_[k].kind != elems_[i].kind) continue;
        if (k != i && eq(i, k) && lt(k, j)) return true;  // e1 pinned to a constant
        if (k != j && lt(i, k) && eq(j, k)) return true;  // e2 pinned to a constant
    }
    return false;
}

std::vector<std::string> PredicateClosure::dump_lines() const {
    std::vector<std::string> lines;
    int n = static_cast<int>(elems_.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (lt(i, j)) lines.push_back(elems_[i].text() + " < " + elems_[j].text());
            if (i < j && eq(i, j)) lines.push_back(elems_[i].text() + " = " + elems_[j].text());
            if (i < j && ne(i, j)) lines.push_back(elems_[i].text() + " != " + elems_[j].text());
        }
    }
    std::sort(lines.begin(), lines.end());
    return lines;
}

std::string PredicateClosure::signature() const {
    std::ostringstream out;
    for (const auto& e : elems_) out << e.text() << ";";
    out << "|";
    for (unsigned char b : rel_) out << static_cast<int>(b);
    out << "|" << (satisfiable_ ? 1 : 0);
    return out.str();
}

PredicateClosure close(std::span<const ElemAtom> atoms, std::span<const Element> extra_universe) {
    PredicateClosure c;
    std::set<Element> all;
    for (const auto& a : atoms) {
        all.insert(a.lhs);
        all.insert(a.rhs);
    }
    for (const auto& e : extra_universe) all.insert(e);
    c.elems_.assign(all.begin(), all.end());
    int n = static_cast<int>(c.elems_.size());
    for (int i = 0; i < n; ++i) c.index_[c.elems_[i]] = i;
    c.rel_.assign(static_cast<size_t>(n) * n, 0);

    auto set = [&](int i, int j, unsigned bit) { c.rel_[static_cast<size_t>(i) * n + j] |= bit; };
    auto get = [&](int i, int j) { return c.rel_[static_cast<size_t>(i) * n + j]; };

    // Literal order axioms, per kind.
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j || !c.elems_[i].is_literal() || !c.elems_[j].is_literal()) continue;
            if (c.elems_[i].kind != c.elems_[j].kind) continue;
            if (c.elems_[i].value < c.elems_[j].value) set(i, j, PredicateClosure::kLt);
        }
    }

    for (const auto& a : atoms) {
        int i = c.index_.at(a.lhs), j = c.index_.at(a.rhs);
        switch (a.op) {
            case CompareOp::lt: set(i, j, PredicateClosure::kLt); break;
            case CompareOp::gt: set(j, i, PredicateClosure::kLt); break;
            case CompareOp::eq:
                set(i, j, PredicateClosure::kEq);
                set(j, i, PredicateClosure::kEq);
                break;
            case CompareOp::ne:
                set(i, j, PredicateClosure::kNe);
                set(j, i, PredicateClosure::kNe);
                break;
        }
    }

    // Least fixpoint of: < transitivity, substitution through =, = transitivity,
    // != substitution through =, and < implying !=.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                unsigned ij = get(i, j);
                if (!ij) continue;
                if ((ij & PredicateClosure::kLt) && !(get(i, j) & PredicateClosure::kNe)) {
                    set(i, j, PredicateClosure::kNe);
                    set(j, i, PredicateClosure::kNe);
                    changed = true;
                }
                for (int k = 0; k < n; ++k) {
                    unsigned jk = get(j, k);
                    if (!jk) continue;
                    unsigned derived = 0;
                    if ((ij & PredicateClosure::kLt) && (jk & (PredicateClosure::kLt | PredicateClosure::kEq)))
                        derived |= PredicateClosure::kLt;
                    if ((ij & PredicateClosure::kEq) && (jk & PredicateClosure::kLt))
                        derived |= PredicateClosure::kLt;
                    if ((ij & PredicateClosure::kEq) && (jk & PredicateClosure::kEq))
                        derived |= PredicateClosure::kEq;
                    if ((ij & PredicateClosure::kNe) && (jk & PredicateClosure::kEq))
                        derived |= PredicateClosure::kNe;
                    if ((ij & PredicateClosure::kEq) && (jk & PredicateClosure::kNe))
                        derived |= PredicateClosure::kNe;
                    if (i == k) continue;  // reflexive derivations checked below
                    unsigned before = get(i, k);
                    if ((before | derived) != before) {
                        set(i, k, derived);
                        if (derived & PredicateClosure::kEq) set(k, i, PredicateClosure::kEq);
                        if (derived & PredicateClosure::kNe) set(k, i, PredicateClosure::kNe);
                        changed = true;
                    }
                }
            }
        }
    }

    // Contradiction patterns.
    c.satisfiable_ = true;
    for (int i = 0; i < n && c.satisfiable_; ++i) {
        for (int j = 0; j < n; ++j) {
            unsigned ij = get(i, j);
            if (i == j && (ij & (PredicateClosure::kLt | PredicateClosure::kNe))) {
                c.satisfiable_ = false;
                break;
            }
            if (i == j) continue;
            bool lt_both = (ij & PredicateClosure::kLt) && (get(j, i) & PredicateClosure::kLt);
            bool lt_eq = (ij & PredicateClosure::kLt) && ((ij & PredicateClosure::kEq) || (get(j, i) & PredicateClosure::kEq));
            bool eq_ne = (ij & PredicateClosure::kEq) && (ij & PredicateClosure::kNe);
            if (lt_both || lt_eq || eq_ne) {
                c.satisfiable_ = false;
                break;
            }
        }
    }
    // Derived i<j with i<i via substitution chains: covered because the
    // fixpoint also derives lt(i,i) when i=j collapses; catch it anyway.
    for (int i = 0; i < n && c.satisfiable_; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && (get(i, j) & PredicateClosure::kEq) && (get(i, j) & PredicateClosure::kLt))
                c.satisfiable_ = false;
    return c;
}

PredicateClosure close_selection(const std::vector<Atom>& selection, const Catalog& catalog) {
    std::vector<ElemAtom> atoms;
    atoms.reserve(selection.size());
    for (const auto& a : selection) atoms.push_back(ElemAtom::from_atom(a, catalog));
    return close(atoms);
}

PredicateClosure close_query(const SpjQuery& q, const Catalog& catalog) {
    std::vector<ElemAtom> atoms;
    atoms.reserve(q.selection.size());
    for (const auto& a : q.selection) atoms.push_back(ElemAtom::from_atom(a, catalog));
    std::vector<Element> extra;
    for (const auto& name : q.source_names()) {
        const SourceDecl& decl = catalog.at(name);
        for (const auto& attr : decl.schema)
            extra.push_back(Element::attribute({name, attr.name}, attr.kind));
    }
    for (Value v : q.constants) extra.push_back(Element::literal(v, AttrKind::integer));
    return close(atoms, extra);
}

bool BoundsInfo::bounded(const AttrRef& ref) const {
    auto it = attrs.find(ref);
    return it != attrs.end() && it->second.bounded();
}

bool BoundsInfo::lower_bounded(const AttrRef& ref) const {
    auto it = attrs.find(ref);
    return it != attrs.end() && it->second.lower;
}

bool BoundsInfo::upper_bounded(const AttrRef& ref) const {
    auto it = attrs.find(ref);
    return it != attrs.end() && it->second.upper;
}

namespace {

bool element_is_bound_source(const Element& e, const Catalog& catalog) {
    if (e.is_literal()) return true;
    if (!catalog.has(e.ref.source)) return false;
    return catalog.at(e.ref.source).kind == SourceKind::static_relation;
}

}  // namespace

BoundsInfo bounds(const PredicateClosure& c, const Catalog& catalog) {
    BoundsInfo info;
    int n = static_cast<int>(c.universe().size());
    for (const auto& decl : catalog.sources()) {
        for (const auto& attr : decl.schema) {
            if (attr.kind != AttrKind::integer) continue;
            AttrRef ref{decl.name, attr.name};
            AttrBounds b;
            if (decl.kind == SourceKind::static_relation) {
                b.lower = b.upper = true;
            } else {
                int i = c.find(Element::attribute(ref, AttrKind::integer));
                if (i >= 0) {
                    for (int j = 0; j < n; ++j) {
                        if (j == i || !element_is_bound_source(c.universe()[j], catalog)) continue;
                        if (c.lt(j, i) || c.eq(i, j)) b.lower = true;  // A > e or A = e
                        if (c.lt(i, j) || c.eq(i, j)) b.upper = true;  // A < e or A = e
                    }
                }
            }
            info.attrs[ref] = b;
        }
    }
    return info;
}

size_t RefSets::total(const std::string& stream) const {
    size_t n = 0;
    if (auto it = max_ref.find(stream); it != max_ref.end()) n += it->second.size();
    if (auto it = min_ref.find(stream); it != min_ref.end()) n += it->second.size();
    return n;
}

RefSets ref_sets(const PredicateClosure& c, const BoundsInfo& b, const Catalog& catalog) {
    RefSets refs;
    int n = static_cast<int>(c.universe().size());
    auto infinite = [&](const std::string& name) {
        return catalog.has(name) && catalog.at(name).kind == SourceKind::infinite_stream;
    };
    for (const auto& decl : catalog.sources()) {
        if (decl.kind != SourceKind::infinite_stream) continue;
        refs.max_ref[decl.name];
        refs.min_ref[decl.name];
        for (const auto& attr : decl.schema) {
            if (attr.kind != AttrKind::integer) continue;
            AttrRef ref{decl.name, attr.name};
            if (b.bounded(ref)) continue;
            int i = c.find(Element::attribute(ref, AttrKind::integer));
            if (i < 0) continue;
            for (int j = 0; j < n; ++j) {
                const Element& other = c.universe()[j];
                if (!other.is_attr() || other.kind != AttrKind::integer) continue;
                if (other.ref.source == decl.name || !infinite(other.ref.source)) continue;
                if (c.lt(j, i) && !c.is_redundant_lt(j, i)) refs.max_ref[decl.name].insert(attr.name);
                if (c.lt(i, j) && !c.is_redundant_lt(i, j)) refs.min_ref[decl.name].insert(attr.name);
            }
        }
    }
    return refs;
}

int equivalence_class_count(const std::vector<Element>& elements, const PredicateClosure& c) {
    int m = static_cast<int>(elements.size());
    std::vector<int> parent(m);
    for (int i = 0; i < m; ++i) parent[i] = i;
    std::function<int(int)> find_root = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (c.eq(elements[i], elements[j])) parent[find_root(i)] = find_root(j);
    std::set<int> roots;
    for (int i = 0; i < m; ++i) roots.insert(find_root(i));
    return static_cast<int>(roots.size());
}

bool totally_ordered(const std::vector<Element>& elements, const PredicateClosure& c) {
    int m = static_cast<int>(elements.size());
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            if (elements[i] == elements[j]) continue;
            int a = c.find(elements[i]), b = c.find(elements[j]);
            if (a < 0 || b < 0) return false;
            int resolved = (c.lt(a, b) ? 1 : 0) + (c.lt(b, a) ? 1 : 0) + (c.eq(a, b) ? 1 : 0);
            if (resolved != 1) return false;
        }
    }
    return true;
}

}  // namespace bmc
