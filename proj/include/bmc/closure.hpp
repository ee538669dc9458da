#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bmc/catalog.hpp"
#include "bmc/query.hpp"

namespace bmc {

// Element of the predicate universe: an attribute or a typed literal.
struct Element {
    enum class Tag { attribute, literal };

    Tag tag = Tag::literal;
    AttrKind kind = AttrKind::integer;
    AttrRef ref;      // tag == attribute
    Value value = 0;  // tag == literal

    static Element attribute(AttrRef r, AttrKind k) { return {Tag::attribute, k, std::move(r), 0}; }
    static Element literal(Value v, AttrKind k) { return {Tag::literal, k, {}, v}; }
    static Element from_operand(const Operand& op, const Catalog& catalog);

    bool is_attr() const { return tag == Tag::attribute; }
    bool is_literal() const { return tag == Tag::literal; }
    std::string text() const;
    auto operator<=>(const Element&) const = default;
};

struct ElemAtom {
    Element lhs;
    CompareOp op = CompareOp::eq;
    Element rhs;

    static ElemAtom from_atom(const Atom& a, const Catalog& catalog);
};

// Transitive closure P+ of a selection: least fixpoint of order/equality
// inference over the element universe, with literal order axioms.
class PredicateClosure {
public:
    const std::vector<Element>& universe() const { return elems_; }
    bool satisfiable() const { return satisfiable_; }

    int find(const Element& e) const;  // -1 when absent

    bool lt(int i, int j) const { return rel(i, j) & kLt; }
    bool eq(int i, int j) const { return i == j || (rel(i, j) & kEq); }
    bool ne(int i, int j) const { return rel(i, j) & kNe; }

    // Element-level queries; false when an element is outside the universe.
    bool lt(const Element& a, const Element& b) const;
    bool eq(const Element& a, const Element& b) const;
    bool ne(const Element& a, const Element& b) const;

    // Def 4.1: (e_i < e_j) is redundant if an interpolating element or a
    // constant pinning exists.
    bool is_redundant_lt(int i, int j) const;

    // Sorted "lhs OP rhs" lines over non-reflexive derived atoms.
    std::vector<std::string> dump_lines() const;
    std::string signature() const;

    friend PredicateClosure close(std::span<const ElemAtom> atoms, std::span<const Element> extra_universe);

private:
    static constexpr unsigned kLt = 1, kEq = 2, kNe = 4;

    unsigned rel(int i, int j) const { return rel_[static_cast<size_t>(i) * elems_.size() + j]; }

    std::vector<Element> elems_;
    std::map<Element, int> index_;
    std::vector<unsigned char> rel_;
    bool satisfiable_ = true;
};

PredicateClosure close(std::span<const ElemAtom> atoms, std::span<const Element> extra_universe = {});

// Universe restricted to the selection's own elements (the module contract).
PredicateClosure close_selection(const std::vector<Atom>& selection, const Catalog& catalog);

// Universe extended with every attribute of the query's sources and every
// integer constant of the query; used by preprocessing and the decider.
PredicateClosure close_query(const SpjQuery& q, const Catalog& catalog);

struct AttrBounds {
    bool lower = false;
    bool upper = false;
    bool bounded() const { return lower && upper; }
};

// Def 2.5 flags per attribute; static-relation attributes always bounded.
struct BoundsInfo {
    std::map<AttrRef, AttrBounds> attrs;

    bool bounded(const AttrRef& ref) const;
    bool lower_bounded(const AttrRef& ref) const;
    bool upper_bounded(const AttrRef& ref) const;
};

BoundsInfo bounds(const PredicateClosure& c, const Catalog& catalog);

struct RefSets {
    std::map<std::string, std::set<std::string>> max_ref;  // per infinite stream
    std::map<std::string, std::set<std::string>> min_ref;

    size_t total(const std::string& stream) const;
};

// Def 5.4: unbounded integer attributes in non-redundant cross-stream
// inequalities between infinite streams.
RefSets ref_sets(const PredicateClosure& c, const BoundsInfo& b, const Catalog& catalog);

int equivalence_class_count(const std::vector<Element>& elements, const PredicateClosure& c);

// Def 4.3: every pair resolved by exactly one of <, =, >.
bool totally_ordered(const std::vector<Element>& elements, const PredicateClosure& c);

}  // namespace bmc
