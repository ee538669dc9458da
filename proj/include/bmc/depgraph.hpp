#pragma once

#include <set>
#include <string>
#include <vector>

#include "bmc/closure.hpp"

namespace bmc {

// Timestamp dependency forest over the infinite streams of one query.
// An edge (parent -> child) means the parent's timestamps exceed the
// child's in P+, so parent tuples join only strictly earlier child tuples.
struct DependencyForest {
    std::vector<std::string> vertices;              // sorted
    std::set<std::pair<int, int>> raw_edges;        // parent -> child, transitively closed
    std::set<std::pair<int, int>> reduced_edges;    // unique transitive reduction
    std::vector<int> component;                     // per vertex
    int component_count = 0;
    std::vector<std::vector<int>> comp_members;
    std::vector<bool> comp_is_tree;
    std::vector<int> comp_root;                     // -1 when not a tree
    std::vector<int> parent;                        // -1: root or multi-parent
    std::vector<int> depth;                         // -1 when undefined

    int index_of(const std::string& name) const;
    std::vector<int> parents_of(int v) const;       // in reduced_edges
    std::vector<int> children_of(int v) const;
    bool is_tree(int comp) const { return comp_is_tree.at(comp); }
    bool single_all_stream_tree() const { return component_count == 1 && comp_is_tree.at(0); }
    std::vector<std::string> dump_lines() const;    // deterministic adjacency listing
};

DependencyForest build_forest(const SpjQuery& q, const Catalog& catalog, const PredicateClosure& closure);

// Path length from the component root; throws when the component is not a tree.
int depth_of(const std::string& stream, const DependencyForest& f);

}  // namespace bmc
