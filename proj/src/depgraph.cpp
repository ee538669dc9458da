#include "bmc/depgraph.hpp"

#include <algorithm>
#include <deque>

namespace bmc {

int DependencyForest::index_of(const std::string& name) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), name);
    if (it == vertices.end() || *it != name) return -1;
    return static_cast<int>(it - vertices.begin());
}

std::vector<int> DependencyForest::parents_of(int v) const {
    std::vector<int> out;
    for (const auto& [p, c] : reduced_edges)
        if (c == v) out.push_back(p);
    return out;
}

std::vector<int> DependencyForest::children_of(int v) const {
    std::vector<int> out;
    for (const auto& [p, c] : reduced_edges)
        if (p == v) out.push_back(c);
    return out;
}

std::vector<std::string> DependencyForest::dump_lines() const {
    std::vector<std::string> lines;
    for (size_t v = 0; v < vertices.size(); ++v) {
        std::string line = vertices[v] + " ->";
        for (int c : children_of(static_cast<int>(v))) line += " " + vertices[c];
        if (depth[v] >= 0) line += "  [depth " + std::to_string(depth[v]) + "]";
        lines.push_back(line);
    }
    return lines;
}

DependencyForest build_forest(const SpjQuery& q, const Catalog& catalog, const PredicateClosure& closure) {
    DependencyForest f;
    f.vertices = q.inf_streams;
    std::sort(f.vertices.begin(), f.vertices.end());
    int n = static_cast<int>(f.vertices.size());

    std::vector<int> ts_elem(n, -1);
    for (int v = 0; v < n; ++v) {
        const SourceDecl& decl = catalog.at(f.vertices[v]);
        ts_elem[v] = closure.find(Element::attribute({decl.name, decl.timestamp_attr()}, AttrKind::timestamp));
    }

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j || ts_elem[i] < 0 || ts_elem[j] < 0) continue;
            // (S_i.I > S_j.J): i is the later stream, parent of j.
            if (closure.lt(ts_elem[j], ts_elem[i])) f.raw_edges.insert({i, j});
        }
    }
    for (const auto& [p, c] : f.raw_edges)
        if (f.raw_edges.count({c, p}))
            throw Error("timestamp dependency cycle; closure should have been unsatisfiable");

    // raw_edges is transitively closed, so one interpolation step decides reduction.
    for (const auto& [p, c] : f.raw_edges) {
        bool shortcut = false;
        for (int w = 0; w < n && !shortcut; ++w)
            if (w != p && w != c && f.raw_edges.count({p, w}) && f.raw_edges.count({w, c})) shortcut = true;
        if (!shortcut) f.reduced_edges.insert({p, c});
    }

    // Undirected components over raw edges.
    f.component.assign(n, -1);
    for (int v = 0; v < n; ++v) {
        if (f.component[v] >= 0) continue;
        int id = f.component_count++;
        std::deque<int> queue{v};
        f.component[v] = id;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (const auto& [p, c] : f.raw_edges) {
                int other = -1;
                if (p == u) other = c;
                else if (c == u) other = p;
                if (other >= 0 && f.component[other] < 0) {
                    f.component[other] = id;
                    queue.push_back(other);
                }
            }
        }
    }
    f.comp_members.assign(f.component_count, {});
    for (int v = 0; v < n; ++v) f.comp_members[f.component[v]].push_back(v);

    f.parent.assign(n, -1);
    f.depth.assign(n, -1);
    f.comp_is_tree.assign(f.component_count, true);
    f.comp_root.assign(f.component_count, -1);
    for (int comp = 0; comp < f.component_count; ++comp) {
        int root = -1;
        bool tree = true;
        for (int v : f.comp_members[comp]) {
            auto parents = f.parents_of(v);
            if (parents.empty()) {
                if (root >= 0) tree = false;  // two maximal vertices
                else root = v;
            } else if (parents.size() == 1) {
                f.parent[v] = parents[0];
            } else {
                tree = false;
            }
        }
        f.comp_is_tree[comp] = tree && root >= 0;
        if (!f.comp_is_tree[comp]) continue;
        f.comp_root[comp] = root;
        f.depth[root] = 0;
        std::deque<int> queue{root};
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int c : f.children_of(u)) {
                f.depth[c] = f.depth[u] + 1;
                queue.push_back(c);
            }
        }
        for (int v : f.comp_members[comp])
            if (f.depth[v] < 0) f.comp_is_tree[comp] = false;  // unreachable from root
    }
    return f;
}

int depth_of(const std::string& stream, const DependencyForest& f) {
    int v = f.index_of(stream);
    if (v < 0) throw Error("stream not in forest: " + stream);
    if (!f.comp_is_tree[f.component[v]]) throw Error("depth undefined: component of " + stream + " is not a tree");
    return f.depth[v];
}

}  // namespace bmc
