#pragma once

#include <map>
#include <string>
#include <vector>

#include "bmc/closure.hpp"
#include "bmc/depgraph.hpp"
#include "bmc/query.hpp"

namespace bmc {

// Step 2 output: constituents tied by timestamp equality become one stream.
// The engine forms the merged stream per timestamp as the cross product of
// the constituent batches sharing that timestamp.
struct MergedStreamSpec {
    std::string name;
    std::vector<std::string> constituents;
    std::string ts_attr;
    // (constituent, attr) -> merged attr name, integer attrs only.
    std::map<std::pair<std::string, std::string>, std::string> attr_map;
};

// One union branch after steps 1-3, in executable form.
struct PreparedBranch {
    SpjQuery query;
    Catalog catalog;  // effective: aliased relations, merged/demoted streams
    std::vector<MergedStreamSpec> merges;
    std::vector<std::string> diagnostics;
    bool executable = true;  // false when a demotion has no derivable last_timestamp
    PredicateClosure closure;  // extended universe (attrs + query constants)
    BoundsInfo bounds;
    RefSets refs;
    std::string provenance;
};

// Step 4 output: one totally-ordered refinement of a prepared branch.
struct LtoQuery {
    SpjQuery query;           // selection = branch P plus added order atoms
    PredicateClosure closure;
    BoundsInfo bounds;
    RefSets refs;
    int exec_branch = 0;
    std::vector<Atom> added_atoms;
    std::string provenance;
};

struct PreprocessResult {
    std::vector<PreparedBranch> branches;  // all, including unsatisfiable ones
    std::vector<LtoQuery> ltos;            // satisfiable refinements only
};

// Step 1: each cross-stream disequality splits a branch into < and > copies.
std::vector<SpjQuery> split_disequality(const SpjQuery& q, const Catalog& catalog);

// Step 2: merge timestamp-equal streams; rewrites the query onto merged names.
SpjQuery merge_equal_timestamp_streams(const SpjQuery& q, Catalog& catalog,
                                       std::vector<MergedStreamSpec>& out_specs);

// Step 3: infinite streams with an upper-bounded timestamp become finite.
// Bounds without a literal leave last_timestamp unknown -> diagnostic.
SpjQuery demote_to_finite(const SpjQuery& q, Catalog& catalog, std::vector<std::string>& diagnostics);

// Step 4: enumerate per-stream weak orders of integer attributes plus query
// constants, consistent with P+; cross product, re-close, drop unsatisfiable,
// dedupe by closure equality.
std::vector<LtoQuery> derive_lto_queries(const PreparedBranch& branch);

PreparedBranch prepare_branch(const SpjQuery& q, const Catalog& catalog, std::string provenance);

PreprocessResult preprocess(const UnionQuery& u, const Catalog& catalog);

// Def 4.4 properties 1-4 plus satisfiability, re-checked by inspection.
std::vector<std::string> modified_lto_violations(const LtoQuery& q, const Catalog& catalog);

}  // namespace bmc
