#pragma once

#include <string>
#include <vector>

#include "bmc/depgraph.hpp"
#include "bmc/preprocess.hpp"

namespace bmc {

struct ConditionReport {
    std::string id;  // "T1.C1" .. "T1.C5", "T2.C1" .. "T2.C3"
    bool holds = true;
    std::vector<std::string> witnesses;  // non-empty iff !holds
};

enum class BranchDecision { bounded, not_bounded, not_guaranteed };
enum class AggregateDecision { bounded, not_guaranteed, trivially_bounded };

std::string decision_text(BranchDecision d);
std::string decision_text(AggregateDecision d);

struct BranchReport {
    int lto_index = 0;
    std::string provenance;
    std::string query_text;
    std::vector<ConditionReport> conditions;
    BranchDecision decision = BranchDecision::bounded;
};

struct Verdict {
    ProjectionMode mode = ProjectionMode::preserving;
    std::vector<BranchReport> branches;
    AggregateDecision aggregate = AggregateDecision::trivially_bounded;
    std::vector<std::string> notes;  // preprocessing diagnostics

    bool allows_bounded_run() const {
        return aggregate != AggregateDecision::not_guaranteed;
    }
};

// Duplicate-preserving criterion (necessary and sufficient); five reports.
std::vector<ConditionReport> check_preserving(const LtoQuery& q, const DependencyForest& f,
                                              const Catalog& catalog);

// Duplicate-eliminating criterion (sufficient); three reports.
std::vector<ConditionReport> check_eliminating(const LtoQuery& q, const DependencyForest& f,
                                               const Catalog& catalog);

Verdict decide(const PreprocessResult& pre, ProjectionMode mode, const Catalog& catalog);
Verdict decide(const UnionQuery& u, const Catalog& catalog);

}  // namespace bmc
