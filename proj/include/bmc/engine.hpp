#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bmc/decide.hpp"
#include "bmc/preprocess.hpp"

namespace bmc {

// Stream tuple: integer attribute values in schema order, plus the
// application timestamp. Relation rows leave ts at 0.
struct Tuple {
    Timestamp ts = 0;
    std::vector<Value> values;

    auto operator<=>(const Tuple&) const = default;
};

// All tuples of one source sharing a timestamp (the inter-marker batch).
using BatchMap = std::map<std::string, std::vector<Tuple>>;

struct Instance {
    std::map<std::string, std::vector<Tuple>> streams;    // sorted by ts
    std::map<std::string, std::vector<Tuple>> relations;

    Timestamp horizon() const;
    BatchMap batches_at(Timestamp ts) const;
};

struct FootprintSample {
    Timestamp ts = 0;
    // per stream synopsis: entry count, stored scalar count
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_stream;
    std::size_t tracker_rows = 0;

    std::size_t total_entries() const;
    std::size_t total_scalars() const;
};

struct SynopsisSnapshot {
    // stream -> formatted entry "(v1,v2)" -> counter
    std::map<std::string, std::map<std::string, std::int64_t>> past;
    std::map<std::string, std::map<std::string, std::int64_t>> fresh;
};

struct EngineOptions {
    std::int64_t cap = 1024;  // per-timestamp tuple cap, enforced at ingestion
};

class Engine {
public:
    virtual ~Engine() = default;

    // Integrates one synchronized timestamp and returns the rows emitted at
    // its marker. Timestamps must be presented strictly increasing.
    virtual Bag step(const BatchMap& batches, Timestamp ts) = 0;
    virtual FootprintSample footprint() const = 0;
};

// Full-prefix oracle: stores everything, recomputes the query per marker,
// emits the bag (or set) difference against what was already written.
class NaiveEngine final : public Engine {
public:
    NaiveEngine(UnionQuery query, const Catalog& catalog,
                std::map<std::string, std::vector<Tuple>> relations, EngineOptions opts = {});
    ~NaiveEngine() override;

    Bag step(const BatchMap& batches, Timestamp ts) override;
    FootprintSample footprint() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Evaluates one SPJ query over complete source extents (helper for the
// oracle and for preprocessing equivalence tests).
Bag evaluate_query(const SpjQuery& q, const Catalog& catalog,
                   const std::map<std::string, std::vector<Tuple>>& data);

// Applies the step-2 ingestion adapter: the merged stream's batch at ts is
// the cross product of the constituent batches at ts.
std::vector<Tuple> merged_batch(const MergedStreamSpec& spec, const Catalog& merged_catalog,
                                const Catalog& base_catalog, const BatchMap& batches);

// Full extents for one prepared branch: raw data plus merged-stream views.
std::map<std::string, std::vector<Tuple>> adapt_instance(const Instance& instance,
                                                         const PreparedBranch& branch);

// Synopsis engine. Requires a verdict that admits a bounded run and refuses
// input patterns outside the supported fragment (diagnosed by name).
class BoundedEngine final : public Engine {
public:
    BoundedEngine(const UnionQuery& query, const Catalog& catalog, const PreprocessResult& pre,
                  const Verdict& verdict, std::map<std::string, std::vector<Tuple>> relations,
                  EngineOptions opts = {});
    ~BoundedEngine() override;

    Bag step(const BatchMap& batches, Timestamp ts) override;
    FootprintSample footprint() const override;

    // Test inspection: counter synopses of one execution branch.
    SynopsisSnapshot snapshot(std::size_t branch = 0) const;
    std::size_t branch_count() const;

#ifdef BMC_TESTING
    // Drops one counter merge at the given timestamp (divergence drill).
    void inject_counter_fault(Timestamp ts);
#endif

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct RunResult {
    std::vector<std::pair<Timestamp, Bag>> deltas;
    std::vector<FootprintSample> footprints;
    std::size_t peak_entries = 0;
    std::size_t peak_scalars = 0;
};

RunResult run_engine(Engine& engine, const Instance& instance, Timestamp horizon);

struct CompareResult {
    bool equal = true;
    Timestamp first_divergence = 0;
    Bag missing;  // oracle-only rows at the divergent marker (cumulative)
    Bag extra;    // bounded-only rows
    RunResult oracle;
    RunResult bounded;
};

CompareResult compare_engines(const UnionQuery& query, const Catalog& catalog,
                              const PreprocessResult& pre, const Verdict& verdict,
                              const Instance& instance, EngineOptions opts = {});

}  // namespace bmc
