#include "bmc/engine.hpp"

#include <algorithm>

#include "bmc/engine_detail.hpp"

namespace bmc {

Timestamp Instance::horizon() const {
    Timestamp h = 0;
    for (const auto& [name, tuples] : streams)
        for (const auto& t : tuples) h = std::max(h, t.ts);
    return h;
}

BatchMap Instance::batches_at(Timestamp ts) const {
    BatchMap out;
    for (const auto& [name, tuples] : streams) {
        auto& batch = out[name];
        for (const auto& t : tuples)
            if (t.ts == ts) batch.push_back(t);
    }
    return out;
}

std::size_t FootprintSample::total_entries() const {
    std::size_t n = tracker_rows;
    for (const auto& [name, counts] : per_stream) n += counts.first;
    return n;
}

std::size_t FootprintSample::total_scalars() const {
    std::size_t n = tracker_rows;
    for (const auto& [name, counts] : per_stream) n += counts.second;
    return n;
}

namespace detail {

std::string base_source(const std::string& alias) {
    auto hash = alias.find('#');
    return hash == std::string::npos ? alias : alias.substr(0, hash);
}

bool env_get(const Env& env, const AttrRef& ref, Value& out) {
    auto it = env.find(ref);
    if (it == env.end()) return false;
    out = it->second;
    return true;
}

void bind_tuple(Env& env, const SourceDecl& decl, const std::string& alias, const Tuple& tuple) {
    int vi = 0;
    for (const auto& attr : decl.schema) {
        if (attr.kind == AttrKind::timestamp)
            env[{alias, attr.name}] = tuple.ts;
        else
            env[{alias, attr.name}] = tuple.values.at(vi++);
    }
}

bool compare_values(Value a, CompareOp op, Value b) {
    switch (op) {
        case CompareOp::lt: return a < b;
        case CompareOp::eq: return a == b;
        case CompareOp::gt: return a > b;
        case CompareOp::ne: return a != b;
    }
    return false;
}

Tri eval_atom(const Atom& atom, const Env& env) {
    Value lhs, rhs;
    if (atom.lhs.is_attr()) {
        if (!env_get(env, atom.lhs.ref, lhs)) return Tri::unknown;
    } else {
        lhs = atom.lhs.value;
    }
    if (atom.rhs.is_attr()) {
        if (!env_get(env, atom.rhs.ref, rhs)) return Tri::unknown;
    } else {
        rhs = atom.rhs.value;
    }
    return compare_values(lhs, atom.op, rhs) ? Tri::t : Tri::f;
}

OutputRow project_row(const SpjQuery& q, const Env& env) {
    OutputRow row;
    row.values.reserve(q.constants.size() + q.project_list.size());
    for (Value c : q.constants) row.values.push_back(c);
    for (const auto& ref : q.project_list) {
        Value v;
        if (!env_get(env, ref, v)) throw Error("projection attribute unbound: " + ref.text());
        row.values.push_back(v);
    }
    return row;
}

}  // namespace detail

using detail::Env;
using detail::Tri;

Bag evaluate_query(const SpjQuery& q, const Catalog& catalog,
                   const std::map<std::string, std::vector<Tuple>>& data) {
    auto names = q.source_names();
    int n = static_cast<int>(names.size());

    // Atom scheduled at the last source that binds one of its attributes.
    std::vector<std::vector<const Atom*>> scheduled(n + 1);
    for (const auto& atom : q.selection) {
        int latest = 0;
        auto position = [&](const AttrRef& ref) {
            for (int i = 0; i < n; ++i)
                if (names[i] == ref.source) return i;
            throw Error("selection references source outside FROM: " + ref.text());
        };
        if (atom.lhs.is_attr()) latest = std::max(latest, position(atom.lhs.ref));
        if (atom.rhs.is_attr()) latest = std::max(latest, position(atom.rhs.ref));
        scheduled[latest].push_back(&atom);
    }

    std::vector<const std::vector<Tuple>*> extents;
    for (const auto& name : names) {
        auto it = data.find(name);
        if (it == data.end()) it = data.find(detail::base_source(name));
        if (it == data.end()) throw Error("no data for source " + name);
        extents.push_back(&it->second);
    }

    Bag out;
    Env env;
    std::function<void(int)> rec = [&](int depth) {
        if (depth == n) {
            out[detail::project_row(q, env)] += 1;
            return;
        }
        const SourceDecl& decl = catalog.at(names[depth]);
        for (const auto& tuple : *extents[depth]) {
            detail::bind_tuple(env, decl, names[depth], tuple);
            bool ok = true;
            for (const Atom* atom : scheduled[depth]) {
                if (detail::eval_atom(*atom, env) != Tri::t) {
                    ok = false;
                    break;
                }
            }
            if (ok) rec(depth + 1);
        }
    };
    if (n == 0) {
        out[detail::project_row(q, env)] += 1;
    } else {
        rec(0);
    }
    return out;
}

std::vector<Tuple> merged_batch(const MergedStreamSpec& spec, const Catalog& merged_catalog,
                                const Catalog& base_catalog, const BatchMap& batches) {
    const SourceDecl& merged = merged_catalog.at(spec.name);
    std::vector<std::vector<Tuple>> parts;
    for (const auto& name : spec.constituents) {
        auto it = batches.find(name);
        if (it == batches.end() || it->second.empty()) return {};
        parts.push_back(it->second);
    }
    std::vector<Tuple> out;
    std::vector<std::size_t> pick(parts.size(), 0);
    while (true) {
        Tuple combined;
        combined.ts = parts[0][pick[0]].ts;
        combined.values.reserve(merged.schema.size() - 1);
        for (std::size_t ci = 0; ci < parts.size(); ++ci) {
            const SourceDecl& decl = base_catalog.at(spec.constituents[ci]);
            const Tuple& t = parts[ci][pick[ci]];
            int vi = 0;
            for (const auto& attr : decl.schema)
                if (attr.kind == AttrKind::integer) combined.values.push_back(t.values.at(vi++));
        }
        out.push_back(std::move(combined));
        std::size_t i = 0;
        while (i < parts.size() && ++pick[i] == parts[i].size()) pick[i++] = 0;
        if (i == parts.size()) break;
    }
    return out;
}

std::map<std::string, std::vector<Tuple>> adapt_instance(const Instance& instance,
                                                         const PreparedBranch& branch) {
    std::map<std::string, std::vector<Tuple>> data;
    for (const auto& [name, rows] : instance.relations) data[name] = rows;
    for (const auto& [name, tuples] : instance.streams) data[name] = tuples;
    // Constituent declarations stay in the branch catalog after merging.
    for (const auto& spec : branch.merges) {
        std::map<Timestamp, BatchMap> grouped;
        for (const auto& constituent : spec.constituents)
            for (const auto& t : instance.streams.at(constituent)) grouped[t.ts][constituent].push_back(t);
        std::vector<Tuple> merged;
        for (const auto& [ts, batches] : grouped) {
            auto rows = merged_batch(spec, branch.catalog, branch.catalog, batches);
            merged.insert(merged.end(), rows.begin(), rows.end());
        }
        data[spec.name] = std::move(merged);
    }
    return data;
}

// ---------------------------------------------------------------------------
// Naive full-prefix oracle.

struct NaiveEngine::Impl {
    UnionQuery query;
    const Catalog& catalog;
    EngineOptions opts;
    std::map<std::string, std::vector<Tuple>> data;  // full prefixes + relations
    Bag emitted;                                      // cumulative
    std::optional<Timestamp> last_ts;

    Impl(UnionQuery q, const Catalog& c, std::map<std::string, std::vector<Tuple>> relations,
         EngineOptions o)
        : query(std::move(q)), catalog(c), opts(o), data(std::move(relations)) {}
};

NaiveEngine::NaiveEngine(UnionQuery query, const Catalog& catalog,
                         std::map<std::string, std::vector<Tuple>> relations, EngineOptions opts)
    : impl_(std::make_unique<Impl>(std::move(query), catalog, std::move(relations), opts)) {}

NaiveEngine::~NaiveEngine() = default;

Bag NaiveEngine::step(const BatchMap& batches, Timestamp ts) {
    if (impl_->last_ts && ts <= *impl_->last_ts)
        throw InputError("non-monotone timestamp " + std::to_string(ts));
    impl_->last_ts = ts;
    for (const auto& [name, tuples] : batches) {
        if (static_cast<std::int64_t>(tuples.size()) > impl_->opts.cap)
            throw InputError("per-timestamp cap exceeded on " + name);
        for (const auto& t : tuples) {
            if (t.ts != ts) throw InputError("batch tuple timestamp mismatch on " + name);
            impl_->data[name].push_back(t);
        }
    }

    Bag cumulative;
    bool eliminating = impl_->query.mode() == ProjectionMode::eliminating;
    for (const auto& branch : impl_->query.branches) {
        Catalog effective = effective_catalog(branch, impl_->catalog);
        Bag part = evaluate_query(branch, effective, impl_->data);
        for (const auto& [row, count] : part) cumulative[row] += count;
    }
    if (eliminating)
        for (auto& [row, count] : cumulative) count = 1;

    Bag delta;
    for (const auto& [row, count] : cumulative) {
        auto it = impl_->emitted.find(row);
        std::int64_t prev = it == impl_->emitted.end() ? 0 : it->second;
        if (count < prev) throw Error("non-monotone query result");
        if (count > prev) delta[row] = count - prev;
    }
    impl_->emitted = std::move(cumulative);
    return delta;
}

FootprintSample NaiveEngine::footprint() const {
    FootprintSample sample;
    sample.ts = impl_->last_ts.value_or(0);
    for (const auto& [name, tuples] : impl_->data) {
        std::size_t scalars = 0;
        for (const auto& t : tuples) scalars += t.values.size() + 1;
        sample.per_stream[name] = {tuples.size(), scalars};
    }
    sample.tracker_rows = impl_->emitted.size();
    return sample;
}

// ---------------------------------------------------------------------------

RunResult run_engine(Engine& engine, const Instance& instance, Timestamp horizon) {
    RunResult result;
    std::map<Timestamp, BatchMap> schedule;
    for (const auto& [name, tuples] : instance.streams)
        for (const auto& t : tuples) schedule[t.ts][name].push_back(t);
    for (Timestamp ts = 0; ts <= horizon; ++ts) {
        BatchMap batches;
        if (auto it = schedule.find(ts); it != schedule.end()) batches = it->second;
        Bag delta = engine.step(batches, ts);
        FootprintSample sample = engine.footprint();
        sample.ts = ts;
        result.peak_entries = std::max(result.peak_entries, sample.total_entries());
        result.peak_scalars = std::max(result.peak_scalars, sample.total_scalars());
        result.deltas.emplace_back(ts, std::move(delta));
        result.footprints.push_back(std::move(sample));
    }
    return result;
}

CompareResult compare_engines(const UnionQuery& query, const Catalog& catalog,
                              const PreprocessResult& pre, const Verdict& verdict,
                              const Instance& instance, EngineOptions opts) {
    CompareResult result;
    NaiveEngine oracle(query, catalog, instance.relations, opts);
    BoundedEngine bounded(query, catalog, pre, verdict, instance.relations, opts);

    Timestamp horizon = instance.horizon();
    std::map<Timestamp, BatchMap> schedule;
    for (const auto& [name, tuples] : instance.streams)
        for (const auto& t : tuples) schedule[t.ts][name].push_back(t);

    Bag oracle_total, bounded_total;
    bool eliminating = query.mode() == ProjectionMode::eliminating;
    for (Timestamp ts = 0; ts <= horizon; ++ts) {
        BatchMap batches;
        if (auto it = schedule.find(ts); it != schedule.end()) batches = it->second;
        Bag od = oracle.step(batches, ts);
        Bag bd = bounded.step(batches, ts);
        for (const auto& [row, count] : od) oracle_total[row] += count;
        for (const auto& [row, count] : bd) bounded_total[row] += count;
        if (eliminating) {
            for (auto& [row, count] : oracle_total) count = 1;
            for (auto& [row, count] : bounded_total) count = 1;
        }

        auto record = [&](const FootprintSample& s, RunResult& r) {
            r.peak_entries = std::max(r.peak_entries, s.total_entries());
            r.peak_scalars = std::max(r.peak_scalars, s.total_scalars());
            r.footprints.push_back(s);
        };
        record(oracle.footprint(), result.oracle);
        record(bounded.footprint(), result.bounded);
        result.oracle.deltas.emplace_back(ts, od);
        result.bounded.deltas.emplace_back(ts, bd);

        if (oracle_total != bounded_total) {
            result.equal = false;
            result.first_divergence = ts;
            for (const auto& [row, count] : oracle_total) {
                auto it = bounded_total.find(row);
                std::int64_t have = it == bounded_total.end() ? 0 : it->second;
                if (count > have) result.missing[row] = count - have;
            }
            for (const auto& [row, count] : bounded_total) {
                auto it = oracle_total.find(row);
                std::int64_t have = it == oracle_total.end() ? 0 : it->second;
                if (count > have) result.extra[row] = count - have;
            }
            return result;
        }
    }
    return result;
}

}  // namespace bmc
