#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bmc/types.hpp"

namespace bmc {

enum class AttrKind { integer, timestamp };

enum class SourceKind { static_relation, infinite_stream, finite_stream };

struct AttrDecl {
    std::string name;
    AttrKind kind = AttrKind::integer;
};

struct SourceDecl {
    std::string name;
    SourceKind kind = SourceKind::infinite_stream;
    std::vector<AttrDecl> schema;
    std::optional<Timestamp> last_timestamp;  // required iff finite stream

    bool is_stream() const { return kind != SourceKind::static_relation; }
    // Streams carry exactly one timestamp attribute; relations none.
    int timestamp_index() const;
    const std::string& timestamp_attr() const;
    std::vector<std::string> integer_attrs() const;
    int attr_index(const std::string& attr) const;  // -1 when absent
    AttrKind attr_kind(const std::string& attr) const;
};

class Catalog {
public:
    Catalog() = default;

    void add(SourceDecl decl);
    void replace(SourceDecl decl);  // by name; adds when absent
    bool has(const std::string& name) const;
    const SourceDecl& at(const std::string& name) const;
    const std::vector<SourceDecl>& sources() const { return sources_; }

    // Validates the per-kind schema invariants for every declared source.
    void validate() const;

    std::string to_text() const;

private:
    std::vector<SourceDecl> sources_;
};

std::string source_kind_name(SourceKind kind);
std::string attr_kind_name(AttrKind kind);

// Sidecar format, one source per line:
//   kind name(attr:kind, ...) [last_ts=N]
Catalog parse_catalog(const std::string& text);
Catalog load_catalog(const std::string& path);

}  // namespace bmc
