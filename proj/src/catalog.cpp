#include "bmc/catalog.hpp"

#include <fstream>
#include <sstream>

namespace bmc {

int SourceDecl::timestamp_index() const {
    for (size_t i = 0; i < schema.size(); ++i)
        if (schema[i].kind == AttrKind::timestamp) return static_cast<int>(i);
    return -1;
}

const std::string& SourceDecl::timestamp_attr() const {
    int i = timestamp_index();
    if (i < 0) throw Error("source " + name + " has no timestamp attribute");
    return schema[i].name;
}

std::vector<std::string> SourceDecl::integer_attrs() const {
    std::vector<std::string> out;
    for (const auto& a : schema)
        if (a.kind == AttrKind::integer) out.push_back(a.name);
    return out;
}

int SourceDecl::attr_index(const std::string& attr) const {
    for (size_t i = 0; i < schema.size(); ++i)
        if (schema[i].name == attr) return static_cast<int>(i);
    return -1;
}

AttrKind SourceDecl::attr_kind(const std::string& attr) const {
    int i = attr_index(attr);
    if (i < 0) throw Error("unknown attribute " + name + "." + attr);
    return schema[i].kind;
}

void Catalog::add(SourceDecl decl) {
    if (has(decl.name)) throw Error("duplicate source declaration: " + decl.name);
    sources_.push_back(std::move(decl));
}

void Catalog::replace(SourceDecl decl) {
    for (auto& s : sources_) {
        if (s.name == decl.name) {
            s = std::move(decl);
            return;
        }
    }
    sources_.push_back(std::move(decl));
}

bool Catalog::has(const std::string& name) const {
    for (const auto& s : sources_)
        if (s.name == name) return true;
    return false;
}

const SourceDecl& Catalog::at(const std::string& name) const {
    for (const auto& s : sources_)
        if (s.name == name) return s;
    throw Error("unknown source: " + name);
}

void Catalog::validate() const {
    for (const auto& s : sources_) {
        int ts_count = 0;
        for (const auto& a : s.schema) {
            if (a.kind == AttrKind::timestamp) ++ts_count;
            for (const auto& b : s.schema)
                if (&a != &b && a.name == b.name)
                    throw ValidationError("duplicate attribute " + s.name + "." + a.name);
        }
        switch (s.kind) {
            case SourceKind::static_relation:
                if (ts_count != 0)
                    throw ValidationError("static relation " + s.name + " must not carry a timestamp attribute");
                break;
            case SourceKind::infinite_stream:
            case SourceKind::finite_stream:
                if (ts_count != 1)
                    throw ValidationError("stream " + s.name + " must carry exactly one timestamp attribute");
                break;
        }
        if (s.kind == SourceKind::finite_stream) {
            if (!s.last_timestamp)
                throw ValidationError("finite stream " + s.name + " requires last_ts");
            if (*s.last_timestamp < 0)
                throw ValidationError("finite stream " + s.name + " has negative last_ts");
        } else if (s.last_timestamp) {
            throw ValidationError("source " + s.name + " is not finite but declares last_ts");
        }
    }
}

std::string source_kind_name(SourceKind kind) {
    switch (kind) {
        case SourceKind::static_relation: return "static-relation";
        case SourceKind::infinite_stream: return "infinite-stream";
        case SourceKind::finite_stream: return "finite-stream";
    }
    return "?";
}

std::string attr_kind_name(AttrKind kind) {
    return kind == AttrKind::integer ? "int" : "ts";
}

std::string Catalog::to_text() const {
    std::ostringstream out;
    for (const auto& s : sources_) {
        out << source_kind_name(s.kind) << " " << s.name << "(";
        for (size_t i = 0; i < s.schema.size(); ++i) {
            if (i) out << ", ";
            out << s.schema[i].name << ":" << attr_kind_name(s.schema[i].kind);
        }
        out << ")";
        if (s.last_timestamp) out << " last_ts=" << *s.last_timestamp;
        out << "\n";
    }
    return out.str();
}

namespace {

struct LineScanner {
    const std::string& s;
    size_t pos = 0;
    int line_no;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= s.size();
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg, line_no, static_cast<int>(pos) + 1);
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_' ||
                                  s[pos] == '-' || s[pos] == '#'))
            ++pos;
        if (pos == start) fail("expected identifier");
        return s.substr(start, pos - start);
    }
    Timestamp number() {
        skip_ws();
        size_t start = pos;
        if (pos < s.size() && s[pos] == '-') ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) fail("expected number");
        return std::stoll(s.substr(start, pos - start));
    }
};

}  // namespace

Catalog parse_catalog(const std::string& text) {
    Catalog catalog;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = line;
        size_t first = trimmed.find_first_not_of(" \t\r");
        if (first == std::string::npos || trimmed[first] == '#') continue;

        LineScanner sc{line, 0, line_no};
        SourceDecl decl;
        std::string kind = sc.ident();
        if (kind == "static-relation") decl.kind = SourceKind::static_relation;
        else if (kind == "infinite-stream") decl.kind = SourceKind::infinite_stream;
        else if (kind == "finite-stream") decl.kind = SourceKind::finite_stream;
        else sc.fail("unknown source kind: " + kind);

        decl.name = sc.ident();
        sc.expect('(');
        while (true) {
            AttrDecl attr;
            attr.name = sc.ident();
            sc.expect(':');
            std::string akind = sc.ident();
            if (akind == "int") attr.kind = AttrKind::integer;
            else if (akind == "ts") attr.kind = AttrKind::timestamp;
            else sc.fail("unknown attribute kind: " + akind);
            decl.schema.push_back(attr);
            if (sc.accept(',')) continue;
            sc.expect(')');
            break;
        }
        if (!sc.eof()) {
            std::string key = sc.ident();
            if (key != "last_ts") sc.fail("unexpected token: " + key);
            sc.expect('=');
            decl.last_timestamp = sc.number();
        }
        if (!sc.eof()) sc.fail("trailing input");
        catalog.add(std::move(decl));
    }
    catalog.validate();
    return catalog;
}

Catalog load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open catalog file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_catalog(buf.str());
}

}  // namespace bmc
