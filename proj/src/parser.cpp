#include "bmc/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace bmc {

namespace {

enum class TokType { ident, number, dot, comma, lt, eq, gt, ne, end };

struct Token {
    TokType type;
    std::string text;
    Value number = 0;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& input) : in_(input) { advance(); }

    const Token& current() const { return cur_; }

    void advance() {
        skip_ws();
        cur_.line = line_;
        cur_.col = col_;
        if (pos_ >= in_.size()) {
            cur_.type = TokType::end;
            cur_.text.clear();
            return;
        }
        char c = in_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < in_.size() && (std::isalnum(static_cast<unsigned char>(in_[pos_])) || in_[pos_] == '_'))
                step();
            cur_.type = TokType::ident;
            cur_.text = in_.substr(start, pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < in_.size() && std::isdigit(static_cast<unsigned char>(in_[pos_]))) step();
            cur_.type = TokType::number;
            cur_.text = in_.substr(start, pos_ - start);
            cur_.number = std::stoll(cur_.text);
            return;
        }
        switch (c) {
            case '.': step(); cur_.type = TokType::dot; cur_.text = "."; return;
            case ',': step(); cur_.type = TokType::comma; cur_.text = ","; return;
            case '<': step(); cur_.type = TokType::lt; cur_.text = "<"; return;
            case '=': step(); cur_.type = TokType::eq; cur_.text = "="; return;
            case '>': step(); cur_.type = TokType::gt; cur_.text = ">"; return;
            case '!':
                step();
                if (pos_ < in_.size() && in_[pos_] == '=') {
                    step();
                    cur_.type = TokType::ne;
                    cur_.text = "!=";
                    return;
                }
                throw ParseError("expected '=' after '!'", line_, col_);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }

private:
    void step() {
        if (in_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void skip_ws() {
        while (pos_ < in_.size() && std::isspace(static_cast<unsigned char>(in_[pos_]))) step();
    }

    const std::string& in_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token cur_;
};

struct RawOperand {
    bool is_attr = false;
    AttrRef ref;
    Value number = 0;
    int line = 1, col = 1;
};

class Parser {
public:
    Parser(const std::string& text, const Catalog& catalog) : lex_(text), catalog_(catalog) {}

    UnionQuery parse() {
        UnionQuery q;
        q.branches.push_back(parse_branch());
        while (at_keyword("UNION")) {
            expect_keyword("UNION");
            expect_keyword("ALL");
            q.branches.push_back(parse_branch());
        }
        if (lex_.current().type != TokType::end)
            fail("unexpected token after query: '" + lex_.current().text + "'");
        validate_query(q, catalog_);
        return q;
    }

private:
    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg, lex_.current().line, lex_.current().col);
    }

    bool at_keyword(const std::string& kw) {
        return lex_.current().type == TokType::ident && lex_.current().text == kw;
    }

    void expect_keyword(const std::string& kw) {
        if (!at_keyword(kw)) fail("expected " + kw);
        lex_.advance();
    }

    std::string expect_ident() {
        if (lex_.current().type != TokType::ident) fail("expected identifier");
        std::string text = lex_.current().text;
        lex_.advance();
        return text;
    }

    SpjQuery parse_branch() {
        SpjQuery q;
        if (at_keyword("DISTINCT")) {
            q.mode = ProjectionMode::eliminating;
            lex_.advance();
        } else if (at_keyword("DISTINCTLESS")) {
            q.mode = ProjectionMode::preserving;
            lex_.advance();
        } else {
            fail("expected DISTINCT or DISTINCTLESS");
        }
        expect_keyword("SELECT");
        parse_items(q);
        expect_keyword("FROM");
        parse_sources(q);
        if (at_keyword("WHERE")) {
            lex_.advance();
            parse_conjunction(q);
        }
        return q;
    }

    void parse_items(SpjQuery& q) {
        while (true) {
            if (lex_.current().type == TokType::number) {
                q.constants.push_back(lex_.current().number);
                lex_.advance();
            } else {
                std::string src = expect_ident();
                if (lex_.current().type != TokType::dot) fail("expected '.' in projected attribute");
                lex_.advance();
                std::string attr = expect_ident();
                q.project_list.push_back({src, attr});
            }
            if (lex_.current().type == TokType::comma) {
                lex_.advance();
                continue;
            }
            break;
        }
    }

    void parse_sources(SpjQuery& q) {
        std::map<std::string, int> relation_uses;
        while (true) {
            std::string name = expect_ident();
            if (!catalog_.has(name)) fail("unknown source: " + name);
            switch (catalog_.at(name).kind) {
                case SourceKind::static_relation: {
                    int n = ++relation_uses[name];
                    q.relations.push_back(n == 1 ? name : name + "#" + std::to_string(n));
                    break;
                }
                case SourceKind::infinite_stream:
                    q.inf_streams.push_back(name);
                    break;
                case SourceKind::finite_stream:
                    q.fin_streams.push_back(name);
                    break;
            }
            if (lex_.current().type == TokType::comma) {
                lex_.advance();
                continue;
            }
            break;
        }
    }

    RawOperand parse_operand() {
        RawOperand op;
        op.line = lex_.current().line;
        op.col = lex_.current().col;
        if (lex_.current().type == TokType::number) {
            op.number = lex_.current().number;
            lex_.advance();
            return op;
        }
        op.is_attr = true;
        op.ref.source = expect_ident();
        if (lex_.current().type != TokType::dot) fail("expected '.' in attribute reference");
        lex_.advance();
        op.ref.attr = expect_ident();
        return op;
    }

    CompareOp parse_op() {
        switch (lex_.current().type) {
            case TokType::lt: lex_.advance(); return CompareOp::lt;
            case TokType::eq: lex_.advance(); return CompareOp::eq;
            case TokType::gt: lex_.advance(); return CompareOp::gt;
            case TokType::ne: lex_.advance(); return CompareOp::ne;
            default: fail("expected comparison operator");
        }
    }

    // Attribute goes on the left; a literal compared with a timestamp
    // attribute is typed as a timestamp literal.
    Atom finish_atom(const SpjQuery& q, RawOperand lhs, CompareOp op, RawOperand rhs) {
        if (!lhs.is_attr && !rhs.is_attr)
            throw ValidationError("constant-vs-constant atom: " + std::to_string(lhs.number) + " " +
                                  op_text(op) + " " + std::to_string(rhs.number));
        if (!lhs.is_attr) {
            std::swap(lhs, rhs);
            op = flip(op);
        }
        Atom atom;
        atom.lhs = Operand::attribute(lhs.ref);
        atom.op = op;
        if (rhs.is_attr) {
            atom.rhs = Operand::attribute(rhs.ref);
        } else {
            AttrKind kind = AttrKind::integer;
            if (q.uses_source(lhs.ref.source) && catalog_.has(alias_base(lhs.ref.source))) {
                const SourceDecl& decl = catalog_.at(alias_base(lhs.ref.source));
                if (decl.attr_index(lhs.ref.attr) >= 0) kind = decl.attr_kind(lhs.ref.attr);
            }
            atom.rhs = kind == AttrKind::timestamp ? Operand::ts_lit(rhs.number) : Operand::int_lit(rhs.number);
        }
        return atom;
    }

    static std::string alias_base(const std::string& name) {
        auto hash = name.find('#');
        return hash == std::string::npos ? name : name.substr(0, hash);
    }

    void parse_conjunction(SpjQuery& q) {
        while (true) {
            RawOperand lhs = parse_operand();
            CompareOp op = parse_op();
            RawOperand rhs = parse_operand();
            q.selection.push_back(finish_atom(q, lhs, op, rhs));
            if (at_keyword("AND")) {
                lex_.advance();
                continue;
            }
            break;
        }
    }

    Lexer lex_;
    const Catalog& catalog_;
};

}  // namespace

UnionQuery parse_query(const std::string& text, const Catalog& catalog) {
    return Parser(text, catalog).parse();
}

UnionQuery load_query(const std::string& path, const Catalog& catalog) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open query file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_query(buf.str(), catalog);
}

}  // namespace bmc
