// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#include "lexverify/logic.hpp"

#include <algorithm>
#include <cctype>

#include "lexverify/errors.hpp"

namespace lexverify {

std::string to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::Boolean: return "Boolean";
        case ValueKind::Numeric: return "Numeric";
        case ValueKind::Text: return "String";
        case ValueKind::Entity: return "Entity";
    }
    return "Boolean";
}

std::optional<ValueKind> value_kind_from_string(const std::string& text) {
    if (text == "Boolean") return ValueKind::Boolean;
    if (text == "Numeric" || text == "Number") return ValueKind::Numeric;
    if (text == "String" || text == "Text") return ValueKind::Text;
    if (text == "Entity") return ValueKind::Entity;
    return std::nullopt;
}

GroundValue GroundValue::boolean(bool b) {
    GroundValue v;
    v.kind = Kind::Boolean;
    v.bool_value = b;
    return v;
}

GroundValue GroundValue::number(Rational r) {
    GroundValue v;
    v.kind = Kind::Number;
    v.number_value = r;
    return v;
}

GroundValue GroundValue::text(std::string t) {
    GroundValue v;
    v.kind = Kind::Text;
    v.text_value = std::move(t);
    return v;
}

std::string GroundValue::str() const {
    switch (kind) {
        case Kind::Boolean: return bool_value ? "true" : "false";
        case Kind::Number: return number_value.str();
        case Kind::Text: return text_value;
    }
    return "";
}

bool GroundValue::operator==(const GroundValue& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case Kind::Boolean: return bool_value == o.bool_value;
        case Kind::Number: return number_value == o.number_value;
        case Kind::Text: return text_value == o.text_value;
    }
    return false;
}

std::string to_string(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
    }
    return "=";
}

// --- construction ---

ExprPtr Expr::var(std::string label, VarSort sort) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Var;
    e->label_ = std::move(label);
    e->sort_ = sort;
    return e;
}

ExprPtr Expr::bool_const(bool value) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::BoolConst;
    e->bval_ = value;
    return e;
}

ExprPtr Expr::num_const(Rational value) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::NumConst;
    e->nval_ = value;
    return e;
}

ExprPtr Expr::text_const(std::string value) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::TextConst;
    e->label_ = std::move(value);
    return e;
}

ExprPtr Expr::func_app(std::string name, std::vector<ExprPtr> args) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::FuncApp;
    e->label_ = std::move(name);
    e->kids_ = std::move(args);
    return e;
}

ExprPtr Expr::cmp(CmpOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Cmp;
    e->op_ = op;
    e->kids_ = {std::move(lhs), std::move(rhs)};
    return e;
}

ExprPtr Expr::negate(ExprPtr child) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Not;
    e->kids_ = {std::move(child)};
    return e;
}

ExprPtr Expr::conj(std::vector<ExprPtr> children) {
    if (children.size() < 2) throw ArityError("And", children.size());
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::And;
    e->kids_ = std::move(children);
    return e;
}

ExprPtr Expr::disj(std::vector<ExprPtr> children) {
    if (children.size() < 2) throw ArityError("Or", children.size());
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Or;
    e->kids_ = std::move(children);
    return e;
}

ExprPtr Expr::implies(ExprPtr antecedent, ExprPtr consequent) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Implies;
    e->kids_ = {std::move(antecedent), std::move(consequent)};
    return e;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b) return false;
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case Expr::Kind::Var: return a->label() == b->label();
        case Expr::Kind::BoolConst: return a->bool_value() == b->bool_value();
        case Expr::Kind::NumConst: return a->num_value() == b->num_value();
        case Expr::Kind::TextConst: return a->text_value() == b->text_value();
        case Expr::Kind::FuncApp:
            if (a->label() != b->label()) return false;
            break;
        case Expr::Kind::Cmp:
            if (a->cmp_op() != b->cmp_op()) return false;
            break;
        default: break;
    }
    const auto& ka = a->children();
    const auto& kb = b->children();
    if (ka.size() != kb.size()) return false;
    for (std::size_t i = 0; i < ka.size(); ++i) {
        if (!structurally_equal(ka[i], kb[i])) return false;
    }
    return true;
}

// --- printing ---

namespace {

std::string quote_text(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

void print_into(const ExprPtr& e, std::string& out) {
    switch (e->kind()) {
        case Expr::Kind::Var:
            out += e->label();
            return;
        case Expr::Kind::BoolConst:
            out += e->bool_value() ? "true" : "false";
            return;
        case Expr::Kind::NumConst:
            out += e->num_value().str();
            return;
        case Expr::Kind::TextConst:
            out += quote_text(e->text_value());
            return;
        case Expr::Kind::FuncApp: {
            out += e->label();
            out += '(';
            bool first = true;
            for (const auto& k : e->children()) {
                if (!first) out += ", ";
                first = false;
                print_into(k, out);
            }
            out += ')';
            return;
        }
        case Expr::Kind::Cmp:
            print_into(e->lhs(), out);
            out += ' ';
            out += to_string(e->cmp_op());
            out += ' ';
            print_into(e->rhs(), out);
            return;
        case Expr::Kind::Not:
            out += "Not(";
            print_into(e->child(), out);
            out += ')';
            return;
        case Expr::Kind::And:
        case Expr::Kind::Or: {
            out += e->kind() == Expr::Kind::And ? "And(" : "Or(";
            bool first = true;
            for (const auto& k : e->children()) {
                if (!first) out += ", ";
                first = false;
                print_into(k, out);
            }
            out += ')';
            return;
        }
        case Expr::Kind::Implies:
            out += "Implies(";
            print_into(e->antecedent(), out);
            out += ", ";
            print_into(e->consequent(), out);
            out += ')';
            return;
    }
}

}  // namespace

std::string print(const ExprPtr& expr) {
    std::string out;
    print_into(expr, out);
    return out;
}

// --- parsing ---

namespace {

struct Token {
    enum class Type { Ident, Number, Text, LParen, RParen, Comma, Op, End };
    Type type = Type::End;
    std::string text;
    CmpOp op = CmpOp::Eq;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        current_ = Token{};
        current_.pos = i_;
        if (i_ >= src_.size()) {
            current_.type = Token::Type::End;
            return;
        }
        char c = src_[i_];
        if (c == '(') {
            current_ = {Token::Type::LParen, "(", CmpOp::Eq, i_++};
            return;
        }
        if (c == ')') {
            current_ = {Token::Type::RParen, ")", CmpOp::Eq, i_++};
            return;
        }
        if (c == ',') {
            current_ = {Token::Type::Comma, ",", CmpOp::Eq, i_++};
            return;
        }
        if (c == '>' || c == '<' || c == '=' || c == '!') {
            std::size_t start = i_;
            ++i_;
            bool eq = i_ < src_.size() && src_[i_] == '=';
            if (eq) ++i_;
            CmpOp op;
            if (c == '>') op = eq ? CmpOp::Ge : CmpOp::Gt;
            else if (c == '<') op = eq ? CmpOp::Le : CmpOp::Lt;
            else if (c == '=') op = CmpOp::Eq;  // both = and ==
            else {
                if (!eq) throw SyntaxError(start, "comparison operator", "!");
                op = CmpOp::Ne;
            }
            current_ = {Token::Type::Op, src_.substr(start, i_ - start), op, start};
            return;
        }
        // UTF-8 "not equal" sign.
        if (static_cast<unsigned char>(c) == 0xE2 && i_ + 2 < src_.size() &&
            static_cast<unsigned char>(src_[i_ + 1]) == 0x89 &&
            static_cast<unsigned char>(src_[i_ + 2]) == 0xA0) {
            current_ = {Token::Type::Op, "!=", CmpOp::Ne, i_};
            i_ += 3;
            return;
        }
        if (c == '"') {
            std::size_t start = i_++;
            std::string value;
            while (i_ < src_.size() && src_[i_] != '"') {
                if (src_[i_] == '\\' && i_ + 1 < src_.size()) ++i_;
                value += src_[i_++];
            }
            if (i_ >= src_.size()) throw SyntaxError(start, "closing quote", "end of input");
            ++i_;
            current_ = {Token::Type::Text, value, CmpOp::Eq, start};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
            std::size_t start = i_;
            if (c == '-') ++i_;
            while (i_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.' || src_[i_] == '/')) {
                ++i_;
            }
            current_ = {Token::Type::Number, src_.substr(start, i_ - start), CmpOp::Eq, start};
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i_;
            while (i_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
                ++i_;
            }
            current_ = {Token::Type::Ident, src_.substr(start, i_ - start), CmpOp::Eq, start};
            return;
        }
        throw SyntaxError(i_, "expression", std::string(1, c));
    }

    const std::string& src_;
    std::size_t i_ = 0;
    Token current_;
};

bool is_operator_keyword(const std::string& name) {
    return name == "Implies" || name == "And" || name == "Or" || name == "Not" || name == "Equals";
}

class Parser {
public:
    explicit Parser(const std::string& src) : lex_(src) {}

    ExprPtr parse_root() {
        ExprPtr e = parse_expr();
        const Token& t = lex_.peek();
        if (t.type != Token::Type::End) {
            throw SyntaxError(t.pos, "end of input", t.text);
        }
        return e;
    }

private:
    ExprPtr parse_expr() {
        ExprPtr first = parse_operand();
        if (lex_.peek().type != Token::Type::Op) {
            // Lone identifier in boolean position.
            if (first->kind() == Expr::Kind::Var && first->var_sort() == VarSort::Scalar) {
                return Expr::var(first->label(), VarSort::Bool);
            }
            return first;
        }
        Token op = lex_.take();
        ExprPtr second = parse_term();
        if (!first->is_term()) {
            throw SyntaxError(op.pos, "comparison over variables, constants, or function applications",
                              op.text);
        }
        return build_cmp(op.op, first, second);
    }

    // An operand is either an operator call (boolean) or a term.
    ExprPtr parse_operand() {
        const Token& t = lex_.peek();
        if (t.type == Token::Type::Ident && is_operator_keyword(t.text)) {
            Token name = lex_.take();
            expect(Token::Type::LParen, "(");
            std::vector<ExprPtr> args;
            if (name.text == "Equals") {
                args.push_back(parse_term());
                expect(Token::Type::Comma, ",");
                args.push_back(parse_term());
                expect(Token::Type::RParen, ")");
                return build_cmp(CmpOp::Eq, args[0], args[1]);
            }
            args.push_back(parse_expr());
            while (lex_.peek().type == Token::Type::Comma) {
                lex_.take();
                args.push_back(parse_expr());
            }
            expect(Token::Type::RParen, ")");
            if (name.text == "Not") {
                if (args.size() != 1) throw ArityError("Not", args.size());
                return Expr::negate(args[0]);
            }
            if (name.text == "Implies") {
                if (args.size() != 2) throw ArityError("Implies", args.size());
                return Expr::implies(args[0], args[1]);
            }
            if (args.size() < 2) throw ArityError(name.text, args.size());
            return name.text == "And" ? Expr::conj(std::move(args)) : Expr::disj(std::move(args));
        }
        return parse_term();
    }

    ExprPtr parse_term() {
        Token t = lex_.take();
        switch (t.type) {
            case Token::Type::Number: {
                auto r = Rational::parse(t.text);
                if (!r) throw SyntaxError(t.pos, "numeric literal", t.text);
                return Expr::num_const(*r);
            }
            case Token::Type::Text:
                return Expr::text_const(t.text);
            case Token::Type::Ident: {
                if (t.text == "true") return Expr::bool_const(true);
                if (t.text == "false") return Expr::bool_const(false);
                if (is_operator_keyword(t.text)) {
                    throw SyntaxError(t.pos, "a term, not a logical operator", t.text);
                }
                if (lex_.peek().type == Token::Type::LParen) {
                    lex_.take();
                    std::vector<ExprPtr> args;
                    args.push_back(parse_term());
                    while (lex_.peek().type == Token::Type::Comma) {
                        lex_.take();
                        args.push_back(parse_term());
                    }
                    expect(Token::Type::RParen, ")");
                    return Expr::func_app(t.text, std::move(args));
                }
                return Expr::var(t.text, VarSort::Scalar);
            }
            default:
                throw SyntaxError(t.pos, "variable, constant, or function application",
                                  t.text.empty() ? "end of input" : t.text);
        }
    }

    // Sort annotations: order operators force numeric operands; for = and !=
    // a constant sibling decides, otherwise both stay Scalar for typecheck.
    ExprPtr build_cmp(CmpOp op, ExprPtr lhs, ExprPtr rhs) {
        bool order_op = op == CmpOp::Lt || op == CmpOp::Le || op == CmpOp::Gt || op == CmpOp::Ge;
        VarSort hint = VarSort::Scalar;
        if (order_op || lhs->kind() == Expr::Kind::NumConst || rhs->kind() == Expr::Kind::NumConst ||
            lhs->kind() == Expr::Kind::FuncApp || rhs->kind() == Expr::Kind::FuncApp) {
            hint = VarSort::Num;
        } else if (lhs->kind() == Expr::Kind::TextConst || rhs->kind() == Expr::Kind::TextConst) {
            hint = VarSort::Text;
        }
        auto apply = [&](const ExprPtr& side) -> ExprPtr {
            if (side->kind() == Expr::Kind::Var && hint != VarSort::Scalar) {
                return Expr::var(side->label(), hint);
            }
            return side;
        };
        return Expr::cmp(op, apply(lhs), apply(rhs));
    }

    void expect(Token::Type type, const std::string& what) {
        const Token& t = lex_.peek();
        if (t.type != type) {
            throw SyntaxError(t.pos, what, t.text.empty() ? "end of input" : t.text);
        }
        lex_.take();
    }

    Lexer lex_;
};

}  // namespace

ExprPtr parse(const std::string& source) {
    Parser p(source);
    return p.parse_root();
}

// --- typecheck ---

namespace {

enum class Sort { Bool, Num, Text };

std::string sort_name(Sort s) {
    switch (s) {
        case Sort::Bool: return "boolean";
        case Sort::Num: return "numeric";
        case Sort::Text: return "text";
    }
    return "";
}

struct TypecheckState {
    const Vocabulary& vocab;
    std::optional<TypecheckError> error;

    void fail(TypecheckError::Kind kind, std::string symbol, std::string detail) {
        if (!error) error = TypecheckError{kind, std::move(symbol), std::move(detail)};
    }
};

std::optional<Sort> check(const ExprPtr& e, TypecheckState& st);

std::optional<Sort> check_var(const ExprPtr& e, TypecheckState& st) {
    auto it = st.vocab.concepts.find(e->label());
    if (it == st.vocab.concepts.end()) {
        st.fail(TypecheckError::Kind::UnknownSymbol, e->label(),
                "variable does not name an ontology concept");
        return std::nullopt;
    }
    Sort actual;
    switch (it->second) {
        case ValueKind::Boolean: actual = Sort::Bool; break;
        case ValueKind::Numeric: actual = Sort::Num; break;
        case ValueKind::Text: actual = Sort::Text; break;
        case ValueKind::Entity:
            st.fail(TypecheckError::Kind::KindMismatch, e->label(),
                    "entity concept used as a value");
            return std::nullopt;
    }
    bool ok = false;
    switch (e->var_sort()) {
        case VarSort::Bool: ok = actual == Sort::Bool; break;
        case VarSort::Num: ok = actual == Sort::Num; break;
        case VarSort::Text: ok = actual == Sort::Text; break;
        case VarSort::Scalar: ok = actual == Sort::Num || actual == Sort::Text; break;
    }
    if (!ok) {
        st.fail(TypecheckError::Kind::KindMismatch, e->label(),
                "concept kind " + to_string(it->second) + " does not fit this position");
        return std::nullopt;
    }
    return actual;
}

std::optional<Sort> check(const ExprPtr& e, TypecheckState& st) {
    switch (e->kind()) {
        case Expr::Kind::Var:
            return check_var(e, st);
        case Expr::Kind::BoolConst:
            return Sort::Bool;
        case Expr::Kind::NumConst:
            return Sort::Num;
        case Expr::Kind::TextConst:
            return Sort::Text;
        case Expr::Kind::FuncApp: {
            if (!st.vocab.functions.count(e->label())) {
                st.fail(TypecheckError::Kind::UnknownSymbol, e->label(),
                        "function is not a registered table");
                return std::nullopt;
            }
            if (e->children().size() != 1) {
                st.fail(TypecheckError::Kind::KindMismatch, e->label(),
                        "registered tables take exactly one numeric argument");
                return std::nullopt;
            }
            auto arg = check(e->children()[0], st);
            if (!arg) return std::nullopt;
            if (*arg != Sort::Num) {
                st.fail(TypecheckError::Kind::KindMismatch, e->label(),
                        "table argument must be numeric, got " + sort_name(*arg));
                return std::nullopt;
            }
            return Sort::Num;
        }
        case Expr::Kind::Cmp: {
            auto ls = check(e->lhs(), st);
            auto rs = check(e->rhs(), st);
            if (!ls || !rs) return std::nullopt;
            if (*ls == Sort::Bool || *rs == Sort::Bool) {
                st.fail(TypecheckError::Kind::KindMismatch, print(e),
                        "comparison operands must be numeric or text");
                return std::nullopt;
            }
            if (*ls != *rs) {
                st.fail(TypecheckError::Kind::KindMismatch, print(e),
                        "comparison mixes " + sort_name(*ls) + " and " + sort_name(*rs));
                return std::nullopt;
            }
            if (*ls == Sort::Text && e->cmp_op() != CmpOp::Eq && e->cmp_op() != CmpOp::Ne) {
                st.fail(TypecheckError::Kind::KindMismatch, print(e),
                        "text comparisons admit only = and !=");
                return std::nullopt;
            }
            return Sort::Bool;
        }
        case Expr::Kind::Not:
        case Expr::Kind::And:
        case Expr::Kind::Or:
        case Expr::Kind::Implies: {
            for (const auto& k : e->children()) {
                auto s = check(k, st);
                if (!s) return std::nullopt;
                if (*s != Sort::Bool) {
                    st.fail(TypecheckError::Kind::KindMismatch, print(k),
                            "connective child must be boolean, got " + sort_name(*s));
                    return std::nullopt;
                }
            }
            return Sort::Bool;
        }
    }
    return std::nullopt;
}

}  // namespace

std::string TypecheckError::str() const {
    const char* k = "";
    switch (kind) {
        case Kind::UnknownSymbol: k = "unknown symbol"; break;
        case Kind::KindMismatch: k = "kind mismatch"; break;
        case Kind::NonBooleanRoot: k = "non-boolean root"; break;
    }
    return std::string(k) + " (" + symbol + "): " + detail;
}

std::optional<TypecheckError> typecheck(const ExprPtr& expr, const Vocabulary& vocab) {
    TypecheckState st{vocab, std::nullopt};
    auto sort = check(expr, st);
    if (st.error) return st.error;
    if (!sort || *sort != Sort::Bool) {
        return TypecheckError{TypecheckError::Kind::NonBooleanRoot, print(expr),
                              "expression does not denote a boolean"};
    }
    return std::nullopt;
}

// --- canonicalize ---

namespace {

bool eval_ground_cmp(CmpOp op, const ExprPtr& l, const ExprPtr& r, bool& out) {
    if (l->kind() == Expr::Kind::NumConst && r->kind() == Expr::Kind::NumConst) {
        const Rational& a = l->num_value();
        const Rational& b = r->num_value();
        switch (op) {
            case CmpOp::Lt: out = a < b; break;
            case CmpOp::Le: out = a <= b; break;
            case CmpOp::Gt: out = a > b; break;
            case CmpOp::Ge: out = a >= b; break;
            case CmpOp::Eq: out = a == b; break;
            case CmpOp::Ne: out = a != b; break;
        }
        return true;
    }
    if (l->kind() == Expr::Kind::TextConst && r->kind() == Expr::Kind::TextConst &&
        (op == CmpOp::Eq || op == CmpOp::Ne)) {
        bool eq = l->text_value() == r->text_value();
        out = op == CmpOp::Eq ? eq : !eq;
        return true;
    }
    return false;
}

bool is_const_term(const ExprPtr& e) {
    return e->kind() == Expr::Kind::NumConst || e->kind() == Expr::Kind::TextConst;
}

CmpOp flip(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return CmpOp::Gt;
        case CmpOp::Le: return CmpOp::Ge;
        case CmpOp::Gt: return CmpOp::Lt;
        case CmpOp::Ge: return CmpOp::Le;
        case CmpOp::Eq: return CmpOp::Eq;
        case CmpOp::Ne: return CmpOp::Ne;
    }
    return op;
}

ExprPtr canon(const ExprPtr& e) {
    switch (e->kind()) {
        case Expr::Kind::Var:
        case Expr::Kind::BoolConst:
        case Expr::Kind::NumConst:
        case Expr::Kind::TextConst:
        case Expr::Kind::FuncApp:
            return e;
        case Expr::Kind::Cmp: {
            ExprPtr l = e->lhs();
            ExprPtr r = e->rhs();
            if (e->cmp_op() == CmpOp::Ne) {
                return canon(Expr::negate(Expr::cmp(CmpOp::Eq, l, r)));
            }
            bool ground = false;
            if (eval_ground_cmp(e->cmp_op(), l, r, ground)) {
                return Expr::bool_const(ground);
            }
            if (is_const_term(l) && !is_const_term(r)) {
                return Expr::cmp(flip(e->cmp_op()), r, l);
            }
            return e;
        }
        case Expr::Kind::Not: {
            ExprPtr c = canon(e->child());
            if (c->kind() == Expr::Kind::Not) return c->child();
            if (c->kind() == Expr::Kind::BoolConst) return Expr::bool_const(!c->bool_value());
            return Expr::negate(c);
        }
        case Expr::Kind::And:
        case Expr::Kind::Or: {
            std::vector<ExprPtr> flat;
            for (const auto& k : e->children()) {
                ExprPtr c = canon(k);
                if (c->kind() == e->kind()) {
                    flat.insert(flat.end(), c->children().begin(), c->children().end());
                } else {
                    flat.push_back(c);
                }
            }
            std::vector<std::pair<std::string, ExprPtr>> keyed;
            keyed.reserve(flat.size());
            for (auto& c : flat) keyed.emplace_back(print(c), std::move(c));
            std::stable_sort(keyed.begin(), keyed.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            std::vector<ExprPtr> sorted;
            sorted.reserve(keyed.size());
            for (auto& kv : keyed) sorted.push_back(std::move(kv.second));
            return e->kind() == Expr::Kind::And ? Expr::conj(std::move(sorted))
                                                : Expr::disj(std::move(sorted));
        }
        case Expr::Kind::Implies:
            return Expr::implies(canon(e->antecedent()), canon(e->consequent()));
    }
    return e;
}

}  // namespace

ExprPtr canonicalize(const ExprPtr& expr) {
    return canon(expr);
}

std::set<std::string> free_symbols(const ExprPtr& expr) {
    std::set<std::string> out;
    std::vector<const Expr*> stack{expr.get()};
    while (!stack.empty()) {
        const Expr* e = stack.back();
        stack.pop_back();
        if (e->kind() == Expr::Kind::Var) out.insert(e->label());
        if (e->kind() == Expr::Kind::FuncApp) out.insert(e->label());
        for (const auto& k : e->children()) stack.push_back(k.get());
    }
    return out;
}

ExprPtr rewrite_applied_vars(const ExprPtr& expr, const Vocabulary& vocab) {
    if (expr->kind() == Expr::Kind::FuncApp && expr->children().size() == 1 &&
        expr->children()[0]->kind() == Expr::Kind::Var && !vocab.functions.count(expr->label())) {
        std::string flat = expr->children()[0]->label() + "_" + expr->label();
        auto it = vocab.concepts.find(flat);
        if (it != vocab.concepts.end()) {
            VarSort sort = VarSort::Scalar;
            if (it->second == ValueKind::Boolean) sort = VarSort::Bool;
            else if (it->second == ValueKind::Numeric) sort = VarSort::Num;
            else if (it->second == ValueKind::Text) sort = VarSort::Text;
            return Expr::var(flat, sort);
        }
    }
    if (expr->children().empty()) return expr;
    std::vector<ExprPtr> kids;
    kids.reserve(expr->children().size());
    bool changed = false;
    for (const auto& k : expr->children()) {
        ExprPtr nk = rewrite_applied_vars(k, vocab);
        changed = changed || nk.get() != k.get();
        kids.push_back(std::move(nk));
    }
    if (!changed) return expr;
    switch (expr->kind()) {
        case Expr::Kind::FuncApp: return Expr::func_app(expr->label(), std::move(kids));
        case Expr::Kind::Cmp: return Expr::cmp(expr->cmp_op(), kids[0], kids[1]);
        case Expr::Kind::Not: return Expr::negate(kids[0]);
        case Expr::Kind::And: return Expr::conj(std::move(kids));
        case Expr::Kind::Or: return Expr::disj(std::move(kids));
        case Expr::Kind::Implies: return Expr::implies(kids[0], kids[1]);
        default: return expr;
    }
}

}  // namespace lexverify
