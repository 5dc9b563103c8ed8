// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
//
// First-order constraint fragment shared by rules, facts, and explanation
// assertions: boolean/numeric/text variables, exact rational and text
// constants, registered table functions, comparisons, and the connectives
// Not / And / Or / Implies. The fragment has no quantifiers and no
// arithmetic operators; comparisons relate terms directly.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexverify/rational.hpp"

namespace lexverify {

enum class ValueKind { Boolean, Numeric, Text, Entity };

std::string to_string(ValueKind kind);
// Accepts the export spellings ("Boolean", "Numeric", "String", "Entity")
// plus the aliases "Text" and "Number".
std::optional<ValueKind> value_kind_from_string(const std::string& text);

// A ground value a case file can assign to a variable.
struct GroundValue {
    enum class Kind { Boolean, Number, Text };

    static GroundValue boolean(bool b);
    static GroundValue number(Rational r);
    static GroundValue text(std::string t);

    Kind kind = Kind::Boolean;
    bool bool_value = false;
    Rational number_value;
    std::string text_value;

    std::string str() const;
    bool operator==(const GroundValue& o) const;
};

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

std::string to_string(CmpOp op);

// Syntactic sort annotation on a variable occurrence. The parser fixes Bool
// for boolean positions and Num where an order comparison or numeric sibling
// forces it; Scalar defers the numeric/text decision to typecheck, which
// resolves every label against the ontology vocabulary. Structural equality
// ignores the annotation: a label names exactly one concept.
enum class VarSort { Bool, Num, Text, Scalar };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
public:
    enum class Kind { Var, BoolConst, NumConst, TextConst, FuncApp, Cmp, Not, And, Or, Implies };

    Kind kind() const { return kind_; }

    // Var label or FuncApp name.
    const std::string& label() const { return label_; }
    VarSort var_sort() const { return sort_; }
    bool bool_value() const { return bval_; }
    const Rational& num_value() const { return nval_; }
    const std::string& text_value() const { return label_; }
    CmpOp cmp_op() const { return op_; }
    // FuncApp arguments, Cmp operands (lhs, rhs), Not child, And/Or children,
    // Implies (antecedent, consequent).
    const std::vector<ExprPtr>& children() const { return kids_; }
    const ExprPtr& lhs() const { return kids_[0]; }
    const ExprPtr& rhs() const { return kids_[1]; }
    const ExprPtr& child() const { return kids_[0]; }
    const ExprPtr& antecedent() const { return kids_[0]; }
    const ExprPtr& consequent() const { return kids_[1]; }

    bool is_term() const {
        return kind_ == Kind::Var || kind_ == Kind::NumConst || kind_ == Kind::TextConst ||
               kind_ == Kind::FuncApp;
    }

    static ExprPtr var(std::string label, VarSort sort = VarSort::Bool);
    static ExprPtr bool_const(bool value);
    static ExprPtr num_const(Rational value);
    static ExprPtr text_const(std::string value);
    static ExprPtr func_app(std::string name, std::vector<ExprPtr> args);
    static ExprPtr cmp(CmpOp op, ExprPtr lhs, ExprPtr rhs);
    static ExprPtr negate(ExprPtr child);
    // And/Or require at least two children; Implies is binary.
    static ExprPtr conj(std::vector<ExprPtr> children);
    static ExprPtr disj(std::vector<ExprPtr> children);
    static ExprPtr implies(ExprPtr antecedent, ExprPtr consequent);

private:
    Expr() = default;

    Kind kind_ = Kind::BoolConst;
    std::string label_;      // Var label, FuncApp name, or TextConst value
    VarSort sort_ = VarSort::Bool;
    bool bval_ = false;
    Rational nval_;
    CmpOp op_ = CmpOp::Eq;
    std::vector<ExprPtr> kids_;
};

// Label-based equality: variable sort annotations are derived data and do
// not participate.
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

// Concept labels with their value kinds, plus the names of registered table
// functions (unary, numeric to numeric).
struct Vocabulary {
    std::map<std::string, ValueKind> concepts;
    std::set<std::string> functions;
};

// Parses the surface syntax: operator calls Implies(a, b) / And(...) /
// Or(...) / Not(a) / Equals(a, b), infix comparisons with > >= < <= = == !=,
// identifiers, decimal or num/den rational literals, double-quoted text
// literals, true/false. Whitespace including newlines is insignificant.
// Throws SyntaxError or ArityError.
ExprPtr parse(const std::string& source);

// Canonical surface form; parse(print(e)) is structurally identical to e.
std::string print(const ExprPtr& expr);

struct TypecheckError {
    enum class Kind { UnknownSymbol, KindMismatch, NonBooleanRoot };
    Kind kind;
    std::string symbol;
    std::string detail;

    std::string str() const;
};

// Validates the expression against the vocabulary: every variable resolves
// to a concept of a compatible kind, comparisons are kind-homogeneous (text
// admits only = and !=), function applications match a registered table
// signature, and the root is boolean. Returns nullopt on success.
std::optional<TypecheckError> typecheck(const ExprPtr& expr, const Vocabulary& vocab);

// Normal form, applied to fixpoint: double negation removed, nested And/Or
// flattened and children sorted by printed form, a != b rewritten to
// Not(a = b), ground comparisons folded, and comparisons oriented so a
// variable precedes a constant. Implies is kept, not expanded. Idempotent
// and semantics-preserving.
ExprPtr canonicalize(const ExprPtr& expr);

// Every variable label and function name appearing in the expression.
std::set<std::string> free_symbols(const ExprPtr& expr);

// Rewrites applied-variable sugar F(X) to the flat variable X_F when F is
// not a registered function and the flat label exists in the vocabulary.
// Formalizer output in the applied style normalizes through this before
// typechecking.
ExprPtr rewrite_applied_vars(const ExprPtr& expr, const Vocabulary& vocab);

}  // namespace lexverify
