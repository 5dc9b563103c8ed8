// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference evaluator used as a test oracle. Deliberately written as a plain
// recursive walk with no sharing with the library's own evaluation or solving
// code, so the two can disagree when one of them is wrong.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "lexverify/logic.hpp"
#include "lexverify/rational.hpp"

namespace lexverify::testing {

struct OracleValue {
    enum class Kind { Bool, Num, Text } kind;
    bool b = false;
    Rational n = Rational(0);
    std::string t;

    static OracleValue of(bool v) { return {Kind::Bool, v, Rational(0), ""}; }
    static OracleValue of(Rational v) { return {Kind::Num, false, v, ""}; }
    static OracleValue of(std::string v) { return {Kind::Text, false, Rational(0), std::move(v)}; }
};

using OracleAssignment = std::map<std::string, OracleValue>;
using OracleTable = std::map<std::string, std::map<Rational, Rational>>;

inline OracleValue oracle_eval(const ExprPtr& e, const OracleAssignment& env,
                               const OracleTable& tables = {}) {
    switch (e->kind()) {
        case Expr::Kind::Var: {
            auto it = env.find(e->label());
            if (it == env.end()) throw std::runtime_error("oracle: unbound " + e->label());
            return it->second;
        }
        case Expr::Kind::BoolConst:
            return OracleValue::of(e->bool_value());
        case Expr::Kind::NumConst:
            return OracleValue::of(e->num_value());
        case Expr::Kind::TextConst:
            return OracleValue::of(e->text_value());
        case Expr::Kind::FuncApp: {
            auto table = tables.find(e->label());
            if (table == tables.end()) throw std::runtime_error("oracle: no table " + e->label());
            OracleValue arg = oracle_eval(e->children()[0], env, tables);
            if (arg.kind != OracleValue::Kind::Num) throw std::runtime_error("oracle: table arg");
            auto row = table->second.find(arg.n);
            if (row == table->second.end()) throw std::runtime_error("oracle: missing row");
            return OracleValue::of(row->second);
        }
        case Expr::Kind::Cmp: {
            OracleValue l = oracle_eval(e->lhs(), env, tables);
            OracleValue r = oracle_eval(e->rhs(), env, tables);
            if (l.kind != r.kind) throw std::runtime_error("oracle: mixed comparison");
            if (l.kind == OracleValue::Kind::Text) {
                if (e->cmp_op() == CmpOp::Eq) return OracleValue::of(l.t == r.t);
                if (e->cmp_op() == CmpOp::Ne) return OracleValue::of(l.t != r.t);
                throw std::runtime_error("oracle: ordered text comparison");
            }
            if (l.kind != OracleValue::Kind::Num) throw std::runtime_error("oracle: bool comparison");
            switch (e->cmp_op()) {
                case CmpOp::Lt: return OracleValue::of(l.n < r.n);
                case CmpOp::Le: return OracleValue::of(l.n <= r.n);
                case CmpOp::Gt: return OracleValue::of(l.n > r.n);
                case CmpOp::Ge: return OracleValue::of(l.n >= r.n);
                case CmpOp::Eq: return OracleValue::of(l.n == r.n);
                case CmpOp::Ne: return OracleValue::of(l.n != r.n);
            }
            throw std::runtime_error("oracle: bad op");
        }
        case Expr::Kind::Not: {
            OracleValue c = oracle_eval(e->child(), env, tables);
            if (c.kind != OracleValue::Kind::Bool) throw std::runtime_error("oracle: Not child");
            return OracleValue::of(!c.b);
        }
        case Expr::Kind::And: {
            bool all = true;
            for (const auto& k : e->children()) {
                OracleValue c = oracle_eval(k, env, tables);
                if (c.kind != OracleValue::Kind::Bool) throw std::runtime_error("oracle: And child");
                all = all && c.b;
            }
            return OracleValue::of(all);
        }
        case Expr::Kind::Or: {
            bool any = false;
            for (const auto& k : e->children()) {
                OracleValue c = oracle_eval(k, env, tables);
                if (c.kind != OracleValue::Kind::Bool) throw std::runtime_error("oracle: Or child");
                any = any || c.b;
            }
            return OracleValue::of(any);
        }
        case Expr::Kind::Implies: {
            OracleValue a = oracle_eval(e->antecedent(), env, tables);
            OracleValue c = oracle_eval(e->consequent(), env, tables);
            if (a.kind != OracleValue::Kind::Bool || c.kind != OracleValue::Kind::Bool) {
                throw std::runtime_error("oracle: Implies child");
            }
            return OracleValue::of(!a.b || c.b);
        }
    }
    throw std::runtime_error("oracle: unreachable");
}

inline bool oracle_truth(const ExprPtr& e, const OracleAssignment& env,
                         const OracleTable& tables = {}) {
    OracleValue v = oracle_eval(e, env, tables);
    if (v.kind != OracleValue::Kind::Bool) throw std::runtime_error("oracle: non-boolean root");
    return v.b;
}

}  // namespace lexverify::testing
