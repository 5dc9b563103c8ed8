// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
#include "lexverify/verify.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "lexverify/errors.hpp"
#include "nlohmann/json.hpp"

namespace lexverify {

namespace {

// ---------------------------------------------------------------------------
// Grounding helpers

ExprPtr substitute_facts(const ExprPtr& e, const std::map<std::string, GroundValue>& facts) {
    switch (e->kind()) {
        case Expr::Kind::Var: {
            auto it = facts.find(e->label());
            if (it == facts.end()) return e;
            switch (it->second.kind) {
                case GroundValue::Kind::Boolean:
                    return Expr::bool_const(it->second.bool_value);
                case GroundValue::Kind::Number:
                    return Expr::num_const(it->second.number_value);
                case GroundValue::Kind::Text:
                    return Expr::text_const(it->second.text_value);
            }
            return e;
        }
        case Expr::Kind::BoolConst:
        case Expr::Kind::NumConst:
        case Expr::Kind::TextConst:
            return e;
        case Expr::Kind::FuncApp: {
            std::vector<ExprPtr> args;
            for (const auto& a : e->children()) args.push_back(substitute_facts(a, facts));
            return Expr::func_app(e->label(), std::move(args));
        }
        case Expr::Kind::Cmp:
            return Expr::cmp(e->cmp_op(), substitute_facts(e->lhs(), facts),
                             substitute_facts(e->rhs(), facts));
        case Expr::Kind::Not:
            return Expr::negate(substitute_facts(e->child(), facts));
        case Expr::Kind::And:
        case Expr::Kind::Or: {
            std::vector<ExprPtr> kids;
            for (const auto& k : e->children()) kids.push_back(substitute_facts(k, facts));
            return e->kind() == Expr::Kind::And ? Expr::conj(std::move(kids))
                                                : Expr::disj(std::move(kids));
        }
        case Expr::Kind::Implies:
            return Expr::implies(substitute_facts(e->antecedent(), facts),
                                 substitute_facts(e->consequent(), facts));
    }
    return e;
}

bool eval_ground_cmp(CmpOp op, const ExprPtr& l, const ExprPtr& r) {
    if (l->kind() == Expr::Kind::NumConst && r->kind() == Expr::Kind::NumConst) {
        const Rational& a = l->num_value();
        const Rational& b = r->num_value();
        switch (op) {
            case CmpOp::Lt: return a < b;
            case CmpOp::Le: return a <= b;
            case CmpOp::Gt: return a > b;
            case CmpOp::Ge: return a >= b;
            case CmpOp::Eq: return a == b;
            case CmpOp::Ne: return a != b;
        }
    }
    if (l->kind() == Expr::Kind::TextConst && r->kind() == Expr::Kind::TextConst) {
        if (op == CmpOp::Eq) return l->text_value() == r->text_value();
        if (op == CmpOp::Ne) return l->text_value() != r->text_value();
    }
    throw TypecheckFailed("cannot evaluate comparison over mixed constants");
}

bool is_const_operand(const ExprPtr& e) {
    return e->kind() == Expr::Kind::NumConst || e->kind() == Expr::Kind::TextConst;
}

// Constant folding after substitution. Evaluates function applications whose
// argument became ground; missing rows are an error, not a free value.
ExprPtr fold(const ExprPtr& e, const FunctionTables& tables) {
    switch (e->kind()) {
        case Expr::Kind::Var:
        case Expr::Kind::BoolConst:
        case Expr::Kind::NumConst:
        case Expr::Kind::TextConst:
            return e;
        case Expr::Kind::FuncApp: {
            std::vector<ExprPtr> args;
            bool ground_args = true;
            for (const auto& a : e->children()) {
                args.push_back(fold(a, tables));
                if (args.back()->kind() != Expr::Kind::NumConst) ground_args = false;
            }
            if (ground_args && args.size() == 1) {
                auto table = tables.find(e->label());
                if (table == tables.end()) {
                    throw MissingTableEntry(e->label(), args[0]->num_value().str());
                }
                auto row = table->second.find(args[0]->num_value());
                if (row == table->second.end()) {
                    throw MissingTableEntry(e->label(), args[0]->num_value().str());
                }
                return Expr::num_const(row->second);
            }
            return Expr::func_app(e->label(), std::move(args));
        }
        case Expr::Kind::Cmp: {
            ExprPtr l = fold(e->lhs(), tables);
            ExprPtr r = fold(e->rhs(), tables);
            if (is_const_operand(l) && is_const_operand(r)) {
                return Expr::bool_const(eval_ground_cmp(e->cmp_op(), l, r));
            }
            return Expr::cmp(e->cmp_op(), std::move(l), std::move(r));
        }
        case Expr::Kind::Not: {
            ExprPtr c = fold(e->child(), tables);
            if (c->kind() == Expr::Kind::BoolConst) return Expr::bool_const(!c->bool_value());
            return Expr::negate(std::move(c));
        }
        case Expr::Kind::And: {
            std::vector<ExprPtr> kids;
            for (const auto& k : e->children()) {
                ExprPtr f = fold(k, tables);
                if (f->kind() == Expr::Kind::BoolConst) {
                    if (!f->bool_value()) return Expr::bool_const(false);
                    continue;  // a true conjunct adds nothing
                }
                kids.push_back(std::move(f));
            }
            if (kids.empty()) return Expr::bool_const(true);
            if (kids.size() == 1) return kids[0];
            return Expr::conj(std::move(kids));
        }
        case Expr::Kind::Or: {
            std::vector<ExprPtr> kids;
            for (const auto& k : e->children()) {
                ExprPtr f = fold(k, tables);
                if (f->kind() == Expr::Kind::BoolConst) {
                    if (f->bool_value()) return Expr::bool_const(true);
                    continue;
                }
                kids.push_back(std::move(f));
            }
            if (kids.empty()) return Expr::bool_const(false);
            if (kids.size() == 1) return kids[0];
            return Expr::disj(std::move(kids));
        }
        case Expr::Kind::Implies: {
            ExprPtr a = fold(e->antecedent(), tables);
            ExprPtr c = fold(e->consequent(), tables);
            if (a->kind() == Expr::Kind::BoolConst) {
                return a->bool_value() ? c : Expr::bool_const(true);
            }
            if (c->kind() == Expr::Kind::BoolConst) {
                if (c->bool_value()) return Expr::bool_const(true);
                return fold(Expr::negate(std::move(a)), tables);
            }
            return Expr::implies(std::move(a), std::move(c));
        }
    }
    return e;
}

ExprPtr ground_expr(const ExprPtr& e, const std::map<std::string, GroundValue>& facts,
                    const FunctionTables& tables) {
    return canonicalize(fold(substitute_facts(e, facts), tables));
}

// Extracts the fact map a set of items defines through its Fact-tagged
// members. Used so core minimization re-grounds each candidate subset with
// only the facts that subset still contains.
std::map<std::string, GroundValue> facts_of(const std::vector<ConstraintItem>& items) {
    std::map<std::string, GroundValue> facts;
    for (const ConstraintItem& item : items) {
        if (item.tag.kind != ItemTag::Kind::Fact) continue;
        const ExprPtr& e = item.expr;
        if (e->kind() == Expr::Kind::Var) {
            facts.emplace(e->label(), GroundValue::boolean(true));
        } else if (e->kind() == Expr::Kind::Not && e->child()->kind() == Expr::Kind::Var) {
            facts.emplace(e->child()->label(), GroundValue::boolean(false));
        } else if (e->kind() == Expr::Kind::Cmp && e->cmp_op() == CmpOp::Eq &&
                   e->lhs()->kind() == Expr::Kind::Var) {
            if (e->rhs()->kind() == Expr::Kind::NumConst) {
                facts.emplace(e->lhs()->label(), GroundValue::number(e->rhs()->num_value()));
            } else if (e->rhs()->kind() == Expr::Kind::TextConst) {
                facts.emplace(e->lhs()->label(), GroundValue::text(e->rhs()->text_value()));
            }
        }
    }
    return facts;
}

// ---------------------------------------------------------------------------
// Theory engines

struct Term {
    bool is_var = false;
    std::string var;
    Rational value;      // numeric constant
    std::string text;    // text constant
};

struct NumericLiteral {
    CmpOp op;
    Term lhs, rhs;
};

struct TextLiteral {
    bool equal;  // false means disequality
    Term lhs, rhs;
};

CmpOp negate_op(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return CmpOp::Ge;
        case CmpOp::Le: return CmpOp::Gt;
        case CmpOp::Gt: return CmpOp::Le;
        case CmpOp::Ge: return CmpOp::Lt;
        case CmpOp::Eq: return CmpOp::Ne;
        case CmpOp::Ne: return CmpOp::Eq;
    }
    return op;
}

CmpOp flip_op(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return CmpOp::Gt;
        case CmpOp::Le: return CmpOp::Ge;
        case CmpOp::Gt: return CmpOp::Lt;
        case CmpOp::Ge: return CmpOp::Le;
        default: return op;
    }
}

struct Bound {
    std::optional<Rational> value;
    bool open = false;
};

class UnionFind {
public:
    const std::string& find(const std::string& x) {
        auto it = parent_.find(x);
        if (it == parent_.end() || it->second == x) {
            parent_[x] = x;
            return parent_[x];
        }
        const std::string& root = find(it->second);
        parent_[x] = root;
        return parent_[x];
    }
    // The lexicographically smaller label stays the representative, keeping
    // every downstream ordering deterministic.
    void merge(const std::string& a, const std::string& b) {
        std::string ra = find(a), rb = find(b);
        if (ra == rb) return;
        if (rb < ra) std::swap(ra, rb);
        parent_[rb] = ra;
    }

private:
    std::map<std::string, std::string> parent_;
};

// Decides conjunctions of numeric literals over exact rationals: intervals
// per equivalence class, order edges between classes, strict cycles
// rejected, witness assigned along a topological order.
class NumericEngine {
public:
    bool add(const std::vector<NumericLiteral>& literals, std::string* conflict) {
        for (const auto& lit : literals) {
            if (!add_one(lit, conflict)) return false;
        }
        return saturate(conflict);
    }

    // Requires a successful saturate. Produces one value per variable seen.
    std::map<std::string, Rational> witness() {
        std::map<std::string, Rational> out;
        std::map<std::string, Rational> rep_value;

        std::set<std::string> reps;
        for (const auto& v : vars_) reps.insert(uf_.find(v));

        // Point classes first: they have no freedom, and free classes must
        // dodge their values when a disequality links them.
        for (const auto& r : reps) {
            const Cls& c = cls(r);
            if (c.lo.value && c.hi.value && *c.lo.value == *c.hi.value) {
                rep_value.emplace(r, *c.lo.value);
            }
        }

        // Kahn order over the remaining classes; ties break on label.
        std::set<std::string> pending;
        for (const auto& r : reps) {
            if (!rep_value.count(r)) pending.insert(r);
        }
        while (!pending.empty()) {
            std::string next;
            for (const auto& r : pending) {
                bool ready = true;
                for (const auto& [a, b, strict] : edges_) {
                    const std::string ra = uf_.find(a);
                    if (uf_.find(b) == r && ra != r && pending.count(ra)) {
                        ready = false;
                        break;
                    }
                }
                if (ready) {
                    next = r;
                    break;
                }
            }
            if (next.empty()) {
                throw Error("internal: numeric witness order has a residual cycle");
            }
            pending.erase(next);
            rep_value.emplace(next, pick_value(next, rep_value));
        }

        for (const auto& v : vars_) out.emplace(v, rep_value.at(uf_.find(v)));
        return out;
    }

private:
    struct Cls {
        Bound lo, hi;
        std::set<Rational> excluded;
    };

    Cls& cls(const std::string& rep) { return classes_[rep]; }

    static bool tighten_hi(Bound& hi, const Rational& v, bool open) {
        if (!hi.value || v < *hi.value || (v == *hi.value && open && !hi.open)) {
            hi.value = v;
            hi.open = open;
            return true;
        }
        return false;
    }
    static bool tighten_lo(Bound& lo, const Rational& v, bool open) {
        if (!lo.value || v > *lo.value || (v == *lo.value && open && !lo.open)) {
            lo.value = v;
            lo.open = open;
            return true;
        }
        return false;
    }

    bool add_one(const NumericLiteral& input, std::string* conflict) {
        NumericLiteral lit = input;
        if (!lit.lhs.is_var && !lit.rhs.is_var) {
            bool ok = eval_ground_cmp(lit.op, Expr::num_const(lit.lhs.value),
                                      Expr::num_const(lit.rhs.value));
            if (!ok) {
                *conflict = "ground numeric comparison is false";
                return false;
            }
            return true;
        }
        if (!lit.lhs.is_var) {
            std::swap(lit.lhs, lit.rhs);
            lit.op = flip_op(lit.op);
        }
        vars_.insert(lit.lhs.var);
        if (!lit.rhs.is_var) {
            const std::string rep = uf_.find(lit.lhs.var);
            Cls& c = cls(rep);
            const Rational& k = lit.rhs.value;
            switch (lit.op) {
                case CmpOp::Lt: tighten_hi(c.hi, k, true); break;
                case CmpOp::Le: tighten_hi(c.hi, k, false); break;
                case CmpOp::Gt: tighten_lo(c.lo, k, true); break;
                case CmpOp::Ge: tighten_lo(c.lo, k, false); break;
                case CmpOp::Eq:
                    tighten_lo(c.lo, k, false);
                    tighten_hi(c.hi, k, false);
                    break;
                case CmpOp::Ne: c.excluded.insert(k); break;
            }
            return true;
        }
        vars_.insert(lit.rhs.var);
        const std::string& a = lit.lhs.var;
        const std::string& b = lit.rhs.var;
        switch (lit.op) {
            case CmpOp::Eq: merge(a, b); break;
            case CmpOp::Ne:
                if (uf_.find(a) == uf_.find(b)) {
                    *conflict = a + " and " + b + " are equal yet required distinct";
                    return false;
                }
                diseqs_.emplace_back(a, b);
                break;
            case CmpOp::Lt: edges_.emplace_back(a, b, true); break;
            case CmpOp::Le: edges_.emplace_back(a, b, false); break;
            case CmpOp::Gt: edges_.emplace_back(b, a, true); break;
            case CmpOp::Ge: edges_.emplace_back(b, a, false); break;
        }
        return true;
    }

    void merge(const std::string& a, const std::string& b) {
        std::string ra = uf_.find(a), rb = uf_.find(b);
        if (ra == rb) return;
        Cls merged = classes_.count(ra) ? classes_[ra] : Cls{};
        if (classes_.count(rb)) {
            const Cls& other = classes_[rb];
            if (other.lo.value) tighten_lo(merged.lo, *other.lo.value, other.lo.open);
            if (other.hi.value) tighten_hi(merged.hi, *other.hi.value, other.hi.open);
            merged.excluded.insert(other.excluded.begin(), other.excluded.end());
        }
        uf_.merge(ra, rb);
        classes_[uf_.find(ra)] = merged;
    }

    // Collapses order cycles (a chain a <= ... <= a forces equality, and a
    // strict edge inside one is a contradiction), then propagates bounds to
    // a fixpoint and checks interval emptiness and disequalities.
    bool saturate(std::string* conflict) {
        bool merged_any = true;
        while (merged_any) {
            merged_any = false;
            std::set<std::string> reps;
            for (const auto& v : vars_) reps.insert(uf_.find(v));
            std::vector<std::string> rep_list(reps.begin(), reps.end());
            const size_t n = rep_list.size();
            auto index_of = [&](const std::string& r) {
                return static_cast<size_t>(
                    std::lower_bound(rep_list.begin(), rep_list.end(), r) - rep_list.begin());
            };
            // reach[i][j]: a path of order edges from i to j; strict when
            // some edge on it is strict.
            std::vector<std::vector<int>> reach(n, std::vector<int>(n, 0));  // 0/1/2=strict
            for (const auto& [a, b, strict] : edges_) {
                size_t i = index_of(uf_.find(a));
                size_t j = index_of(uf_.find(b));
                if (i == j) {
                    if (strict) {
                        *conflict = a + " < " + b + " inside one equivalence class";
                        return false;
                    }
                    continue;
                }
                reach[i][j] = std::max(reach[i][j], strict ? 2 : 1);
            }
            for (size_t k = 0; k < n; ++k) {
                for (size_t i = 0; i < n; ++i) {
                    for (size_t j = 0; j < n; ++j) {
                        if (reach[i][k] && reach[k][j]) {
                            int via = std::max(reach[i][k], reach[k][j]);
                            reach[i][j] = std::max(reach[i][j], via);
                        }
                    }
                }
            }
            for (size_t i = 0; i < n && !merged_any; ++i) {
                for (size_t j = i + 1; j < n; ++j) {
                    if (reach[i][j] && reach[j][i]) {
                        if (reach[i][j] == 2 || reach[j][i] == 2) {
                            *conflict = "strict order cycle through " + rep_list[i] +
                                        " and " + rep_list[j];
                            return false;
                        }
                        merge(rep_list[i], rep_list[j]);
                        merged_any = true;
                        break;
                    }
                }
            }
        }

        bool changed = true;
        int guard = 0;
        while (changed) {
            changed = false;
            if (++guard > 10000) throw Error("internal: numeric propagation diverged");
            for (const auto& [a, b, strict] : edges_) {
                const std::string ra = uf_.find(a), rb = uf_.find(b);
                if (ra == rb) continue;
                Cls& ca = cls(ra);
                Cls& cb = cls(rb);
                if (cb.hi.value &&
                    tighten_hi(ca.hi, *cb.hi.value, cb.hi.open || strict)) {
                    changed = true;
                }
                if (ca.lo.value &&
                    tighten_lo(cb.lo, *ca.lo.value, ca.lo.open || strict)) {
                    changed = true;
                }
            }
        }

        std::set<std::string> reps;
        for (const auto& v : vars_) reps.insert(uf_.find(v));
        for (const auto& r : reps) {
            const Cls& c = cls(r);
            if (c.lo.value && c.hi.value) {
                if (*c.hi.value < *c.lo.value ||
                    (*c.hi.value == *c.lo.value && (c.lo.open || c.hi.open))) {
                    *conflict = "empty interval for " + r;
                    return false;
                }
                if (*c.lo.value == *c.hi.value && c.excluded.count(*c.lo.value)) {
                    *conflict = r + " is pinned to an excluded value";
                    return false;
                }
            }
        }
        for (const auto& [a, b] : diseqs_) {
            const std::string ra = uf_.find(a), rb = uf_.find(b);
            if (ra == rb) {
                *conflict = a + " and " + b + " are equal yet required distinct";
                return false;
            }
            const Cls& ca = cls(ra);
            const Cls& cb = cls(rb);
            bool a_point = ca.lo.value && ca.hi.value && *ca.lo.value == *ca.hi.value;
            bool b_point = cb.lo.value && cb.hi.value && *cb.lo.value == *cb.hi.value;
            if (a_point && b_point && *ca.lo.value == *cb.lo.value) {
                *conflict = a + " and " + b + " are both pinned to " + ca.lo.value->str();
                return false;
            }
        }
        return true;
    }

    Rational pick_value(const std::string& rep, const std::map<std::string, Rational>& done) {
        Bound lo = cls(rep).lo;
        const Bound& hi = cls(rep).hi;
        std::set<Rational> avoid = cls(rep).excluded;

        // Assigned predecessors raise the effective lower bound; assigned
        // disequality partners become values to dodge.
        for (const auto& [a, b, strict] : edges_) {
            if (uf_.find(b) != rep) continue;
            auto it = done.find(uf_.find(a));
            if (it != done.end()) tighten_lo(lo, it->second, strict);
        }
        for (const auto& [a, b] : diseqs_) {
            std::string ra = uf_.find(a), rb = uf_.find(b);
            if (ra == rep && done.count(rb)) avoid.insert(done.at(rb));
            if (rb == rep && done.count(ra)) avoid.insert(done.at(ra));
        }

        auto admissible = [&](const Rational& v) {
            if (lo.value && (v < *lo.value || (v == *lo.value && lo.open))) return false;
            if (hi.value && (v > *hi.value || (v == *hi.value && hi.open))) return false;
            return !avoid.count(v);
        };

        if (lo.value && hi.value) {
            if (*lo.value == *hi.value) return *lo.value;  // point, never excluded here
            const Rational span = *hi.value - *lo.value;
            const auto steps = static_cast<std::int64_t>(avoid.size()) + 2;
            for (std::int64_t k = 1; k < steps; ++k) {
                Rational v = *lo.value + span * Rational(k, steps);
                if (admissible(v)) return v;
            }
            // Dense order: strictly more candidates than avoided values, so
            // one midpoint always survives unless it collides with a bound.
            for (std::int64_t k = 1; k <= steps; ++k) {
                Rational v = *lo.value + span * Rational(2 * k - 1, 2 * steps);
                if (admissible(v)) return v;
            }
        } else if (lo.value) {
            Rational v = lo.open ? *lo.value + Rational(1) : *lo.value;
            while (!admissible(v)) v = v + Rational(1);
            return v;
        } else if (hi.value) {
            Rational v = hi.open ? *hi.value - Rational(1) : *hi.value;
            while (!admissible(v)) v = v - Rational(1);
            return v;
        } else {
            Rational v(0);
            while (!admissible(v)) v = v + Rational(1);
            return v;
        }
        throw Error("internal: no admissible numeric witness for " + rep);
    }

    UnionFind uf_;
    std::set<std::string> vars_;
    std::map<std::string, Cls> classes_;
    std::vector<std::tuple<std::string, std::string, bool>> edges_;
    std::vector<std::pair<std::string, std::string>> diseqs_;
};

// Equality over text variables: union-find with class constants and
// disequality checking.
class TextEngine {
public:
    bool add(const std::vector<TextLiteral>& literals, std::string* conflict) {
        for (const auto& lit : literals) {
            if (!lit.lhs.is_var) used_consts_.insert(lit.lhs.text);
            if (!lit.rhs.is_var) used_consts_.insert(lit.rhs.text);
            if (lit.lhs.is_var) vars_.insert(lit.lhs.var);
            if (lit.rhs.is_var) vars_.insert(lit.rhs.var);

            if (!lit.lhs.is_var && !lit.rhs.is_var) {
                if ((lit.lhs.text == lit.rhs.text) != lit.equal) {
                    *conflict = "ground text comparison is false";
                    return false;
                }
                continue;
            }
            if (lit.equal) {
                if (lit.lhs.is_var && lit.rhs.is_var) {
                    uf_.merge(lit.lhs.var, lit.rhs.var);
                } else {
                    const auto& var = lit.lhs.is_var ? lit.lhs.var : lit.rhs.var;
                    const auto& text = lit.lhs.is_var ? lit.rhs.text : lit.lhs.text;
                    pinned_.emplace_back(var, text);
                }
            } else {
                if (lit.lhs.is_var && lit.rhs.is_var) {
                    diseq_vv_.emplace_back(lit.lhs.var, lit.rhs.var);
                } else {
                    const auto& var = lit.lhs.is_var ? lit.lhs.var : lit.rhs.var;
                    const auto& text = lit.lhs.is_var ? lit.rhs.text : lit.lhs.text;
                    diseq_vc_.emplace_back(var, text);
                }
            }
        }
        return check(conflict);
    }

    std::map<std::string, std::string> witness() {
        std::map<std::string, std::string> rep_value;
        std::set<std::string> taken = used_consts_;
        std::set<std::string> reps;
        for (const auto& v : vars_) reps.insert(uf_.find(v));
        for (const auto& r : reps) {
            auto it = rep_const_.find(r);
            if (it != rep_const_.end()) {
                rep_value.emplace(r, it->second);
                continue;
            }
            // Fresh distinguished token, distinct from every constant the
            // problem mentions and every token already handed out.
            std::string token = r + "_token";
            while (taken.count(token)) token += "_x";
            taken.insert(token);
            rep_value.emplace(r, token);
        }
        std::map<std::string, std::string> out;
        for (const auto& v : vars_) out.emplace(v, rep_value.at(uf_.find(v)));
        return out;
    }

private:
    bool check(std::string* conflict) {
        rep_const_.clear();
        for (const auto& [var, text] : pinned_) {
            const std::string rep = uf_.find(var);
            auto it = rep_const_.find(rep);
            if (it != rep_const_.end() && it->second != text) {
                *conflict = var + " would need to equal both \"" + it->second +
                            "\" and \"" + text + "\"";
                return false;
            }
            rep_const_.emplace(rep, text);
        }
        for (const auto& [a, b] : diseq_vv_) {
            const std::string ra = uf_.find(a), rb = uf_.find(b);
            if (ra == rb) {
                *conflict = a + " and " + b + " are equal yet required distinct";
                return false;
            }
            auto ia = rep_const_.find(ra);
            auto ib = rep_const_.find(rb);
            if (ia != rep_const_.end() && ib != rep_const_.end() &&
                ia->second == ib->second) {
                *conflict = a + " and " + b + " are both \"" + ia->second + "\"";
                return false;
            }
        }
        for (const auto& [var, text] : diseq_vc_) {
            auto it = rep_const_.find(uf_.find(var));
            if (it != rep_const_.end() && it->second == text) {
                *conflict = var + " equals \"" + text + "\" yet must differ from it";
                return false;
            }
        }
        return true;
    }

    UnionFind uf_;
    std::set<std::string> vars_;
    std::set<std::string> used_consts_;
    std::map<std::string, std::string> rep_const_;
    std::vector<std::pair<std::string, std::string>> pinned_;
    std::vector<std::pair<std::string, std::string>> diseq_vv_;
    std::vector<std::pair<std::string, std::string>> diseq_vc_;
};

// ---------------------------------------------------------------------------
// The propositional search

enum class TV { False, True, Unknown };

// Sort resolution for comparison atoms. Ordered operators are numeric by
// construction; equalities look at constant operands first, then declared
// variable sorts, then the vocabulary. A pure variable equality with no
// evidence behaves identically over any infinite domain, and text is the
// simpler engine.
bool classify_numeric(const ExprPtr& cmp, const Vocabulary& vocab) {
    if (cmp->cmp_op() != CmpOp::Eq && cmp->cmp_op() != CmpOp::Ne) return true;
    for (const ExprPtr& side : {cmp->lhs(), cmp->rhs()}) {
        switch (side->kind()) {
            case Expr::Kind::NumConst:
            case Expr::Kind::FuncApp:
                return true;
            case Expr::Kind::TextConst:
                return false;
            case Expr::Kind::Var: {
                if (side->var_sort() == VarSort::Num) return true;
                if (side->var_sort() == VarSort::Text) return false;
                auto it = vocab.concepts.find(side->label());
                if (it != vocab.concepts.end()) {
                    if (it->second == ValueKind::Numeric) return true;
                    if (it->second == ValueKind::Text) return false;
                }
                break;
            }
            default:
                break;
        }
    }
    return false;
}

// Completes a witness over every variable the items mention, including
// those inside subexpressions the search never had to look at: booleans
// default false, numerics zero, text variables a fresh token.
void top_up_witness(const ExprPtr& e, bool bool_pos, const Vocabulary& vocab,
                    std::map<std::string, GroundValue>& witness) {
    switch (e->kind()) {
        case Expr::Kind::Var:
            if (bool_pos) witness.emplace(e->label(), GroundValue::boolean(false));
            return;
        case Expr::Kind::BoolConst:
        case Expr::Kind::NumConst:
        case Expr::Kind::TextConst:
            return;
        case Expr::Kind::FuncApp:
            for (const auto& a : e->children()) {
                if (a->kind() == Expr::Kind::Var) {
                    witness.emplace(a->label(), GroundValue::number(Rational(0)));
                } else {
                    top_up_witness(a, false, vocab, witness);
                }
            }
            return;
        case Expr::Kind::Cmp: {
            const bool numeric = classify_numeric(e, vocab);
            for (const ExprPtr& side : {e->lhs(), e->rhs()}) {
                if (side->kind() == Expr::Kind::Var) {
                    if (numeric) {
                        witness.emplace(side->label(), GroundValue::number(Rational(0)));
                    } else {
                        witness.emplace(side->label(),
                                        GroundValue::text(side->label() + "_token"));
                    }
                } else {
                    top_up_witness(side, false, vocab, witness);
                }
            }
            return;
        }
        default:
            for (const auto& k : e->children()) top_up_witness(k, true, vocab, witness);
            return;
    }
}

struct AtomInfo {
    ExprPtr expr;
    bool is_bool_var = false;
    bool is_numeric = false;  // comparison over numbers; otherwise text
};

// Items viewed as trees whose leaves are atom indices.
struct NodeView {
    const Expr* e = nullptr;
    int atom = -1;
    std::vector<NodeView> kids;
};

class Solver {
public:
    Solver(const std::vector<ConstraintItem>& items, const Vocabulary& vocab,
           std::vector<std::string>& trace)
        : items_(items), trace_(trace) {
        collect_atoms(vocab);
        assignment_.assign(atoms_.size(), -1);
    }

    bool solve() {
        if (!dpll()) {
            trace_.push_back("result: unsat");
            return false;
        }
        trace_.push_back("result: sat");
        return true;
    }

    std::map<std::string, GroundValue> witness() {
        std::map<std::string, GroundValue> out;

        std::vector<NumericLiteral> num_lits;
        std::vector<TextLiteral> text_lits;
        assigned_literals(&num_lits, &text_lits);
        std::string conflict;

        NumericEngine numerics;
        if (!numerics.add(num_lits, &conflict)) {
            throw Error("internal: numeric witness lost consistency: " + conflict);
        }
        for (const auto& [var, value] : numerics.witness()) {
            out.emplace(var, GroundValue::number(value));
        }
        TextEngine texts;
        if (!texts.add(text_lits, &conflict)) {
            throw Error("internal: text witness lost consistency: " + conflict);
        }
        for (const auto& [var, value] : texts.witness()) {
            out.emplace(var, GroundValue::text(value));
        }

        // Totality: booleans default false, unconstrained numerics take 0,
        // unconstrained text variables take a fresh token.
        for (size_t i = 0; i < atoms_.size(); ++i) {
            if (atoms_[i].is_bool_var) {
                out.emplace(atoms_[i].expr->label(),
                            GroundValue::boolean(assignment_[i] == 1));
            }
        }
        for (const auto& [var, numeric] : theory_vars_) {
            if (out.count(var)) continue;
            if (numeric) {
                out.emplace(var, GroundValue::number(Rational(0)));
            } else {
                out.emplace(var, GroundValue::text(var + "_token"));
            }
        }
        return out;
    }

private:
    void collect_atoms(const Vocabulary& vocab) {
        std::map<std::string, int> index;
        std::vector<ExprPtr> found;
        for (const auto& item : items_) walk_collect(item.expr, &found);
        std::sort(found.begin(), found.end(), [](const ExprPtr& a, const ExprPtr& b) {
            return print(a) < print(b);
        });
        for (const auto& e : found) {
            const std::string key = print(e);
            if (index.count(key)) continue;
            index.emplace(key, static_cast<int>(atoms_.size()));
            AtomInfo info;
            info.expr = e;
            info.is_bool_var = e->kind() == Expr::Kind::Var;
            atoms_.push_back(std::move(info));
        }
        classify_atoms(vocab);
        for (const auto& atom : atoms_) {
            if (atom.is_bool_var) continue;
            for (const ExprPtr& side : {atom.expr->lhs(), atom.expr->rhs()}) {
                register_terms(side, atom.is_numeric);
            }
        }
        for (const auto& item : items_) {
            views_.push_back(build_view(item.expr, index));
        }
    }

    // Global sort inference. A variable's sort is evidenced by any atom it
    // appears in: ordered comparisons and numeric operands mark it numeric,
    // text operands mark it text, and marks flow across variable-variable
    // equalities so every atom over one variable lands in the same theory.
    // Only then does an evidence-free equality default to text.
    void classify_atoms(const Vocabulary& vocab) {
        constexpr int kNum = 1, kText = 2;
        auto intrinsic = [&](const ExprPtr& side) {
            switch (side->kind()) {
                case Expr::Kind::NumConst:
                case Expr::Kind::FuncApp:
                    return kNum;
                case Expr::Kind::TextConst:
                    return kText;
                case Expr::Kind::Var: {
                    if (side->var_sort() == VarSort::Num) return kNum;
                    if (side->var_sort() == VarSort::Text) return kText;
                    auto it = vocab.concepts.find(side->label());
                    if (it != vocab.concepts.end()) {
                        if (it->second == ValueKind::Numeric) return kNum;
                        if (it->second == ValueKind::Text) return kText;
                    }
                    return 0;
                }
                default:
                    return 0;
            }
        };

        std::map<std::string, int> marks;
        for (const auto& atom : atoms_) {
            if (atom.is_bool_var) continue;
            const CmpOp op = atom.expr->cmp_op();
            int evidence = (op != CmpOp::Eq && op != CmpOp::Ne) ? kNum : 0;
            for (const ExprPtr& side : {atom.expr->lhs(), atom.expr->rhs()}) {
                evidence |= intrinsic(side);
            }
            for (const ExprPtr& side : {atom.expr->lhs(), atom.expr->rhs()}) {
                if (side->kind() == Expr::Kind::Var) marks[side->label()] |= evidence;
            }
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& atom : atoms_) {
                if (atom.is_bool_var) continue;
                const ExprPtr& l = atom.expr->lhs();
                const ExprPtr& r = atom.expr->rhs();
                if (l->kind() != Expr::Kind::Var || r->kind() != Expr::Kind::Var) continue;
                const int joined = marks[l->label()] | marks[r->label()];
                if (joined != marks[l->label()] || joined != marks[r->label()]) {
                    marks[l->label()] = joined;
                    marks[r->label()] = joined;
                    changed = true;
                }
            }
        }
        for (const auto& [label, mark] : marks) {
            if (mark == (kNum | kText)) {
                throw TypecheckFailed("variable used as both number and text: " + label);
            }
        }

        for (auto& atom : atoms_) {
            if (atom.is_bool_var) continue;
            const CmpOp op = atom.expr->cmp_op();
            if (op != CmpOp::Eq && op != CmpOp::Ne) {
                atom.is_numeric = true;
                continue;
            }
            int evidence = 0;
            for (const ExprPtr& side : {atom.expr->lhs(), atom.expr->rhs()}) {
                evidence |= intrinsic(side);
                if (side->kind() == Expr::Kind::Var) evidence |= marks[side->label()];
            }
            atom.is_numeric = (evidence & kNum) != 0;
        }
    }

    void register_terms(const ExprPtr& e, bool numeric) {
        if (e->kind() == Expr::Kind::Var) {
            theory_vars_.emplace(e->label(), numeric);
        } else if (e->kind() == Expr::Kind::FuncApp) {
            for (const auto& a : e->children()) register_terms(a, true);
        }
    }

    static void walk_collect(const ExprPtr& e, std::vector<ExprPtr>* found) {
        switch (e->kind()) {
            case Expr::Kind::Var:
            case Expr::Kind::Cmp:
                found->push_back(e);
                return;
            case Expr::Kind::BoolConst:
                return;
            case Expr::Kind::NumConst:
            case Expr::Kind::TextConst:
            case Expr::Kind::FuncApp:
                throw TypecheckFailed("non-boolean node in constraint position: " + print(e));
            default:
                for (const auto& k : e->children()) walk_collect(k, found);
        }
    }

    NodeView build_view(const ExprPtr& e, const std::map<std::string, int>& index) {
        NodeView view;
        view.e = e.get();
        if (e->kind() == Expr::Kind::Var || e->kind() == Expr::Kind::Cmp) {
            view.atom = index.at(print(e));
            return view;
        }
        for (const auto& k : e->children()) view.kids.push_back(build_view(k, index));
        return view;
    }

    TV eval3(const NodeView& node, int probe_atom, int probe_value) const {
        if (node.atom >= 0) {
            int v = node.atom == probe_atom ? probe_value : assignment_[node.atom];
            if (v < 0) return TV::Unknown;
            return v == 1 ? TV::True : TV::False;
        }
        switch (node.e->kind()) {
            case Expr::Kind::BoolConst:
                return node.e->bool_value() ? TV::True : TV::False;
            case Expr::Kind::Not: {
                TV c = eval3(node.kids[0], probe_atom, probe_value);
                if (c == TV::Unknown) return TV::Unknown;
                return c == TV::True ? TV::False : TV::True;
            }
            case Expr::Kind::And: {
                bool unknown = false;
                for (const auto& k : node.kids) {
                    TV c = eval3(k, probe_atom, probe_value);
                    if (c == TV::False) return TV::False;
                    if (c == TV::Unknown) unknown = true;
                }
                return unknown ? TV::Unknown : TV::True;
            }
            case Expr::Kind::Or: {
                bool unknown = false;
                for (const auto& k : node.kids) {
                    TV c = eval3(k, probe_atom, probe_value);
                    if (c == TV::True) return TV::True;
                    if (c == TV::Unknown) unknown = true;
                }
                return unknown ? TV::Unknown : TV::False;
            }
            case Expr::Kind::Implies: {
                TV a = eval3(node.kids[0], probe_atom, probe_value);
                TV c = eval3(node.kids[1], probe_atom, probe_value);
                if (a == TV::False || c == TV::True) return TV::True;
                if (a == TV::True && c == TV::False) return TV::False;
                return TV::Unknown;
            }
            default:
                throw Error("internal: unexpected node in constraint view");
        }
    }

    void atoms_in(const NodeView& node, std::set<int>* out) const {
        if (node.atom >= 0) {
            out->insert(node.atom);
            return;
        }
        for (const auto& k : node.kids) atoms_in(k, out);
    }

    void assign(int atom, int value) {
        assignment_[atom] = value;
        trail_.push_back(atom);
    }

    void undo_to(size_t mark) {
        while (trail_.size() > mark) {
            assignment_[trail_.back()] = -1;
            trail_.pop_back();
        }
    }

    void assigned_literals(std::vector<NumericLiteral>* num_lits,
                           std::vector<TextLiteral>* text_lits) const {
        for (size_t i = 0; i < atoms_.size(); ++i) {
            if (assignment_[i] < 0 || atoms_[i].is_bool_var) continue;
            const ExprPtr& e = atoms_[i].expr;
            CmpOp op = e->cmp_op();
            if (assignment_[i] == 0) op = negate_op(op);
            if (atoms_[i].is_numeric) {
                NumericLiteral lit;
                lit.op = op;
                lit.lhs = to_term(e->lhs());
                lit.rhs = to_term(e->rhs());
                num_lits->push_back(std::move(lit));
            } else {
                TextLiteral lit;
                lit.equal = op == CmpOp::Eq;
                lit.lhs = to_term(e->lhs());
                lit.rhs = to_term(e->rhs());
                text_lits->push_back(std::move(lit));
            }
        }
    }

    static Term to_term(const ExprPtr& e) {
        Term t;
        switch (e->kind()) {
            case Expr::Kind::Var:
                t.is_var = true;
                t.var = e->label();
                return t;
            case Expr::Kind::NumConst:
                t.value = e->num_value();
                return t;
            case Expr::Kind::TextConst:
                t.text = e->text_value();
                return t;
            default:
                throw FragmentExceeded("unsupported comparison operand: " + print(e));
        }
    }

    bool theory_consistent() {
        std::vector<NumericLiteral> num_lits;
        std::vector<TextLiteral> text_lits;
        assigned_literals(&num_lits, &text_lits);
        std::string conflict;
        NumericEngine numerics;
        if (!numerics.add(num_lits, &conflict)) {
            trace_.push_back("theory conflict: " + conflict);
            return false;
        }
        TextEngine texts;
        if (!texts.add(text_lits, &conflict)) {
            trace_.push_back("theory conflict: " + conflict);
            return false;
        }
        return true;
    }

    // Unit propagation via probing: inside an item that must hold, an atom
    // whose flip falsifies the item is forced. Returns false on conflict.
    bool propagate() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t i = 0; i < views_.size(); ++i) {
                TV v = eval3(views_[i], -1, -1);
                if (v == TV::False) {
                    trace_.push_back("conflict: " + items_[i].tag.str() + " falsified");
                    return false;
                }
                if (v == TV::True) continue;
                std::set<int> here;
                atoms_in(views_[i], &here);
                for (int atom : here) {
                    if (assignment_[atom] >= 0) continue;
                    if (eval3(views_[i], atom, 1) == TV::False) {
                        assign(atom, 0);
                        trace_.push_back("propagate " + print(atoms_[atom].expr) +
                                         " = false (from " + items_[i].tag.str() + ")");
                        changed = true;
                    } else if (eval3(views_[i], atom, 0) == TV::False) {
                        assign(atom, 1);
                        trace_.push_back("propagate " + print(atoms_[atom].expr) +
                                         " = true (from " + items_[i].tag.str() + ")");
                        changed = true;
                    }
                }
            }
            if (!theory_consistent()) return false;
        }
        return true;
    }

    bool all_items_true() const {
        for (const auto& view : views_) {
            if (eval3(view, -1, -1) != TV::True) return false;
        }
        return true;
    }

    bool dpll() {
        const size_t mark = trail_.size();
        if (!propagate()) {
            undo_to(mark);
            return false;
        }
        if (all_items_true()) return true;
        int pick = -1;
        for (size_t i = 0; i < atoms_.size(); ++i) {
            if (assignment_[i] < 0) {
                pick = static_cast<int>(i);
                break;
            }
        }
        if (pick < 0) {
            // Every atom assigned yet some item undecided cannot happen.
            throw Error("internal: undecided item with full assignment");
        }
        for (int value : {0, 1}) {
            const size_t branch_mark = trail_.size();
            assign(pick, value);
            trace_.push_back(std::string("decide ") + print(atoms_[pick].expr) + " = " +
                             (value == 1 ? "true" : "false"));
            if (dpll()) return true;
            undo_to(branch_mark);
            trace_.push_back("backtrack");
        }
        undo_to(mark);
        return false;
    }

    const std::vector<ConstraintItem>& items_;
    std::vector<std::string>& trace_;
    std::vector<AtomInfo> atoms_;
    std::vector<NodeView> views_;
    std::vector<int8_t> assignment_;
    std::vector<int> trail_;
    std::map<std::string, bool> theory_vars_;  // label -> numeric?
};

// ---------------------------------------------------------------------------
// Witness self-check: a plain recursive evaluation, kept separate from the
// search so a solver bug cannot vouch for itself.

bool eval_with_witness(const ExprPtr& e, const std::map<std::string, GroundValue>& env,
                       const FunctionTables& tables);

GroundValue eval_value(const ExprPtr& e, const std::map<std::string, GroundValue>& env,
                       const FunctionTables& tables) {
    switch (e->kind()) {
        case Expr::Kind::Var: {
            auto it = env.find(e->label());
            if (it == env.end()) throw Error("internal: witness misses " + e->label());
            return it->second;
        }
        case Expr::Kind::NumConst:
            return GroundValue::number(e->num_value());
        case Expr::Kind::TextConst:
            return GroundValue::text(e->text_value());
        case Expr::Kind::FuncApp: {
            GroundValue arg = eval_value(e->children()[0], env, tables);
            auto table = tables.find(e->label());
            if (table == tables.end()) throw MissingTableEntry(e->label(), arg.str());
            auto row = table->second.find(arg.number_value);
            if (row == table->second.end()) {
                throw MissingTableEntry(e->label(), arg.number_value.str());
            }
            return GroundValue::number(row->second);
        }
        default:
            return GroundValue::boolean(eval_with_witness(e, env, tables));
    }
}

bool eval_with_witness(const ExprPtr& e, const std::map<std::string, GroundValue>& env,
                       const FunctionTables& tables) {
    switch (e->kind()) {
        case Expr::Kind::BoolConst:
            return e->bool_value();
        case Expr::Kind::Var: {
            auto it = env.find(e->label());
            if (it == env.end()) throw Error("internal: witness misses " + e->label());
            return it->second.bool_value;
        }
        case Expr::Kind::Cmp: {
            GroundValue l = eval_value(e->lhs(), env, tables);
            GroundValue r = eval_value(e->rhs(), env, tables);
            if (l.kind == GroundValue::Kind::Number && r.kind == GroundValue::Kind::Number) {
                return eval_ground_cmp(e->cmp_op(), Expr::num_const(l.number_value),
                                       Expr::num_const(r.number_value));
            }
            if (e->cmp_op() == CmpOp::Eq) return l == r;
            if (e->cmp_op() == CmpOp::Ne) return !(l == r);
            throw Error("internal: ordered comparison over non-numbers");
        }
        case Expr::Kind::Not:
            return !eval_with_witness(e->child(), env, tables);
        case Expr::Kind::And:
            for (const auto& k : e->children()) {
                if (!eval_with_witness(k, env, tables)) return false;
            }
            return true;
        case Expr::Kind::Or:
            for (const auto& k : e->children()) {
                if (eval_with_witness(k, env, tables)) return true;
            }
            return false;
        case Expr::Kind::Implies:
            return !eval_with_witness(e->antecedent(), env, tables) ||
                   eval_with_witness(e->consequent(), env, tables);
        default:
            throw Error("internal: non-boolean constraint root");
    }
}

// ---------------------------------------------------------------------------
// Closed-table branching over function applications with unbound arguments

const Expr* find_open_func_app(const ExprPtr& e) {
    switch (e->kind()) {
        case Expr::Kind::FuncApp: {
            for (const auto& a : e->children()) {
                if (const Expr* inner = find_open_func_app(a)) return inner;
            }
            if (e->children().size() == 1 &&
                e->children()[0]->kind() != Expr::Kind::NumConst) {
                return e.get();
            }
            return nullptr;
        }
        case Expr::Kind::Var:
        case Expr::Kind::BoolConst:
        case Expr::Kind::NumConst:
        case Expr::Kind::TextConst:
            return nullptr;
        default:
            for (const auto& k : e->children()) {
                if (const Expr* inner = find_open_func_app(k)) return inner;
            }
            return nullptr;
    }
}

std::vector<ConstraintItem> apply_everywhere(const std::vector<ConstraintItem>& items,
                                             const std::map<std::string, GroundValue>& facts,
                                             const FunctionTables& tables) {
    std::vector<ConstraintItem> out;
    for (const auto& item : items) {
        ExprPtr e = ground_expr(item.expr, facts, tables);
        if (e->kind() == Expr::Kind::BoolConst && e->bool_value()) continue;
        out.push_back({item.tag, e});
    }
    return out;
}

VerificationResult decide_rec(const std::vector<ConstraintItem>& items,
                              const FunctionTables& tables, const Vocabulary& vocab,
                              std::vector<std::string>& trace,
                              std::map<std::string, GroundValue> pseudo_facts,
                              std::int64_t budget) {
    const Expr* open_app = nullptr;
    for (const auto& item : items) {
        open_app = find_open_func_app(item.expr);
        if (open_app) break;
    }
    if (open_app) {
        const ExprPtr& arg = open_app->children()[0];
        if (arg->kind() != Expr::Kind::Var) {
            throw FragmentExceeded("function argument is neither a constant nor a variable: " +
                                   print(arg));
        }
        auto table = tables.find(open_app->label());
        if (table == tables.end()) {
            throw MissingTableEntry(open_app->label(), arg->label());
        }
        const auto rows = static_cast<std::int64_t>(table->second.size());
        if (rows > budget) {
            throw FragmentExceeded("closed-table branching would exceed the budget: " +
                                   open_app->label() + " over " + std::to_string(rows) +
                                   " rows");
        }
        for (const auto& [key, unused] : table->second) {
            trace.push_back("branch " + open_app->label() + "(" + arg->label() +
                            ") = " + key.str());
            std::map<std::string, GroundValue> branch{{arg->label(), GroundValue::number(key)}};
            std::vector<ConstraintItem> narrowed = apply_everywhere(items, branch, tables);
            auto merged = pseudo_facts;
            merged.emplace(arg->label(), GroundValue::number(key));
            VerificationResult sub = decide_rec(narrowed, tables, vocab, trace,
                                                std::move(merged),
                                                rows > 0 ? budget / rows : budget);
            if (sub.status == Status::Sat) return sub;
        }
        trace.push_back("all rows exhausted for " + open_app->label() + "(" + arg->label() +
                        ")");
        VerificationResult out;
        out.status = Status::Unsat;
        return out;
    }

    Solver solver(items, vocab, trace);
    VerificationResult out;
    if (solver.solve()) {
        out.status = Status::Sat;
        out.witness = solver.witness();
        for (const auto& [label, value] : pseudo_facts) out.witness.emplace(label, value);
    } else {
        out.status = Status::Unsat;
    }
    return out;
}

int tag_rank(const ItemTag& tag) {
    switch (tag.kind) {
        case ItemTag::Kind::Fact: return 0;
        case ItemTag::Kind::Rule: return 1;
        case ItemTag::Kind::ExplanationClause: return 2;
        case ItemTag::Kind::Outcome: return 3;
    }
    return 3;
}

std::string tag_sort_key(const ItemTag& tag) {
    switch (tag.kind) {
        case ItemTag::Kind::Fact: return tag.fact_label;
        case ItemTag::Kind::Rule: return tag.citation + "\x1f" + tag.rule_id;
        case ItemTag::Kind::ExplanationClause: {
            std::string digits = std::to_string(tag.clause_index);
            return std::string(digits.size() < 12 ? 12 - digits.size() : 0, '0') + digits;
        }
        case ItemTag::Kind::Outcome: return "";
    }
    return "";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public surface

ItemTag ItemTag::fact(std::string label) {
    ItemTag t;
    t.kind = Kind::Fact;
    t.fact_label = std::move(label);
    return t;
}

ItemTag ItemTag::rule(std::string id, std::string citation) {
    ItemTag t;
    t.kind = Kind::Rule;
    t.rule_id = std::move(id);
    t.citation = std::move(citation);
    return t;
}

ItemTag ItemTag::clause(std::size_t index) {
    ItemTag t;
    t.kind = Kind::ExplanationClause;
    t.clause_index = index;
    return t;
}

ItemTag ItemTag::outcome() {
    ItemTag t;
    t.kind = Kind::Outcome;
    return t;
}

std::string ItemTag::str() const {
    switch (kind) {
        case Kind::Fact: return "fact:" + fact_label;
        case Kind::Rule: return "rule:" + rule_id;
        case Kind::ExplanationClause: return "clause:" + std::to_string(clause_index);
        case Kind::Outcome: return "outcome";
    }
    return "outcome";
}

bool ItemTag::operator==(const ItemTag& o) const {
    return kind == o.kind && rule_id == o.rule_id && citation == o.citation &&
           fact_label == o.fact_label && clause_index == o.clause_index;
}

std::string to_string(Status status) {
    return status == Status::Sat ? "sat" : "unsat";
}

std::vector<ConstraintItem> ground(const std::vector<ConstraintItem>& items,
                                   const std::map<std::string, GroundValue>& facts,
                                   const FunctionTables& tables) {
    std::vector<ConstraintItem> out;
    for (const auto& item : items) {
        // Fact items keep their defining equalities: substituting a fact
        // into itself would erase it from every core.
        if (item.tag.kind == ItemTag::Kind::Fact) {
            out.push_back(item);
            continue;
        }
        ExprPtr e = ground_expr(item.expr, facts, tables);
        if (e->kind() == Expr::Kind::BoolConst && e->bool_value()) continue;
        out.push_back({item.tag, e});
    }
    return out;
}

VerificationResult decide(const std::vector<ConstraintItem>& items,
                          const FunctionTables& tables, const Vocabulary& vocab) {
    std::vector<std::string> trace;
    VerificationResult result =
        decide_rec(items, tables, vocab, trace, {}, 4096);
    result.trace = std::move(trace);
    if (result.status == Status::Sat) {
        for (const auto& item : items) {
            top_up_witness(item.expr, true, vocab, result.witness);
        }
        // Independent replay: the witness must make every input item true
        // under plain two-valued evaluation, or the search has a bug.
        for (const auto& item : items) {
            if (!eval_with_witness(item.expr, result.witness, tables)) {
                throw Error("internal: witness fails " + item.tag.str());
            }
        }
    }
    return result;
}

std::vector<ConstraintItem> minimize_core(const std::vector<ConstraintItem>& items,
                                          const FunctionTables& tables,
                                          const Vocabulary& vocab) {
    std::vector<ConstraintItem> core = items;
    std::stable_sort(core.begin(), core.end(),
                     [](const ConstraintItem& a, const ConstraintItem& b) {
                         int ra = tag_rank(a.tag), rb = tag_rank(b.tag);
                         if (ra != rb) return ra < rb;
                         return tag_sort_key(a.tag) < tag_sort_key(b.tag);
                     });

    auto is_unsat = [&](const std::vector<ConstraintItem>& subset) {
        return decide(ground(subset, facts_of(subset), tables), tables, vocab).status ==
               Status::Unsat;
    };

    if (!is_unsat(core)) {
        throw Error("minimize_core requires an unsatisfiable item set");
    }

    for (size_t i = 0; i < core.size();) {
        std::vector<ConstraintItem> tentative;
        tentative.reserve(core.size() - 1);
        for (size_t j = 0; j < core.size(); ++j) {
            if (j != i) tentative.push_back(core[j]);
        }
        bool removable = false;
        try {
            removable = is_unsat(tentative);
        } catch (const FragmentExceeded&) {
            removable = false;  // keep the item rather than guess
        } catch (const MissingTableEntry&) {
            removable = false;
        }
        if (removable) {
            core = std::move(tentative);
        } else {
            ++i;
        }
    }
    return core;
}

CaseReport verify_case(const CaseRecord& record, const RuleStore& store,
                       const OntologyGraph& onto, SimilarityProvider& provider,
                       FormalizerClient& client, const VerifyOptions& options) {
    CaseReport report;
    report.case_id = record.case_id;
    report.assertions =
        build_assertions(record, onto, provider, client, options.assertion_options);

    std::set<std::string> vocab_labels = assertion_vocabulary(report.assertions);
    for (const RuleRecord& rule : store.retrieve(vocab_labels)) {
        if (rule.modality == Modality::Permission && !options.include_permission_rules) {
            continue;
        }
        report.retrieved.push_back(rule);
    }
    if (report.retrieved.empty()) {
        throw EmptyEnvironment(record.case_id + ": explanation references no known law");
    }

    std::vector<ConstraintItem> items;
    for (const auto& fact : report.assertions.fact_constraints) {
        items.push_back({ItemTag::fact(fact.label), fact.expr});
    }
    for (const RuleRecord& rule : report.retrieved) {
        items.push_back({ItemTag::rule(rule.id, rule.citation), rule.logic});
    }
    for (size_t i = 0; i < report.assertions.explanation_rules.size(); ++i) {
        items.push_back({ItemTag::clause(i), report.assertions.explanation_rules[i].rule});
    }
    items.push_back({ItemTag::outcome(), report.assertions.outcome_assertion});

    const Vocabulary vocab = onto.vocabulary();
    std::vector<ConstraintItem> grounded = ground(items, record.facts, options.tables);
    report.result = decide(grounded, options.tables, vocab);

    if (report.result.status == Status::Unsat) {
        report.result.core = minimize_core(items, options.tables, vocab);
        std::string names;
        for (const auto& item : report.result.core) {
            if (!names.empty()) names += ", ";
            names += item.tag.str();
        }
        report.result.trace.push_back("core: " + names);
        for (const auto& item : report.result.core) {
            ReportEntry entry;
            entry.item = item.tag.str();
            entry.satisfied = false;
            switch (item.tag.kind) {
                case ItemTag::Kind::Rule: {
                    entry.citation = item.tag.citation;
                    const RuleRecord* rule = store.find(item.tag.rule_id);
                    entry.text = rule ? rule->text : print(item.expr);
                    break;
                }
                case ItemTag::Kind::ExplanationClause: {
                    const auto& rules = report.assertions.explanation_rules;
                    entry.text = item.tag.clause_index < rules.size()
                                     ? rules[item.tag.clause_index].span.text
                                     : print(item.expr);
                    break;
                }
                default:
                    entry.text = print(item.expr);
            }
            report.entries.push_back(std::move(entry));
        }
    } else {
        for (const RuleRecord& rule : report.retrieved) {
            ReportEntry entry;
            entry.item = "rule:" + rule.id;
            entry.citation = rule.citation;
            entry.text = rule.text;
            entry.satisfied = true;
            report.entries.push_back(std::move(entry));
        }
    }
    return report;
}

std::string result_to_json(const CaseReport& report) {
    nlohmann::json doc;
    doc["case_id"] = report.case_id;
    doc["status"] = to_string(report.result.status);
    if (report.result.status == Status::Sat) {
        nlohmann::json witness(nlohmann::json::value_t::object);
        for (const auto& [label, value] : report.result.witness) {
            switch (value.kind) {
                case GroundValue::Kind::Boolean: witness[label] = value.bool_value; break;
                case GroundValue::Kind::Number: witness[label] = value.number_value.str(); break;
                case GroundValue::Kind::Text: witness[label] = value.text_value; break;
            }
        }
        doc["witness"] = std::move(witness);
    } else {
        nlohmann::json core(nlohmann::json::value_t::array);
        for (const auto& entry : report.entries) {
            core.push_back(nlohmann::json{{"tag", entry.item},
                                          {"citation", entry.citation},
                                          {"rule_text", entry.text}});
        }
        doc["core"] = std::move(core);
    }
    doc["trace"] = report.result.trace;
    return doc.dump(2);
}

namespace {

std::set<std::string> violated_rule_ids(const CaseReport& report) {
    std::set<std::string> out;
    for (const auto& item : report.result.core) {
        if (item.tag.kind == ItemTag::Kind::Rule) out.insert(item.tag.rule_id);
    }
    return out;
}

}  // namespace

std::string violation_graph_dot(const CaseReport& report) {
    const std::set<std::string> violated = violated_rule_ids(report);
    std::ostringstream out;
    out << "digraph violation_trace {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=box, style=filled];\n";
    out << "  \"case\" [label=\"" << report.case_id << "\", fillcolor=lightgrey];\n";
    for (const RuleRecord& rule : report.retrieved) {
        const bool bad = violated.count(rule.id) > 0;
        out << "  \"" << rule.id << "\" [label=\"" << rule.id << "\\n" << rule.citation
            << "\", fillcolor=" << (bad ? "indianred" : "palegreen") << "];\n";
    }
    for (const RuleRecord& rule : report.retrieved) {
        out << "  \"case\" -> \"" << rule.id << "\";\n";
    }
    out << "}\n";
    return out.str();
}

std::string violation_graph_graphml(const CaseReport& report) {
    const std::set<std::string> violated = violated_rule_ids(report);
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
    out << "  <key id=\"citation\" for=\"node\" attr.name=\"citation\" attr.type=\"string\"/>\n";
    out << "  <key id=\"status\" for=\"node\" attr.name=\"status\" attr.type=\"string\"/>\n";
    out << "  <graph id=\"" << xml_escape(report.case_id) << "\" edgedefault=\"directed\">\n";
    out << "    <node id=\"case\"><data key=\"status\">case</data></node>\n";
    for (const RuleRecord& rule : report.retrieved) {
        const bool bad = violated.count(rule.id) > 0;
        out << "    <node id=\"" << xml_escape(rule.id) << "\"><data key=\"citation\">"
            << xml_escape(rule.citation) << "</data><data key=\"status\">"
            << (bad ? "violated" : "satisfied") << "</data></node>\n";
    }
    for (const RuleRecord& rule : report.retrieved) {
        out << "    <edge source=\"case\" target=\"" << xml_escape(rule.id) << "\"/>\n";
    }
    out << "  </graph>\n";
    out << "</graphml>\n";
    return out.str();
}

}  // namespace lexverify
