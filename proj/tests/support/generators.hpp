// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded random generators for property tests. All randomness flows through
// an explicit mt19937 so failures replay exactly.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "lexverify/logic.hpp"
#include "lexverify/rational.hpp"

namespace lexverify::testing {

struct GenConfig {
    std::vector<std::string> bool_vars{"P", "Q", "R", "S"};
    std::vector<std::string> num_vars{"X", "Y", "Z"};
    std::vector<std::string> text_vars{"County", "State"};
    std::vector<std::string> text_consts{"Alameda", "Fresno", "Kern"};
    std::vector<Rational> num_consts{Rational(0), Rational(1), Rational(2)};
    int max_depth = 4;
    bool allow_text = true;
};

inline ExprPtr gen_bool_expr(std::mt19937& rng, const GenConfig& cfg, int depth = 0);

inline int pick(std::mt19937& rng, int n) {
    return static_cast<int>(rng() % static_cast<unsigned>(n));
}

inline ExprPtr gen_num_term(std::mt19937& rng, const GenConfig& cfg) {
    if (pick(rng, 2) == 0) {
        return Expr::var(cfg.num_vars[pick(rng, static_cast<int>(cfg.num_vars.size()))],
                         VarSort::Num);
    }
    return Expr::num_const(cfg.num_consts[pick(rng, static_cast<int>(cfg.num_consts.size()))]);
}

inline ExprPtr gen_atom(std::mt19937& rng, const GenConfig& cfg) {
    int what = pick(rng, cfg.allow_text ? 4 : 3);
    switch (what) {
        case 0:
            return Expr::var(cfg.bool_vars[pick(rng, static_cast<int>(cfg.bool_vars.size()))],
                             VarSort::Bool);
        case 1:
            return Expr::bool_const(pick(rng, 2) == 0);
        case 2: {
            CmpOp ops[] = {CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq, CmpOp::Ne};
            return Expr::cmp(ops[pick(rng, 6)], gen_num_term(rng, cfg), gen_num_term(rng, cfg));
        }
        default: {
            ExprPtr lhs = Expr::var(
                cfg.text_vars[pick(rng, static_cast<int>(cfg.text_vars.size()))], VarSort::Text);
            ExprPtr rhs;
            if (pick(rng, 2) == 0) {
                rhs = Expr::text_const(
                    cfg.text_consts[pick(rng, static_cast<int>(cfg.text_consts.size()))]);
            } else {
                rhs = Expr::var(cfg.text_vars[pick(rng, static_cast<int>(cfg.text_vars.size()))],
                                VarSort::Text);
            }
            return Expr::cmp(pick(rng, 2) == 0 ? CmpOp::Eq : CmpOp::Ne, lhs, rhs);
        }
    }
}

inline ExprPtr gen_bool_expr(std::mt19937& rng, const GenConfig& cfg, int depth) {
    if (depth >= cfg.max_depth || pick(rng, 3) == 0) {
        return gen_atom(rng, cfg);
    }
    switch (pick(rng, 4)) {
        case 0:
            return Expr::negate(gen_bool_expr(rng, cfg, depth + 1));
        case 1: {
            std::vector<ExprPtr> kids;
            int n = 2 + pick(rng, 2);
            for (int i = 0; i < n; ++i) kids.push_back(gen_bool_expr(rng, cfg, depth + 1));
            return Expr::conj(std::move(kids));
        }
        case 2: {
            std::vector<ExprPtr> kids;
            int n = 2 + pick(rng, 2);
            for (int i = 0; i < n; ++i) kids.push_back(gen_bool_expr(rng, cfg, depth + 1));
            return Expr::disj(std::move(kids));
        }
        default:
            return Expr::implies(gen_bool_expr(rng, cfg, depth + 1),
                                 gen_bool_expr(rng, cfg, depth + 1));
    }
}

}  // namespace lexverify::testing
