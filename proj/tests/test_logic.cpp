// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#include "lexverify/logic.hpp"

#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "lexverify/errors.hpp"
#include "support/generators.hpp"
#include "support/oracle_eval.hpp"

using namespace lexverify;
using lexverify::testing::GenConfig;
using lexverify::testing::OracleAssignment;
using lexverify::testing::OracleValue;
using lexverify::testing::gen_bool_expr;
using lexverify::testing::oracle_truth;

namespace {

// Independent structural comparison, kept separate from the library's own
// equality so round-trip checks do not trust the code under test.
bool same_shape(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case Expr::Kind::Var:
            return a->label() == b->label();
        case Expr::Kind::BoolConst:
            return a->bool_value() == b->bool_value();
        case Expr::Kind::NumConst:
            return a->num_value() == b->num_value();
        case Expr::Kind::TextConst:
            return a->text_value() == b->text_value();
        case Expr::Kind::FuncApp:
            if (a->label() != b->label()) return false;
            break;
        case Expr::Kind::Cmp:
            if (a->cmp_op() != b->cmp_op()) return false;
            break;
        default:
            break;
    }
    if (a->children().size() != b->children().size()) return false;
    for (std::size_t i = 0; i < a->children().size(); ++i) {
        if (!same_shape(a->children()[i], b->children()[i])) return false;
    }
    return true;
}

void collect_symbols(const ExprPtr& e, std::set<std::string>& out) {
    if (e->kind() == Expr::Kind::Var || e->kind() == Expr::Kind::FuncApp) out.insert(e->label());
    for (const auto& k : e->children()) collect_symbols(k, out);
}

Vocabulary case_vocab() {
    Vocabulary v;
    v.concepts = {
        {"Applicant_Eligible", ValueKind::Boolean},
        {"GrossIncome", ValueKind::Numeric},
        {"IncomeThreshold", ValueKind::Numeric},
        {"Age", ValueKind::Numeric},
        {"HasDisabilityStatus", ValueKind::Boolean},
        {"Residency_HouseholdLocation", ValueKind::Boolean},
        {"Residency_ApplicationCounty", ValueKind::Boolean},
        {"Applicant_ResidenceCounty", ValueKind::Text},
        {"Applicant_ApplicationCounty", ValueKind::Text},
        {"HouseholdSize", ValueKind::Numeric},
        {"County", ValueKind::Text},
    };
    v.functions = {"FPL"};
    return v;
}

}  // namespace

TEST_CASE("parse builds the income rule structure") {
    ExprPtr e = parse("Implies(GrossIncome > IncomeThreshold, Not(Applicant_Eligible))");
    REQUIRE(e->kind() == Expr::Kind::Implies);
    const ExprPtr& ant = e->antecedent();
    REQUIRE(ant->kind() == Expr::Kind::Cmp);
    CHECK(ant->cmp_op() == CmpOp::Gt);
    CHECK(ant->lhs()->label() == "GrossIncome");
    CHECK(ant->lhs()->var_sort() == VarSort::Num);
    CHECK(ant->rhs()->label() == "IncomeThreshold");
    const ExprPtr& con = e->consequent();
    REQUIRE(con->kind() == Expr::Kind::Not);
    CHECK(con->child()->kind() == Expr::Kind::Var);
    CHECK(con->child()->label() == "Applicant_Eligible");
    CHECK(con->child()->var_sort() == VarSort::Bool);
}

TEST_CASE("parse preserves double negation for canonicalize to handle") {
    ExprPtr e = parse("Not(Not(X))");
    REQUIRE(e->kind() == Expr::Kind::Not);
    REQUIRE(e->child()->kind() == Expr::Kind::Not);
    CHECK(e->child()->child()->kind() == Expr::Kind::Var);
    CHECK(e->child()->child()->label() == "X");
}

TEST_CASE("parse handles disjunction with mixed atom kinds") {
    ExprPtr e = parse("Implies(Or(Age >= 60, HasDisabilityStatus), Applicant_Eligible)");
    REQUIRE(e->kind() == Expr::Kind::Implies);
    const ExprPtr& ant = e->antecedent();
    REQUIRE(ant->kind() == Expr::Kind::Or);
    REQUIRE(ant->children().size() == 2);
    const ExprPtr& cmp = ant->children()[0];
    REQUIRE(cmp->kind() == Expr::Kind::Cmp);
    CHECK(cmp->cmp_op() == CmpOp::Ge);
    CHECK(cmp->lhs()->label() == "Age");
    CHECK(cmp->rhs()->num_value() == Rational(60));
    CHECK(ant->children()[1]->label() == "HasDisabilityStatus");
    CHECK(ant->children()[1]->var_sort() == VarSort::Bool);
}

TEST_CASE("Equals keyword and both equality spellings parse to one node") {
    ExprPtr a = parse("Equals(Applicant_ResidenceCounty, Applicant_ApplicationCounty)");
    ExprPtr b = parse("Applicant_ResidenceCounty = Applicant_ApplicationCounty");
    ExprPtr c = parse("Applicant_ResidenceCounty == Applicant_ApplicationCounty");
    CHECK(same_shape(a, b));
    CHECK(same_shape(b, c));
    REQUIRE(a->kind() == Expr::Kind::Cmp);
    CHECK(a->cmp_op() == CmpOp::Eq);
}

TEST_CASE("parse is whitespace and newline insensitive") {
    ExprPtr compact = parse("Implies(And(A,B),C)");
    ExprPtr spread = parse("Implies(\n  And( A ,\tB ) ,\n  C\n)");
    CHECK(same_shape(compact, spread));
}

TEST_CASE("parse accepts decimal literals, fractions, and the unicode disequality") {
    ExprPtr e = parse("GrossIncome = 2015.13");
    CHECK(e->rhs()->num_value() == Rational(201513, 100));
    ExprPtr f = parse("X != Y");
    ExprPtr g = parse("X \xE2\x89\xA0 Y");
    CHECK(same_shape(f, g));
    ExprPtr h = parse("X > -1.5");
    CHECK(h->rhs()->num_value() == Rational(-3, 2));
}

TEST_CASE("parse reports syntax errors with location") {
    try {
        parse("Implies(A,");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& err) {
        CHECK(err.position == 10);
        CHECK(!err.expected_tokens.empty());
    }
    CHECK_THROWS_AS(parse(""), SyntaxError);
    CHECK_THROWS_AS(parse("And(A, B) extra"), SyntaxError);
    CHECK_THROWS_AS(parse("A > > B"), SyntaxError);
    CHECK_THROWS_AS(parse("Not(A) = B"), SyntaxError);
}

TEST_CASE("parse reports arity errors for under-applied operators") {
    try {
        parse("And(X)");
        FAIL("expected ArityError");
    } catch (const ArityError& err) {
        CHECK(err.op_name == "And");
        CHECK(err.arity == 1);
    }
    CHECK_THROWS_AS(parse("Or(X)"), ArityError);
    CHECK_THROWS_AS(parse("Not(X, Y)"), ArityError);
    CHECK_THROWS_AS(parse("Implies(X)"), ArityError);
    CHECK_THROWS_AS(parse("Implies(X, Y, Z)"), ArityError);
}

TEST_CASE("print emits the canonical surface syntax") {
    CHECK(print(Expr::negate(Expr::var("X", VarSort::Bool))) == "Not(X)");
    const std::string residency =
        "Implies(And(Residency_HouseholdLocation, Residency_ApplicationCounty), "
        "Applicant_Eligible)";
    CHECK(print(parse(residency)) == residency);
    const std::string income = "Implies(GrossIncome > IncomeThreshold, Not(Applicant_Eligible))";
    CHECK(print(parse(income)) == income);
    CHECK(print(parse("X != Y")) == "X != Y");
    CHECK(print(parse("Name = \"Alameda\"")) == "Name = \"Alameda\"");
    CHECK(print(parse("GrossIncome <= FPL(HouseholdSize)")) == "GrossIncome <= FPL(HouseholdSize)");
}

TEST_CASE("parse after print round-trips 500 random ASTs") {
    std::mt19937 rng(94103);
    GenConfig cfg;
    for (int i = 0; i < 500; ++i) {
        ExprPtr e = gen_bool_expr(rng, cfg);
        ExprPtr back = parse(print(e));
        CHECK(same_shape(e, back));
    }
}

TEST_CASE("typecheck accepts the residency rule under the case vocabulary") {
    ExprPtr e = parse(
        "Implies(And(Residency_HouseholdLocation, Residency_ApplicationCounty), "
        "Applicant_Eligible)");
    CHECK_FALSE(typecheck(e, case_vocab()).has_value());
}

TEST_CASE("typecheck accepts table lookups with numeric arguments") {
    ExprPtr e = parse("Implies(GrossIncome <= FPL(HouseholdSize), Applicant_Eligible)");
    CHECK_FALSE(typecheck(e, case_vocab()).has_value());
}

TEST_CASE("typecheck rejects sort clashes in comparisons") {
    ExprPtr e = Expr::cmp(CmpOp::Gt, Expr::var("County", VarSort::Text),
                          Expr::num_const(Rational(3)));
    auto err = typecheck(Expr::implies(e, Expr::var("Applicant_Eligible", VarSort::Bool)),
                         case_vocab());
    REQUIRE(err.has_value());
    CHECK(err->kind == TypecheckError::Kind::KindMismatch);
}

TEST_CASE("typecheck rejects ordered comparisons between text values") {
    ExprPtr e = Expr::cmp(CmpOp::Lt, Expr::var("County", VarSort::Text),
                          Expr::text_const("Alameda"));
    auto err = typecheck(e, case_vocab());
    REQUIRE(err.has_value());
    CHECK(err->kind == TypecheckError::Kind::KindMismatch);
}

TEST_CASE("typecheck reports vocabulary misses by symbol") {
    ExprPtr e = parse("Implies(HouseholdIncomeX > IncomeThreshold, Not(Applicant_Eligible))");
    auto err = typecheck(e, case_vocab());
    REQUIRE(err.has_value());
    CHECK(err->kind == TypecheckError::Kind::UnknownSymbol);
    CHECK(err->symbol == "HouseholdIncomeX");
}

TEST_CASE("typecheck rejects unregistered functions and non-numeric table arguments") {
    auto err = typecheck(parse("GrossIncome <= Cap(HouseholdSize)"), case_vocab());
    REQUIRE(err.has_value());
    CHECK(err->kind == TypecheckError::Kind::UnknownSymbol);
    CHECK(err->symbol == "Cap");

    auto err2 = typecheck(parse("GrossIncome <= FPL(County)"), case_vocab());
    REQUIRE(err2.has_value());
    CHECK(err2->kind == TypecheckError::Kind::KindMismatch);
}

TEST_CASE("typecheck flags non-boolean roots") {
    auto err = typecheck(parse("GrossIncome"), case_vocab());
    REQUIRE(err.has_value());
    // A bare identifier reads as a claim, so the miss is on its kind.
    CHECK(err->kind == TypecheckError::Kind::KindMismatch);

    auto err2 = typecheck(Expr::var("GrossIncome", VarSort::Num), case_vocab());
    REQUIRE(err2.has_value());
    CHECK(err2->kind == TypecheckError::Kind::NonBooleanRoot);
}

TEST_CASE("typecheck is monotone under vocabulary growth") {
    std::mt19937 rng(77);
    GenConfig cfg;
    Vocabulary small;
    small.concepts = {{"P", ValueKind::Boolean}, {"Q", ValueKind::Boolean},
                      {"R", ValueKind::Boolean}, {"S", ValueKind::Boolean},
                      {"X", ValueKind::Numeric}, {"Y", ValueKind::Numeric},
                      {"Z", ValueKind::Numeric}, {"County", ValueKind::Text},
                      {"State", ValueKind::Text}};
    Vocabulary big = small;
    big.concepts["Extra"] = ValueKind::Numeric;
    big.concepts["Flag"] = ValueKind::Boolean;
    big.functions.insert("FPL");
    for (int i = 0; i < 200; ++i) {
        ExprPtr e = gen_bool_expr(rng, cfg);
        if (!typecheck(e, small).has_value()) {
            CHECK_FALSE(typecheck(e, big).has_value());
        }
    }
}

TEST_CASE("canonicalize sorts connective children by printed form") {
    ExprPtr e = canonicalize(parse("And(B, A)"));
    CHECK(print(e) == "And(A, B)");
    ExprPtr f = canonicalize(parse("Or(C, A, B)"));
    CHECK(print(f) == "Or(A, B, C)");
}

TEST_CASE("canonicalize eliminates double negation") {
    ExprPtr e = canonicalize(parse("Not(Not(Applicant_Eligible))"));
    REQUIRE(e->kind() == Expr::Kind::Var);
    CHECK(e->label() == "Applicant_Eligible");
}

TEST_CASE("canonicalize rewrites disequality and folds ground comparisons") {
    CHECK(print(canonicalize(parse("X != Y"))) == "Not(X = Y)");
    CHECK(print(canonicalize(parse("3 > 2"))) == "true");
    CHECK(print(canonicalize(parse("3 != 3"))) == "false");
    CHECK(print(canonicalize(parse("\"Alameda\" = \"Fresno\""))) == "false");
}

TEST_CASE("canonicalize orients comparisons with the variable first") {
    CHECK(print(canonicalize(parse("5 < GrossIncome"))) == "GrossIncome > 5");
    CHECK(print(canonicalize(parse("1800 = GrossIncome"))) == "GrossIncome = 1800");
    CHECK(print(canonicalize(parse("2694.00 >= FPL(HouseholdSize)"))) ==
          "FPL(HouseholdSize) <= 2694");
}

TEST_CASE("canonicalize flattens nested connectives") {
    ExprPtr e = canonicalize(parse("And(And(A, B), C)"));
    REQUIRE(e->kind() == Expr::Kind::And);
    CHECK(e->children().size() == 3);
    CHECK(print(e) == "And(A, B, C)");
    ExprPtr f = canonicalize(parse("Or(A, Or(B, Or(C, D)))"));
    CHECK(print(f) == "Or(A, B, C, D)");
}

TEST_CASE("canonicalize keeps implication shape") {
    ExprPtr e = canonicalize(parse("Implies(A, B)"));
    CHECK(e->kind() == Expr::Kind::Implies);
    CHECK(print(e) == "Implies(A, B)");
}

TEST_CASE("equivalent county-mismatch assertions normalize to one AST") {
    Vocabulary vocab;
    vocab.concepts = {{"Applicant_ResidenceCounty", ValueKind::Text},
                      {"Applicant_ApplicationCounty", ValueKind::Text}};
    const std::vector<std::string> variants = {
        "ResidenceCounty(Applicant) = ApplicationCounty(Applicant)",
        "Equals(ResidenceCounty(Applicant), ApplicationCounty(Applicant))",
        "ResidenceCounty(Applicant) == ApplicationCounty(Applicant)",
        "Not(Not(ResidenceCounty(Applicant) = ApplicationCounty(Applicant)))",
        "Equals( ResidenceCounty( Applicant ),\n ApplicationCounty( Applicant ) )",
    };
    std::vector<ExprPtr> normalized;
    for (const auto& text : variants) {
        normalized.push_back(canonicalize(rewrite_applied_vars(parse(text), vocab)));
    }
    for (std::size_t i = 1; i < normalized.size(); ++i) {
        CHECK(same_shape(normalized[0], normalized[i]));
    }
    CHECK(print(normalized[0]) ==
          "Applicant_ResidenceCounty = Applicant_ApplicationCounty");
}

TEST_CASE("canonicalize is idempotent on 500 random ASTs") {
    std::mt19937 rng(271828);
    GenConfig cfg;
    for (int i = 0; i < 500; ++i) {
        ExprPtr e = gen_bool_expr(rng, cfg);
        ExprPtr once = canonicalize(e);
        ExprPtr twice = canonicalize(once);
        CHECK(same_shape(once, twice));
    }
}

TEST_CASE("canonicalize preserves semantics under ground assignments") {
    std::mt19937 rng(161803);
    GenConfig cfg;
    cfg.bool_vars = {"P", "Q"};
    cfg.num_vars = {"X", "Y"};
    cfg.text_vars = {"County"};
    cfg.text_consts = {"Alameda", "Fresno"};
    cfg.max_depth = 3;
    const std::vector<Rational> grid = {Rational(-1), Rational(0), Rational(1, 2), Rational(1),
                                        Rational(2)};
    const std::vector<std::string> texts = {"Alameda", "Fresno", "Kern"};
    for (int i = 0; i < 200; ++i) {
        ExprPtr e = gen_bool_expr(rng, cfg);
        ExprPtr c = canonicalize(e);
        for (int pb = 0; pb < 4; ++pb) {
            for (const Rational& xv : grid) {
                for (const Rational& yv : grid) {
                    for (const std::string& tv : texts) {
                        OracleAssignment env = {
                            {"P", OracleValue::of((pb & 1) != 0)},
                            {"Q", OracleValue::of((pb & 2) != 0)},
                            {"X", OracleValue::of(xv)},
                            {"Y", OracleValue::of(yv)},
                            {"County", OracleValue::of(tv)},
                        };
                        REQUIRE(oracle_truth(e, env) == oracle_truth(c, env));
                    }
                }
            }
        }
    }
}

TEST_CASE("free_symbols lists variables and table names") {
    CHECK(free_symbols(Expr::var("X", VarSort::Bool)) == std::set<std::string>{"X"});
    ExprPtr income = parse("Implies(GrossIncome > IncomeThreshold, Not(Applicant_Eligible))");
    CHECK(free_symbols(income) ==
          std::set<std::string>{"GrossIncome", "IncomeThreshold", "Applicant_Eligible"});
    ExprPtr fpl = parse("Implies(GrossIncome <= FPL(HouseholdSize), Applicant_Eligible)");
    CHECK(free_symbols(fpl) == std::set<std::string>{"GrossIncome", "FPL", "HouseholdSize",
                                                     "Applicant_Eligible"});
}

TEST_CASE("free_symbols agrees with an exhaustive walk on random ASTs") {
    std::mt19937 rng(31415);
    GenConfig cfg;
    for (int i = 0; i < 300; ++i) {
        ExprPtr e = gen_bool_expr(rng, cfg);
        std::set<std::string> expected;
        collect_symbols(e, expected);
        CHECK(free_symbols(e) == expected);
    }
}

TEST_CASE("applied-form sugar rewrites to flat variables when the flat name exists") {
    Vocabulary vocab;
    vocab.concepts = {{"Applicant_ResidenceCounty", ValueKind::Text},
                      {"Applicant_ApplicationCounty", ValueKind::Text},
                      {"GrossIncome", ValueKind::Numeric},
                      {"HouseholdSize", ValueKind::Numeric},
                      {"Applicant_Eligible", ValueKind::Boolean}};
    vocab.functions = {"FPL"};

    ExprPtr e = rewrite_applied_vars(parse("ResidenceCounty(Applicant) = \"Fresno\""), vocab);
    REQUIRE(e->kind() == Expr::Kind::Cmp);
    CHECK(e->lhs()->kind() == Expr::Kind::Var);
    CHECK(e->lhs()->label() == "Applicant_ResidenceCounty");

    // Registered tables are not sugar; they stay applied.
    ExprPtr f = rewrite_applied_vars(parse("GrossIncome <= FPL(HouseholdSize)"), vocab);
    CHECK(print(f) == "GrossIncome <= FPL(HouseholdSize)");

    // Unknown applied forms without a flat counterpart stay put for typecheck to flag.
    ExprPtr g = rewrite_applied_vars(parse("Quux(Applicant) = \"x\""), vocab);
    CHECK(g->lhs()->kind() == Expr::Kind::FuncApp);
}

TEST_CASE("structural equality ignores parse-time sort annotations") {
    ExprPtr a = Expr::cmp(CmpOp::Eq, Expr::var("A", VarSort::Text), Expr::var("B", VarSort::Text));
    ExprPtr b = parse("A = B");
    CHECK(structurally_equal(a, b));
    CHECK_FALSE(structurally_equal(parse("A = B"), parse("A = C")));
    CHECK_FALSE(structurally_equal(parse("A > 1"), parse("A >= 1")));
}
