// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lexverify/abox.hpp"
#include "lexverify/logic.hpp"
#include "lexverify/ontology.hpp"
#include "lexverify/rational.hpp"
#include "lexverify/rulestore.hpp"
#include "lexverify/similarity.hpp"

namespace lexverify {

// Identifies one constraint within a verification run. Rules carry their
// citation so cores map back to statutes.
struct ItemTag {
    enum class Kind { Fact, Rule, ExplanationClause, Outcome };

    Kind kind = Kind::Outcome;
    std::string rule_id;       // Rule only
    std::string citation;      // Rule only
    std::string fact_label;    // Fact only
    std::size_t clause_index = 0;  // ExplanationClause only

    static ItemTag fact(std::string label);
    static ItemTag rule(std::string id, std::string citation);
    static ItemTag clause(std::size_t index);
    static ItemTag outcome();

    // Stable printable identity, e.g. "fact:GrossIncome", "rule:R1",
    // "clause:0", "outcome".
    std::string str() const;

    bool operator==(const ItemTag& o) const;
};

struct ConstraintItem {
    ItemTag tag;
    ExprPtr expr;
};

// Registered function tables, e.g. FPL: household size -> income limit.
using FunctionTables = std::map<std::string, std::map<Rational, Rational>>;

enum class Status { Sat, Unsat };
std::string to_string(Status status);

struct VerificationResult {
    Status status = Status::Sat;
    // Present iff SAT: a total assignment over the free symbols of the
    // solved items; every constraint evaluates to true under it.
    std::map<std::string, GroundValue> witness;
    // Present iff UNSAT: subset-minimal conflicting items in deterministic
    // order (facts, rules, clauses, outcome).
    std::vector<ConstraintItem> core;
    // Ordered log of decisions, propagations, and theory events.
    std::vector<std::string> trace;
};

// Substitutes fact values into non-fact items, evaluates function
// applications that became ground, and folds constants. Items reducing to
// true are dropped; items reducing to false stay as falsified items. Fact
// items keep their defining equalities so cores can name them.
std::vector<ConstraintItem> ground(const std::vector<ConstraintItem>& items,
                                   const std::map<std::string, GroundValue>& facts,
                                   const FunctionTables& tables = {});

// Decides satisfiability of the conjunction. Atoms branch in printed-form
// order, false first; equality over text runs on a union-find, numeric
// atoms on exact rational intervals with variable-to-variable edges. The
// vocabulary resolves the sort of equality atoms whose operands are bare
// variables; unresolved ones default to text. Does not minimize cores.
VerificationResult decide(const std::vector<ConstraintItem>& items,
                          const FunctionTables& tables = {},
                          const Vocabulary& vocab = {});

// Deletion-based minimization over the original (pre-ground) items: walks
// them in deterministic order and drops any item whose removal keeps the
// set unsatisfiable. Facts removed from a candidate subset stop grounding
// the remaining items, so cores honestly name the facts they rely on.
// Pre: the items (grounded with their own facts) are UNSAT.
std::vector<ConstraintItem> minimize_core(const std::vector<ConstraintItem>& items,
                                          const FunctionTables& tables = {},
                                          const Vocabulary& vocab = {});

struct VerifyOptions {
    FunctionTables tables;
    AssertionOptions assertion_options;
    bool include_permission_rules = false;
};

// One line of the citation report: a core item on UNSAT, a satisfied rule
// on SAT.
struct ReportEntry {
    std::string item;      // ItemTag::str form
    std::string citation;  // empty unless the item is a rule
    std::string text;      // statute text, clause text, or constraint print
    bool satisfied = false;
};

struct CaseReport {
    std::string case_id;
    VerificationResult result;
    std::vector<ReportEntry> entries;
    std::vector<RuleRecord> retrieved;
    AssertionSet assertions;
};

// End-to-end pipeline: build assertions, retrieve statutes by assertion
// vocabulary, ground with the case facts, decide, and on UNSAT minimize
// the core. Throws EmptyEnvironment when retrieval finds no rule.
CaseReport verify_case(const CaseRecord& record, const RuleStore& store,
                       const OntologyGraph& onto, SimilarityProvider& provider,
                       FormalizerClient& client, const VerifyOptions& options = {});

// Audit artifact: {case_id, status, witness?, core?, trace}.
std::string result_to_json(const CaseReport& report);

// Violation-trace graph: retrieved rules as nodes, colored by whether the
// rule appears in the unsatisfiable core.
std::string violation_graph_dot(const CaseReport& report);
std::string violation_graph_graphml(const CaseReport& report);

}  // namespace lexverify
