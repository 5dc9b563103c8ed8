// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexverify/extraction.hpp"
#include "lexverify/logic.hpp"
#include "lexverify/ontology.hpp"
#include "lexverify/similarity.hpp"

namespace lexverify {

enum class Legality { Upheld, Overturned };

std::string to_string(Legality legality);
std::optional<Legality> legality_from_string(const std::string& text);

// Adjudicated outcome of a case, when one is on record.
struct GroundTruth {
    Legality legality = Legality::Upheld;
    std::vector<std::string> violated_citations;  // normalized form
};

struct CaseRecord {
    std::string case_id;
    std::string category;  // optional grouping key, empty if absent
    std::string action;    // denial, termination, reduction, or approval
    std::map<std::string, GroundValue> facts;
    std::string explanation;
    std::optional<GroundTruth> ground_truth;
    // True when the record claims an upheld action yet lists violated
    // citations. Kept loadable so evaluation can count it, not hide it.
    bool ground_truth_inconsistent = false;
};

// Parses a case record and checks every fact against the ontology
// vocabulary. Throws MalformedCase or FactKindMismatch.
CaseRecord load_case(const std::string& json_text, const Vocabulary& vocab);
CaseRecord load_case_file(const std::string& path, const Vocabulary& vocab);

// One ground equality (or bare boolean literal) per case fact.
struct FactConstraint {
    std::string label;
    ExprPtr expr;
};

// One formalized claim per mappable explanation clause.
struct ExplanationRule {
    ExprPtr rule;
    ClauseSpan span;
};

struct AssertionSet {
    std::string case_id;
    std::vector<FactConstraint> fact_constraints;
    std::vector<ExplanationRule> explanation_rules;
    ExprPtr outcome_assertion;
    std::vector<std::string> warnings;  // clauses that failed to formalize
};

struct AssertionOptions {
    std::string template_text;  // empty selects the built-in template
    double match_floor = 0.5;
    int max_attempts = 3;
};

// Turns a case into constraints: facts become ground equalities, the
// explanation is segmented, matched against the ontology, and formalized
// clause by clause, and the agency action becomes an assertion about
// Applicant_Eligible. Clauses that cannot be formalized are recorded as
// warnings; if no clause survives, throws UnmappableExplanation.
AssertionSet build_assertions(const CaseRecord& record, const OntologyGraph& onto,
                              SimilarityProvider& provider, FormalizerClient& client,
                              const AssertionOptions& options = {});

// Concept labels referenced by the explanation rules and the outcome
// assertion. Fact labels do not count: facts constrain the model but do
// not drive statute retrieval.
std::set<std::string> assertion_vocabulary(const AssertionSet& assertions);

// Exposed for reuse by the verifier: the constraint a single fact induces.
ExprPtr fact_constraint_expr(const std::string& label, const GroundValue& value);

// The claim the agency action makes about eligibility. Throws
// MalformedCase for an unrecognized action.
ExprPtr outcome_for_action(const std::string& action);

}  // namespace lexverify
