// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
#include "lexverify/abox.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "lexverify/corpus.hpp"
#include "lexverify/errors.hpp"
#include "nlohmann/json.hpp"

namespace lexverify {

namespace {

using nlohmann::json;

const std::set<std::string>& known_actions() {
    static const std::set<std::string> actions{"denial", "termination", "reduction",
                                               "approval"};
    return actions;
}

GroundValue parse_fact_value(const std::string& label, ValueKind kind, const json& value) {
    switch (kind) {
        case ValueKind::Boolean:
            if (value.is_boolean()) return GroundValue::boolean(value.get<bool>());
            throw FactKindMismatch(label, "concept is Boolean but value is not a JSON bool");
        case ValueKind::Numeric: {
            std::string text;
            if (value.is_string()) {
                text = value.get<std::string>();
            } else if (value.is_number()) {
                // dump() gives the shortest round-trip form, so a literal
                // like 2015.13 parses to exactly 201513/100.
                text = value.dump();
            } else {
                throw FactKindMismatch(label,
                                       "concept is Numeric but value is not a number or "
                                       "numeric string");
            }
            auto parsed = Rational::parse(text);
            if (!parsed) {
                throw MalformedCase("fact " + label + ": cannot parse \"" + text +
                                    "\" as a number");
            }
            return GroundValue::number(*parsed);
        }
        case ValueKind::Text:
            if (value.is_string()) return GroundValue::text(value.get<std::string>());
            throw FactKindMismatch(label, "concept is Text but value is not a string");
        case ValueKind::Entity:
            break;
    }
    throw FactKindMismatch(label, "entity concepts cannot carry case facts");
}

}  // namespace

std::string to_string(Legality legality) {
    return legality == Legality::Upheld ? "upheld" : "overturned";
}

std::optional<Legality> legality_from_string(const std::string& text) {
    if (text == "upheld") return Legality::Upheld;
    if (text == "overturned") return Legality::Overturned;
    return std::nullopt;
}

CaseRecord load_case(const std::string& json_text, const Vocabulary& vocab) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw MalformedCase("case file is not a JSON object");
    }

    CaseRecord record;
    if (!doc.contains("case_id") || !doc["case_id"].is_string() ||
        doc["case_id"].get<std::string>().empty()) {
        throw MalformedCase("missing or empty case_id");
    }
    record.case_id = doc["case_id"].get<std::string>();

    if (doc.contains("category") && doc["category"].is_string()) {
        record.category = doc["category"].get<std::string>();
    }

    if (!doc.contains("action") || !doc["action"].is_string()) {
        throw MalformedCase(record.case_id + ": missing action");
    }
    record.action = doc["action"].get<std::string>();
    if (!known_actions().count(record.action)) {
        throw MalformedCase(record.case_id + ": unknown action \"" + record.action + "\"");
    }

    if (doc.contains("facts")) {
        if (!doc["facts"].is_object()) {
            throw MalformedCase(record.case_id + ": facts must be an object");
        }
        for (const auto& [label, value] : doc["facts"].items()) {
            if (label == "Applicant_Eligible") {
                throw FactKindMismatch(label,
                                       "eligibility is the verification target, not a "
                                       "case fact");
            }
            auto it = vocab.concepts.find(label);
            if (it == vocab.concepts.end()) {
                throw FactKindMismatch(label, "not a concept in the ontology");
            }
            record.facts.emplace(label, parse_fact_value(label, it->second, value));
        }
    }

    if (doc.contains("explanation")) {
        if (!doc["explanation"].is_string()) {
            throw MalformedCase(record.case_id + ": explanation must be a string");
        }
        record.explanation = doc["explanation"].get<std::string>();
    }

    if (doc.contains("ground_truth") && !doc["ground_truth"].is_null()) {
        const json& gt = doc["ground_truth"];
        if (!gt.is_object() || !gt.contains("legality") || !gt["legality"].is_string()) {
            throw MalformedCase(record.case_id + ": ground_truth needs a legality string");
        }
        auto legality = legality_from_string(gt["legality"].get<std::string>());
        if (!legality) {
            throw MalformedCase(record.case_id + ": unknown legality \"" +
                                gt["legality"].get<std::string>() + "\"");
        }
        GroundTruth truth;
        truth.legality = *legality;
        if (gt.contains("violated_citations")) {
            if (!gt["violated_citations"].is_array()) {
                throw MalformedCase(record.case_id + ": violated_citations must be an array");
            }
            for (const json& item : gt["violated_citations"]) {
                if (!item.is_string()) {
                    throw MalformedCase(record.case_id +
                                        ": violated_citations must hold strings");
                }
                truth.violated_citations.push_back(
                    normalize_citation(item.get<std::string>()));
            }
        }
        record.ground_truth_inconsistent =
            truth.legality == Legality::Upheld && !truth.violated_citations.empty();
        record.ground_truth = std::move(truth);
    }

    return record;
}

CaseRecord load_case_file(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw MalformedCase("cannot open case file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_case(buffer.str(), vocab);
}

ExprPtr fact_constraint_expr(const std::string& label, const GroundValue& value) {
    switch (value.kind) {
        case GroundValue::Kind::Boolean: {
            auto var = Expr::var(label, VarSort::Bool);
            return value.bool_value ? var : Expr::negate(var);
        }
        case GroundValue::Kind::Number:
            return Expr::cmp(CmpOp::Eq, Expr::var(label, VarSort::Num),
                             Expr::num_const(value.number_value));
        case GroundValue::Kind::Text:
            return Expr::cmp(CmpOp::Eq, Expr::var(label, VarSort::Text),
                             Expr::text_const(value.text_value));
    }
    throw MalformedCase("fact " + label + ": unknown value kind");
}

ExprPtr outcome_for_action(const std::string& action) {
    auto eligible = Expr::var("Applicant_Eligible", VarSort::Bool);
    if (action == "approval") return eligible;
    if (known_actions().count(action)) return Expr::negate(eligible);
    throw MalformedCase("unknown action \"" + action + "\"");
}

AssertionSet build_assertions(const CaseRecord& record, const OntologyGraph& onto,
                              SimilarityProvider& provider, FormalizerClient& client,
                              const AssertionOptions& options) {
    AssertionSet assertions;
    assertions.case_id = record.case_id;

    for (const auto& [label, value] : record.facts) {
        assertions.fact_constraints.push_back({label, fact_constraint_expr(label, value)});
    }
    assertions.outcome_assertion = outcome_for_action(record.action);

    const Vocabulary vocab = onto.vocabulary();
    auto spans = segment(record.explanation, SegmentMode::Explanation, record.case_id);
    for (const ClauseSpan& span : spans) {
        ConceptMatch matched = match_concepts(span, onto, provider, options.match_floor);

        FormalizationRequest request;
        request.clause = span.text;
        request.template_text = options.template_text;
        for (const std::string& label : matched.labels) {
            auto it = vocab.concepts.find(label);
            request.vocab.concepts.emplace(
                label, it != vocab.concepts.end() ? it->second : ValueKind::Boolean);
        }
        request.vocab.functions = vocab.functions;

        FormalizationResult result = formalize(request, client, options.max_attempts);
        if (result.ok()) {
            for (const ExprPtr& rule : result.parsed) {
                assertions.explanation_rules.push_back({rule, span});
            }
        } else {
            assertions.warnings.push_back("clause " + std::to_string(span.index) + " \"" +
                                          span.text + "\": " +
                                          result.failure.value_or("no output"));
        }
    }

    if (assertions.explanation_rules.empty()) {
        throw UnmappableExplanation(record.case_id + ": " +
                                    (spans.empty() ? "explanation has no clauses"
                                                   : "no clause could be formalized"));
    }
    return assertions;
}

std::set<std::string> assertion_vocabulary(const AssertionSet& assertions) {
    std::set<std::string> labels;
    for (const ExplanationRule& entry : assertions.explanation_rules) {
        auto symbols = free_symbols(entry.rule);
        labels.insert(symbols.begin(), symbols.end());
    }
    if (assertions.outcome_assertion) {
        auto symbols = free_symbols(assertions.outcome_assertion);
        labels.insert(symbols.begin(), symbols.end());
    }
    return labels;
}

}  // namespace lexverify
