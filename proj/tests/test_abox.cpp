// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#include "lexverify/abox.hpp"

#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lexverify/errors.hpp"
#include "lexverify/extraction.hpp"
#include "lexverify/logic.hpp"
#include "lexverify/ontology.hpp"
#include "lexverify/similarity.hpp"
#include "support/generators.hpp"

namespace {

using lexverify::AssertionSet;
using lexverify::CaseRecord;
using lexverify::Legality;

// The eligibility vocabulary the case pipeline works over.
lexverify::OntologyGraph case_ontology() {
    return lexverify::OntologyGraph::seed(R"json({
      "Root": {"subclasses": ["IncomeEligibility", "ResidencyRequirement",
                               "CitizenshipStatus", "ResourceEligibility",
                               "StudentEligibility", "HouseholdComposition"]},
      "IncomeEligibility": {"attributes": ["GrossIncome", "IncomeThreshold",
                                            "HouseholdSize"]},
      "ResidencyRequirement": {"attributes": [
          "Applicant_ResidenceCounty", "Applicant_ApplicationCounty",
          "Applicant_ResidenceState", "AdministeringState",
          "Residency_HouseholdLocation",
          {"label": "Residency_ApplicationCounty", "conceptType": "Boolean"},
          "ResidencyVerificationProvided"]},
      "CitizenshipStatus": {"attributes": ["CitizenStatus", "VerificationProvided"]},
      "ResourceEligibility": {"attributes": ["HouseholdResources", "ResourceThreshold"]},
      "StudentEligibility": {"attributes": ["StudentFlag", "MeetsStudentExemption"]},
      "HouseholdComposition": {"attributes": ["Age", "HasDisabilityStatus"]}
    })json");
}

lexverify::AliasTable load_aliases() {
    std::ifstream in(std::string(LEXVERIFY_DATA_DIR) + "/aliases.json");
    REQUIRE(in.good());
    nlohmann::json parsed = nlohmann::json::parse(in);
    lexverify::AliasTable table;
    for (const auto& [label, phrases] : parsed.items()) {
        for (const auto& phrase : phrases) {
            table[label].push_back(phrase.get<std::string>());
        }
    }
    return table;
}

std::string worked_case_json() {
    return R"json({
      "case_id": "case-worked",
      "category": "income",
      "action": "denial",
      "facts": {
        "GrossIncome": "2015.13",
        "IncomeThreshold": "1800.00",
        "ResidencyVerificationProvided": false
      },
      "explanation": "Your income was too high and you did not provide proof of residency.",
      "ground_truth": {"legality": "upheld", "violated_citations": []}
    })json";
}

AssertionSet build_from_json(const std::string& json_text) {
    auto onto = case_ontology();
    lexverify::OfflineTrigramProvider provider(load_aliases());
    lexverify::EchoFallbackClient client;
    CaseRecord record = lexverify::load_case(json_text, onto.vocabulary());
    return lexverify::build_assertions(record, onto, provider, client);
}

std::string case_with_explanation(const std::string& explanation) {
    nlohmann::json doc{{"case_id", "case-x"},
                       {"action", "denial"},
                       {"facts", {{"GrossIncome", "2200.00"}}},
                       {"explanation", explanation}};
    return doc.dump();
}

std::set<std::string> collect_symbols(const lexverify::ExprPtr& expr) {
    std::set<std::string> out;
    if (!expr) return out;
    if (expr->kind() == lexverify::Expr::Kind::Var ||
        expr->kind() == lexverify::Expr::Kind::FuncApp) {
        out.insert(expr->label());
    }
    for (const auto& child : expr->children()) {
        auto sub = collect_symbols(child);
        out.insert(sub.begin(), sub.end());
    }
    return out;
}

}  // namespace

TEST_CASE("a full case builds fact constraints, claims, and an outcome") {
    AssertionSet assertions = build_from_json(worked_case_json());

    CHECK(assertions.case_id == "case-worked");
    CHECK(assertions.warnings.empty());

    REQUIRE(assertions.fact_constraints.size() == 3);
    CHECK(assertions.fact_constraints[0].label == "GrossIncome");
    CHECK(print(assertions.fact_constraints[0].expr) == "GrossIncome = 2015.13");
    CHECK(assertions.fact_constraints[1].label == "IncomeThreshold");
    CHECK(print(assertions.fact_constraints[1].expr) == "IncomeThreshold = 1800");
    CHECK(assertions.fact_constraints[2].label == "ResidencyVerificationProvided");
    CHECK(print(assertions.fact_constraints[2].expr) ==
          "Not(ResidencyVerificationProvided)");

    REQUIRE(assertions.explanation_rules.size() == 2);
    CHECK(print(assertions.explanation_rules[0].rule) ==
          "Implies(GrossIncome > IncomeThreshold, Not(Applicant_Eligible))");
    CHECK(print(assertions.explanation_rules[1].rule) ==
          "Implies(Not(ResidencyVerificationProvided), Not(Applicant_Eligible))");
    CHECK(assertions.explanation_rules[0].span.index == 0);
    CHECK(assertions.explanation_rules[0].span.text == "Your income was too high.");
    CHECK(assertions.explanation_rules[1].span.index == 1);
    CHECK(assertions.explanation_rules[1].span.source_id == "case-worked");

    CHECK(print(assertions.outcome_assertion) == "Not(Applicant_Eligible)");
}

TEST_CASE("text facts become ground equalities against quoted constants") {
    auto onto = case_ontology();
    std::string text = R"json({
      "case_id": "case-county",
      "action": "denial",
      "facts": {
        "Applicant_ResidenceCounty": "Fresno",
        "Applicant_ApplicationCounty": "Alameda",
        "StudentFlag": true
      },
      "explanation": "You applied in a different county than where you live."
    })json";
    lexverify::OfflineTrigramProvider provider(load_aliases());
    lexverify::EchoFallbackClient client;
    CaseRecord record = lexverify::load_case(text, onto.vocabulary());
    AssertionSet assertions = lexverify::build_assertions(record, onto, provider, client);

    REQUIRE(assertions.fact_constraints.size() == 3);
    CHECK(print(assertions.fact_constraints[0].expr) ==
          "Applicant_ApplicationCounty = \"Alameda\"");
    CHECK(print(assertions.fact_constraints[1].expr) ==
          "Applicant_ResidenceCounty = \"Fresno\"");
    CHECK(print(assertions.fact_constraints[2].expr) == "StudentFlag");

    for (const auto& constraint : assertions.fact_constraints) {
        auto symbols = collect_symbols(constraint.expr);
        CHECK(symbols == std::set<std::string>{constraint.label});
        CHECK(!symbols.count("Applicant_Eligible"));
    }
}

TEST_CASE("eligibility itself cannot be asserted as a case fact") {
    auto onto = case_ontology();
    std::string text = R"json({
      "case_id": "case-bad",
      "action": "denial",
      "facts": {"Applicant_Eligible": true},
      "explanation": "Your income was too high."
    })json";
    CHECK_THROWS_AS(lexverify::load_case(text, onto.vocabulary()),
                    lexverify::FactKindMismatch);
}

TEST_CASE("the agency action fixes the outcome assertion") {
    CHECK(print(lexverify::outcome_for_action("denial")) == "Not(Applicant_Eligible)");
    CHECK(print(lexverify::outcome_for_action("termination")) == "Not(Applicant_Eligible)");
    CHECK(print(lexverify::outcome_for_action("reduction")) == "Not(Applicant_Eligible)");
    CHECK(print(lexverify::outcome_for_action("approval")) == "Applicant_Eligible");
    CHECK_THROWS_AS(lexverify::outcome_for_action("rejection"), lexverify::MalformedCase);
}

TEST_CASE("an empty explanation cannot be mapped") {
    CHECK_THROWS_AS(build_from_json(case_with_explanation("")),
                    lexverify::UnmappableExplanation);
    CHECK_THROWS_AS(build_from_json(case_with_explanation("   \n\t ")),
                    lexverify::UnmappableExplanation);
}

TEST_CASE("an explanation with no usable clause cannot be mapped") {
    CHECK_THROWS_AS(build_from_json(case_with_explanation("The weather was considered.")),
                    lexverify::UnmappableExplanation);
}

TEST_CASE("a partly mappable explanation keeps the good clause and records the failure") {
    AssertionSet assertions =
        build_from_json(case_with_explanation("Your income was too high and the weather was bad."));

    REQUIRE(assertions.explanation_rules.size() == 1);
    CHECK(print(assertions.explanation_rules[0].rule) ==
          "Implies(GrossIncome > IncomeThreshold, Not(Applicant_Eligible))");
    REQUIRE(assertions.warnings.size() == 1);
    CHECK(assertions.warnings[0].find("The weather was bad.") != std::string::npos);
    CHECK(assertions.warnings[0].find("clause 1") != std::string::npos);
}

TEST_CASE("five wordings of the county mismatch normalize to one claim") {
    const std::vector<std::string> variants = {
        "You applied in a different county than where you live.",
        "Eligibility denied — jurisdiction mismatch.",
        "You must live in the county you file in.",
        "Address on file belongs to another county.",
        "Applicant’s household is located outside this county.",
    };

    auto onto = case_ontology();
    lexverify::OfflineTrigramProvider provider(load_aliases());
    lexverify::EchoFallbackClient client;

    std::vector<AssertionSet> sets;
    for (const std::string& variant : variants) {
        nlohmann::json doc{{"case_id", "case-variant"},
                           {"action", "denial"},
                           {"facts",
                            {{"Applicant_ResidenceCounty", "Fresno"},
                             {"Applicant_ApplicationCounty", "Alameda"}}},
                           {"explanation", variant}};
        CaseRecord record = lexverify::load_case(doc.dump(), onto.vocabulary());
        sets.push_back(lexverify::build_assertions(record, onto, provider, client));
    }

    for (const AssertionSet& assertions : sets) {
        REQUIRE(assertions.explanation_rules.size() == 1);
        CHECK(assertions.warnings.empty());
    }
    const lexverify::ExprPtr& first = sets[0].explanation_rules[0].rule;
    CHECK(print(first) ==
          "Implies(Not(Applicant_ResidenceCounty = Applicant_ApplicationCounty), "
          "Not(Applicant_Eligible))");
    for (size_t i = 1; i < sets.size(); ++i) {
        CAPTURE(variants[i]);
        CHECK(lexverify::structurally_equal(first, sets[i].explanation_rules[0].rule));
    }
}

TEST_CASE("the assertion vocabulary is the union over claims and outcome") {
    AssertionSet assertions = build_from_json(worked_case_json());
    std::set<std::string> expected{"Applicant_Eligible", "GrossIncome", "IncomeThreshold",
                                   "ResidencyVerificationProvided"};
    CHECK(lexverify::assertion_vocabulary(assertions) == expected);
}

TEST_CASE("an outcome-only assertion set references only eligibility") {
    AssertionSet assertions;
    assertions.case_id = "case-outcome";
    assertions.outcome_assertion = lexverify::outcome_for_action("denial");
    CHECK(lexverify::assertion_vocabulary(assertions) ==
          std::set<std::string>{"Applicant_Eligible"});
}

TEST_CASE("fact labels never leak into the assertion vocabulary") {
    AssertionSet assertions = build_from_json(worked_case_json());
    // ResidencyVerificationProvided appears because a claim mentions it, so
    // drop the claims and recheck: only the outcome remains visible.
    assertions.explanation_rules.clear();
    CHECK(lexverify::assertion_vocabulary(assertions) ==
          std::set<std::string>{"Applicant_Eligible"});
}

TEST_CASE("the assertion vocabulary matches a tree-walk union oracle") {
    std::mt19937 rng(20250817);
    lexverify::testing::GenConfig cfg;
    cfg.bool_vars = {"Applicant_Eligible", "StudentFlag", "CitizenStatus", "P"};
    cfg.num_vars = {"GrossIncome", "IncomeThreshold", "Age"};
    cfg.text_vars = {"Applicant_ResidenceCounty", "AdministeringState"};

    for (int round = 0; round < 60; ++round) {
        AssertionSet assertions;
        assertions.case_id = "case-gen";
        int rules = lexverify::testing::pick(rng, 4);
        for (int i = 0; i < rules; ++i) {
            lexverify::ClauseSpan span{"case-gen", static_cast<size_t>(i),
                                       "generated clause"};
            assertions.explanation_rules.push_back(
                {lexverify::testing::gen_bool_expr(rng, cfg), span});
        }
        assertions.outcome_assertion =
            lexverify::outcome_for_action(lexverify::testing::pick(rng, 2) == 0
                                              ? "denial"
                                              : "approval");

        std::set<std::string> expected;
        for (const auto& entry : assertions.explanation_rules) {
            auto symbols = collect_symbols(entry.rule);
            expected.insert(symbols.begin(), symbols.end());
        }
        auto outcome_symbols = collect_symbols(assertions.outcome_assertion);
        expected.insert(outcome_symbols.begin(), outcome_symbols.end());

        CHECK(lexverify::assertion_vocabulary(assertions) == expected);
    }
}

TEST_CASE("case records round-trip values and validate their shapes") {
    auto vocab = case_ontology().vocabulary();

    SUBCASE("numeric facts accept strings and JSON numbers alike") {
        auto a = lexverify::load_case(
            R"({"case_id": "c1", "action": "denial", "facts": {"GrossIncome": "2015.13"},
                "explanation": "x"})",
            vocab);
        auto b = lexverify::load_case(
            R"({"case_id": "c1", "action": "denial", "facts": {"GrossIncome": 2015.13},
                "explanation": "x"})",
            vocab);
        CHECK(a.facts.at("GrossIncome") == b.facts.at("GrossIncome"));
        CHECK(a.facts.at("GrossIncome").number_value.str() == "2015.13");
    }

    SUBCASE("boolean and text facts keep their values") {
        auto record = lexverify::load_case(
            R"({"case_id": "c2", "action": "approval",
                "facts": {"StudentFlag": false, "AdministeringState": "California"},
                "explanation": "x"})",
            vocab);
        CHECK(record.facts.at("StudentFlag").bool_value == false);
        CHECK(record.facts.at("AdministeringState").text_value == "California");
        CHECK(record.category.empty());
    }

    SUBCASE("an unknown concept is rejected") {
        CHECK_THROWS_AS(lexverify::load_case(
                            R"({"case_id": "c3", "action": "denial",
                                "facts": {"ShoeSize": "9"}, "explanation": "x"})",
                            vocab),
                        lexverify::FactKindMismatch);
    }

    SUBCASE("kind clashes are rejected") {
        CHECK_THROWS_AS(lexverify::load_case(
                            R"({"case_id": "c4", "action": "denial",
                                "facts": {"GrossIncome": true}, "explanation": "x"})",
                            vocab),
                        lexverify::FactKindMismatch);
        CHECK_THROWS_AS(lexverify::load_case(
                            R"({"case_id": "c5", "action": "denial",
                                "facts": {"StudentFlag": "yes"}, "explanation": "x"})",
                            vocab),
                        lexverify::FactKindMismatch);
        CHECK_THROWS_AS(lexverify::load_case(
                            R"({"case_id": "c6", "action": "denial",
                                "facts": {"AdministeringState": 12}, "explanation": "x"})",
                            vocab),
                        lexverify::FactKindMismatch);
    }

    SUBCASE("a numeric string that does not parse is malformed") {
        CHECK_THROWS_AS(lexverify::load_case(
                            R"({"case_id": "c7", "action": "denial",
                                "facts": {"GrossIncome": "lots"}, "explanation": "x"})",
                            vocab),
                        lexverify::MalformedCase);
    }

    SUBCASE("identity and action are mandatory") {
        CHECK_THROWS_AS(
            lexverify::load_case(R"({"action": "denial", "explanation": "x"})", vocab),
            lexverify::MalformedCase);
        CHECK_THROWS_AS(
            lexverify::load_case(R"({"case_id": "", "action": "denial"})", vocab),
            lexverify::MalformedCase);
        CHECK_THROWS_AS(lexverify::load_case(R"({"case_id": "c8"})", vocab),
                        lexverify::MalformedCase);
        CHECK_THROWS_AS(
            lexverify::load_case(R"({"case_id": "c9", "action": "sanction"})", vocab),
            lexverify::MalformedCase);
        CHECK_THROWS_AS(lexverify::load_case("not json at all", vocab),
                        lexverify::MalformedCase);
        CHECK_THROWS_AS(lexverify::load_case(R"(["c10"])", vocab),
                        lexverify::MalformedCase);
    }
}

TEST_CASE("ground truth legality and citations are normalized") {
    auto vocab = case_ontology().vocabulary();

    auto record = lexverify::load_case(
        "{\"case_id\": \"g1\", \"action\": \"denial\", \"explanation\": \"x\","
        " \"ground_truth\": {\"legality\": \"overturned\","
        " \"violated_citations\": [\"MPP §63–401.1\"]}}",
        vocab);
    REQUIRE(record.ground_truth.has_value());
    CHECK(record.ground_truth->legality == Legality::Overturned);
    REQUIRE(record.ground_truth->violated_citations.size() == 1);
    CHECK(record.ground_truth->violated_citations[0] == "MPP 63-401.1");
    CHECK(!record.ground_truth_inconsistent);

    auto upheld = lexverify::load_case(
        R"({"case_id": "g2", "action": "denial", "explanation": "x",
            "ground_truth": {"legality": "upheld", "violated_citations": []}})",
        vocab);
    REQUIRE(upheld.ground_truth.has_value());
    CHECK(upheld.ground_truth->legality == Legality::Upheld);
    CHECK(!upheld.ground_truth_inconsistent);

    // A record claiming an upheld action while listing violations still
    // loads; the contradiction is flagged for evaluation to count.
    auto inconsistent = lexverify::load_case(
        R"({"case_id": "g3", "action": "denial", "explanation": "x",
            "ground_truth": {"legality": "upheld",
                             "violated_citations": ["MPP 63-301.1"]}})",
        vocab);
    CHECK(inconsistent.ground_truth_inconsistent);

    auto absent = lexverify::load_case(
        R"({"case_id": "g4", "action": "denial", "explanation": "x"})", vocab);
    CHECK(!absent.ground_truth.has_value());

    CHECK_THROWS_AS(lexverify::load_case(
                        R"({"case_id": "g5", "action": "denial", "explanation": "x",
                            "ground_truth": {"legality": "reversed"}})",
                        vocab),
                    lexverify::MalformedCase);

    CHECK(lexverify::to_string(Legality::Upheld) == "upheld");
    CHECK(lexverify::to_string(Legality::Overturned) == "overturned");
    CHECK(lexverify::legality_from_string("overturned") == Legality::Overturned);
    CHECK(!lexverify::legality_from_string("Upheld").has_value());
}

TEST_CASE("assertion building is deterministic") {
    AssertionSet first = build_from_json(worked_case_json());
    AssertionSet second = build_from_json(worked_case_json());

    REQUIRE(first.fact_constraints.size() == second.fact_constraints.size());
    for (size_t i = 0; i < first.fact_constraints.size(); ++i) {
        CHECK(print(first.fact_constraints[i].expr) ==
              print(second.fact_constraints[i].expr));
    }
    REQUIRE(first.explanation_rules.size() == second.explanation_rules.size());
    for (size_t i = 0; i < first.explanation_rules.size(); ++i) {
        CHECK(lexverify::structurally_equal(first.explanation_rules[i].rule,
                                            second.explanation_rules[i].rule));
    }
    CHECK(print(first.outcome_assertion) == print(second.outcome_assertion));
    CHECK(first.warnings == second.warnings);
}
