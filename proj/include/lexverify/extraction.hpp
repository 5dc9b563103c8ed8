// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lexverify/logic.hpp"
#include "lexverify/ontology.hpp"
#include "lexverify/similarity.hpp"

namespace lexverify {

// A minimal assertive unit cut out of a statute clause or an explanation.
// Concatenating spans in index order reproduces the source's assertive
// content; sentence terminators and the coordinating conjunctions at cut
// points are treated as separators.
struct ClauseSpan {
    std::string source_id;
    std::size_t index = 0;
    std::string text;
};

enum class SegmentMode { Statute, Explanation };

// Splits on sentence boundaries (. ! ? ;) and on "and"/"but" joining two
// independent predicates. A period between digits is not a boundary, so
// citations like "63-401.1" survive. A conjunction splits only when both
// sides carry verb evidence and the word right after it is not itself a
// verb; this keeps relative clauses such as "... and applies for benefits
// in that county" attached to their subject. Both modes currently share
// the same rules; the mode is recorded for callers that postprocess spans
// differently. Empty or whitespace-only input yields no spans.
std::vector<ClauseSpan> segment(const std::string& text, SegmentMode mode,
                                const std::string& source_id = {});

// Ontology labels a span plausibly talks about, strongest first.
struct ConceptMatch {
    ClauseSpan span;
    std::vector<std::string> labels;
    std::vector<double> scores;  // parallel to labels, each >= the floor
};

// Scores the span text against every concept label in the ontology and
// keeps those at or above the floor, descending by score with ties broken
// by label, capped at eight labels. An empty labels list marks the span
// unmappable; callers surface that as a warning rather than an error.
ConceptMatch match_concepts(const ClauseSpan& span, const OntologyGraph& onto,
                            SimilarityProvider& provider, double floor = 0.5);

// One completion round-trip to whatever turns prompts into text.
class FormalizerClient {
public:
    virtual ~FormalizerClient() = default;
    // Returns the raw completion. Throws ClientUnavailable when the
    // backing service cannot be reached; never throws for bad content.
    virtual std::string complete(const std::string& prompt) = 0;
};

// Talks to an external completion service: POST {base_url}/complete with
// JSON {"prompt": ..., "model": ...} (model omitted when empty), expects
// {"completion": "..."} back. Transport failures are retried twice before
// ClientUnavailable.
class HttpFormalizerClient final : public FormalizerClient {
public:
    HttpFormalizerClient(std::string base_url, std::string model,
                         int timeout_ms = 10000);
    std::string complete(const std::string& prompt) override;

private:
    std::string base_url_;
    std::string model_;
    int timeout_ms_;
};

// Replays canned responses in order and records every prompt it saw.
// Exhausting the script throws ClientUnavailable, which keeps tests
// honest about how many calls they expect.
class ScriptedReplayClient final : public FormalizerClient {
public:
    explicit ScriptedReplayClient(std::vector<std::string> responses);
    std::string complete(const std::string& prompt) override;
    const std::vector<std::string>& prompts() const { return prompts_; }

private:
    std::deque<std::string> responses_;
    std::vector<std::string> prompts_;
};

// Deterministic offline stand-in for a language model. It reads the
// concept list and clause back out of the rendered prompt and picks a
// rule template keyed on which concepts are present and whether the
// clause reads negatively (denial wording) or positively. Covers the
// eligibility domains the shipped rulebook knows about; a clause it has
// no template for yields prose, which the validation loop reports as a
// formalization failure.
class EchoFallbackClient final : public FormalizerClient {
public:
    std::string complete(const std::string& prompt) override;
};

struct FormalizationRequest {
    Vocabulary vocab;  // matched concepts; Applicant_Eligible is implied
    std::string clause;
    std::string template_id = "directed";
    std::string template_text;  // empty means default_prompt_template()
};

struct FormalizationResult {
    std::string raw_output;       // last raw completion seen
    std::vector<ExprPtr> parsed;  // canonicalized rules; empty on failure
    int attempts = 0;
    std::optional<std::string> failure;
    bool ok() const { return failure == std::nullopt && !parsed.empty(); }
};

// The directed prompt wording, with {ontology_concepts} and
// {explanation_clause} placeholders. Shipped verbatim as
// data/prompts/directed.txt; kept in code so the pipeline works without
// a data directory.
std::string default_prompt_template();

// Substitutes the placeholder tokens. Concepts render as one
// comma-separated line so offline clients can read them back.
std::string render_prompt(const std::string& template_text,
                          const std::vector<std::string>& concepts,
                          const std::string& clause);

// Renders the prompt, asks the client, and validates each response:
// strip surrounding prose down to the first balanced JSON object, read
// "hasLogic" (string or array of strings), parse, rewrite applied forms,
// typecheck against the request vocabulary plus Applicant_Eligible,
// require an implication concluding Applicant_Eligible or its negation,
// canonicalize. Any rejection re-prompts with the failure appended, up
// to max_attempts. Validation failures are data on the result; only
// transport trouble (ClientUnavailable) escapes as an exception.
FormalizationResult formalize(const FormalizationRequest& request,
                              FormalizerClient& client, int max_attempts = 3);

// Candidate ontology concepts named by a statute clause: noun-phrase
// chunks over a rule-based part-of-speech tagger, plus a small table of
// compound constructions ("living there", "applies for benefits in that
// county") that chunking alone cannot name. Labels come out as
// DomainPrefix_CamelCase with the clause citation preserved; the domain
// argument is the governing eligibility domain, typically the corpus
// record's domain hint. Value kinds follow the label suffix defaults.
std::vector<Concept> extract_statute_concepts(const ClauseSpan& clause,
                                              const std::string& domain);

}  // namespace lexverify
