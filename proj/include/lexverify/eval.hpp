// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexverify/abox.hpp"
#include "lexverify/extraction.hpp"
#include "lexverify/ontology.hpp"
#include "lexverify/rulestore.hpp"
#include "lexverify/similarity.hpp"
#include "lexverify/verify.hpp"

namespace lexverify {

// Citation-set agreement. Empty-set conventions: no predictions against no
// expectations is perfect, no predictions against real expectations scores
// zero. f1 is absent when precision + recall = 0.
struct F1Result {
    double precision = 1.0;
    double recall = 1.0;
    std::optional<double> f1 = 1.0;
};

// Strict mode matches whitespace-normalized citations exactly; relaxed mode
// first drops each citation's final dotted component, crediting predictions
// that land in the right subsection.
F1Result violation_f1(const std::set<std::string>& predicted,
                      const std::set<std::string>& expected, bool relaxed = false);

// "MPP 63-502.32" -> "MPP 63-502"; citations without a dotted tail are
// returned unchanged.
std::string citation_prefix(const std::string& citation);

// Fraction of cases where the solver's verdict matches the ruling under the
// mapping upheld = sat, overturned = unsat. Empty input counts as 1.0.
double smt_accuracy(const std::vector<std::pair<Status, Legality>>& results);

struct CaseDetail {
    std::string case_id;
    std::string category;
    std::string predicted_status;  // "sat", "unsat", or "error"
    std::string expected_status;   // from the recorded ruling; empty if none
    std::vector<std::string> predicted_citations;
    std::vector<std::string> expected_citations;
    std::string error;  // nonempty when the case failed to verify
};

// One aggregate row. Totals use category "all"; rows covering every status
// use status_group "all". Cases group under their recorded ruling (upheld =
// sat, overturned = unsat) so counts mirror the dataset's outcome
// distribution; unadjudicated cases group under the solver verdict. Metric
// fields are absent when the row has no data for them (error rows, groups
// without recorded rulings).
struct MetricRow {
    std::string category;
    std::string status_group;  // "sat", "unsat", "error", or "all"
    std::size_t count = 0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;        // micro-averaged over citation instances
    std::optional<double> macro_f1;  // mean of per-case f1 where defined
    std::optional<double> smt_accuracy;
};

struct EvaluationReport {
    std::vector<MetricRow> rows;  // per (category, status group), sorted
    MetricRow totals;
    std::vector<CaseDetail> cases;  // dataset order (sorted file names)
    std::size_t failures = 0;
};

// Metrics rounded to four decimal places; no timestamps, so reruns over the
// same inputs are byte-identical.
std::string report_to_json(const EvaluationReport& report);
std::string report_to_text(const EvaluationReport& report);

struct EvalOptions {
    VerifyOptions verify;
    bool relaxed_citations = false;
    std::size_t parallelism = 1;
};

// Fresh pipeline clients per worker; providers keep per-instance caches and
// are not shared across threads.
using ProviderFactory = std::function<std::unique_ptr<SimilarityProvider>()>;
using ClientFactory = std::function<std::unique_ptr<FormalizerClient>()>;

// Verifies every *.json case file under dir (sorted by name), aggregates by
// category and solver verdict, and records per-case failures in the report
// without aborting the run.
EvaluationReport run_dataset(const std::string& dir, const RuleStore& store,
                             const OntologyGraph& onto, const ProviderFactory& make_provider,
                             const ClientFactory& make_client,
                             const EvalOptions& options = {});

}  // namespace lexverify
