// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "lexverify/logic.hpp"
#include "lexverify/similarity.hpp"

namespace lexverify {

// Concept labels: alphabetic segments joined by underscores.
bool is_valid_concept_label(const std::string& label);
ValueKind default_value_kind(const std::string& label);

struct Concept {
    std::string label;
    std::string domain;
    ValueKind value_kind = ValueKind::Boolean;
    std::string definition;
    std::string citation;
    std::vector<double> embedding;  // empty until computed
};

struct DomainInfo {
    std::string definition;
    std::string citation;
    std::string concept_type = "Entity";
};

struct DependencyEdge {
    std::string from;
    std::string to;
    std::string label;
};

struct IntegrationOutcome {
    enum class Kind { Added, MergedInto } kind;
    std::string label;  // added concept, or the existing match
    double score = 0.0;
};

struct MergeRecord {
    std::string candidate_label;
    std::string candidate_citation;
    std::string existing_label;
    std::string existing_citation;
    double score = 0.0;
};

struct DomainDistanceRow {
    std::string domain;
    std::size_t pair_count = 0;
    double intra = 0.0;
};

struct ClusterDiagnostics {
    double intra = 0.0;
    double inter = 0.0;
    std::vector<DomainDistanceRow> per_domain;
};

// Two-level hierarchy: eligibility domains at the top, concepts below them.
class OntologyGraph {
public:
    // Seed shape: {"Root": {"subclasses": [...]}, "<Domain>": {"attributes": [...]}}
    // where an attribute is a label string or an object with label/conceptType/
    // definition/citation.
    static OntologyGraph seed(const std::string& json_text);

    // Extension shape mirrors the export: top-level groups with definition/
    // conceptType/citation/subtypes. A group naming an existing domain adds
    // into it; a new group becomes a new domain.
    void extend(const std::string& json_text);

    IntegrationOutcome integrate(const Concept& candidate, SimilarityProvider& provider);

    void add_dependency(const std::string& from, const std::string& to,
                        const std::string& label);

    void ensure_embeddings(SimilarityProvider& provider);
    ClusterDiagnostics cluster_diagnostics() const;

    Vocabulary vocabulary() const;

    const std::map<std::string, DomainInfo>& domains() const { return domains_; }
    const std::map<std::string, Concept>& concepts() const { return concepts_; }
    const std::vector<DependencyEdge>& dependencies() const { return dependencies_; }
    const std::vector<MergeRecord>& merge_log() const { return merge_log_; }

    std::string to_json() const;
    std::string to_dot() const;

private:
    void add_concept(Concept c, bool enforce_grammar = true);

    std::map<std::string, DomainInfo> domains_;
    std::map<std::string, Concept> concepts_;
    std::vector<DependencyEdge> dependencies_;
    std::vector<MergeRecord> merge_log_;
};

}  // namespace lexverify
