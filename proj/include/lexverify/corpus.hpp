// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lexverify {

// Citation strings look like "MPP 63-401.1". normalize_citation repairs the
// common source-text variants (section sign, en-dash, odd spaces) before
// validation; is_valid_citation checks the strict grammar.
bool is_valid_citation(const std::string& citation);
std::string normalize_citation(const std::string& raw);

struct ClauseRecord {
    std::string citation;
    std::string text;
    std::optional<std::string> effective_date;
    std::vector<std::string> references;
    std::optional<std::string> domain_hint;
};

class CorpusGraph {
public:
    static CorpusGraph ingest(const std::vector<ClauseRecord>& documents);
    static CorpusGraph ingest_json(const std::string& json_text);

    const std::map<std::string, ClauseRecord>& nodes() const { return nodes_; }
    const std::set<std::pair<std::string, std::string>>& edges() const { return edges_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    bool contains(const std::string& citation) const { return nodes_.count(citation) > 0; }
    const ClauseRecord& clause(const std::string& citation) const;

    // Clauses reachable within `depth` directed hops, start node excluded.
    std::set<std::string> neighbors(const std::string& citation, std::size_t depth) const;

    std::string to_json() const;
    std::string to_dot() const;

private:
    std::map<std::string, ClauseRecord> nodes_;
    std::set<std::pair<std::string, std::string>> edges_;
    std::vector<std::string> warnings_;
};

}  // namespace lexverify
