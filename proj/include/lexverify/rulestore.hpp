// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexverify/logic.hpp"

namespace lexverify {

enum class Modality { Obligation, Permission, Prohibition };

std::string to_string(Modality m);
std::optional<Modality> modality_from_string(const std::string& text);

struct RuleRecord {
    std::string id;
    std::string citation;
    std::string text;
    std::string rule_class;
    std::string subclass;
    std::vector<std::string> applies_to;
    std::vector<std::string> determines;
    ExprPtr logic;  // stored canonicalized
    Modality modality = Modality::Obligation;
};

class RuleStore {
public:
    // Canonicalizes and typechecks before storing; the vocabulary must
    // already include every symbol the rule's logic uses.
    std::string add(RuleRecord record, const Vocabulary& vocab);

    // Parses the JSON array wire format and adds every rule.
    void load_json(const std::string& json_text, const Vocabulary& vocab);
    std::string to_json() const;

    // Every rule whose applies_to or determines intersects the vocabulary,
    // ordered by citation then id.
    std::vector<RuleRecord> retrieve(const std::set<std::string>& assertion_vocab) const;

    const std::vector<RuleRecord>& rules() const { return rules_; }
    const RuleRecord* find(const std::string& id) const;
    std::size_t size() const { return rules_.size(); }

private:
    std::vector<RuleRecord> rules_;
    std::map<std::string, std::size_t> by_id_;
};

}  // namespace lexverify
