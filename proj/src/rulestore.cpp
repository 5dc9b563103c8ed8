// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#include "lexverify/rulestore.hpp"

#include <algorithm>

#include "json.hpp"
#include "lexverify/errors.hpp"

namespace lexverify {

std::string to_string(Modality m) {
    switch (m) {
        case Modality::Obligation: return "Obligation";
        case Modality::Permission: return "Permission";
        case Modality::Prohibition: return "Prohibition";
    }
    return "Obligation";
}

std::optional<Modality> modality_from_string(const std::string& text) {
    if (text == "Obligation") return Modality::Obligation;
    if (text == "Permission") return Modality::Permission;
    if (text == "Prohibition") return Modality::Prohibition;
    return std::nullopt;
}

std::string RuleStore::add(RuleRecord record, const Vocabulary& vocab) {
    if (record.id.empty()) throw TypecheckFailed("rule has no id");
    if (by_id_.count(record.id)) throw DuplicateId(record.id);
    if (!record.logic) throw TypecheckFailed("rule " + record.id + " has no logic");

    if (auto err = typecheck(record.logic, vocab)) {
        throw TypecheckFailed("rule " + record.id + ": " + err->str());
    }
    record.logic = canonicalize(record.logic);

    // The declared symbol lists must cover the logic, or retrieval would
    // miss this rule for vocabularies that plainly concern it.
    std::set<std::string> declared(record.applies_to.begin(), record.applies_to.end());
    declared.insert(record.determines.begin(), record.determines.end());
    for (const auto& symbol : free_symbols(record.logic)) {
        if (!declared.count(symbol)) {
            throw TypecheckFailed("rule " + record.id + " uses " + symbol +
                                  " outside appliesTo/determines");
        }
    }

    std::string printed = print(record.logic);
    for (const auto& existing : rules_) {
        if (existing.citation == record.citation && print(existing.logic) == printed) {
            throw DuplicateRule(existing.id);
        }
    }

    std::string id = record.id;
    by_id_.emplace(id, rules_.size());
    rules_.push_back(std::move(record));
    return id;
}

void RuleStore::load_json(const std::string& json_text, const Vocabulary& vocab) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw TypecheckFailed(std::string("rule file is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw TypecheckFailed("rule file must be a JSON array");
    for (const auto& item : doc) {
        RuleRecord r;
        r.id = item.value("id", "");
        r.citation = item.value("citation", "");
        r.text = item.value("hasText", "");
        r.rule_class = item.value("class", "");
        r.subclass = item.value("subclass", "");
        if (item.contains("appliesTo")) {
            for (const auto& s : item["appliesTo"]) r.applies_to.push_back(s.get<std::string>());
        }
        if (item.contains("determines")) {
            for (const auto& s : item["determines"]) r.determines.push_back(s.get<std::string>());
        }
        r.logic = parse(item.value("hasLogic", ""));
        if (item.contains("hasModality")) {
            auto m = modality_from_string(item["hasModality"].get<std::string>());
            if (!m) {
                throw TypecheckFailed("rule " + r.id + " has unknown modality " +
                                      item["hasModality"].get<std::string>());
            }
            r.modality = *m;
        }
        add(std::move(r), vocab);
    }
}

std::string RuleStore::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rules_) {
        nlohmann::json item;
        item["id"] = r.id;
        item["citation"] = r.citation;
        item["hasText"] = r.text;
        item["class"] = r.rule_class;
        item["subclass"] = r.subclass;
        item["appliesTo"] = r.applies_to;
        item["determines"] = r.determines;
        item["hasLogic"] = print(r.logic);
        item["hasModality"] = to_string(r.modality);
        out.push_back(std::move(item));
    }
    return out.dump(2);
}

std::vector<RuleRecord> RuleStore::retrieve(const std::set<std::string>& assertion_vocab) const {
    std::vector<RuleRecord> out;
    for (const auto& r : rules_) {
        bool overlaps = false;
        for (const auto& s : r.applies_to) {
            if (assertion_vocab.count(s)) {
                overlaps = true;
                break;
            }
        }
        if (!overlaps) {
            for (const auto& s : r.determines) {
                if (assertion_vocab.count(s)) {
                    overlaps = true;
                    break;
                }
            }
        }
        if (overlaps) out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const RuleRecord& a, const RuleRecord& b) {
        if (a.citation != b.citation) return a.citation < b.citation;
        return a.id < b.id;
    });
    return out;
}

const RuleRecord* RuleStore::find(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return nullptr;
    return &rules_[it->second];
}

}  // namespace lexverify
