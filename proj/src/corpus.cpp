// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#include "lexverify/corpus.hpp"

#include <cctype>
#include <queue>

#include "json.hpp"
#include "lexverify/errors.hpp"

namespace lexverify {

bool is_valid_citation(const std::string& citation) {
    // MPP SP digits '-' digits ('.' digits)*
    const std::string prefix = "MPP ";
    if (citation.rfind(prefix, 0) != 0) return false;
    std::size_t i = prefix.size();
    auto digits = [&](std::size_t& p) {
        std::size_t start = p;
        while (p < citation.size() && std::isdigit(static_cast<unsigned char>(citation[p]))) ++p;
        return p > start;
    };
    if (!digits(i)) return false;
    if (i >= citation.size() || citation[i] != '-') return false;
    ++i;
    if (!digits(i)) return false;
    while (i < citation.size()) {
        if (citation[i] != '.') return false;
        ++i;
        if (!digits(i)) return false;
    }
    return true;
}

std::string normalize_citation(const std::string& raw) {
    std::string out;
    for (std::size_t i = 0; i < raw.size();) {
        unsigned char c = raw[i];
        // Section sign (UTF-8 C2 A7) drops out entirely.
        if (c == 0xC2 && i + 1 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0xA7) {
            i += 2;
            continue;
        }
        // En-dash and em-dash (E2 80 93 / E2 80 94) become hyphens.
        if (c == 0xE2 && i + 2 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0x80 &&
            (static_cast<unsigned char>(raw[i + 2]) == 0x93 ||
             static_cast<unsigned char>(raw[i + 2]) == 0x94)) {
            out += '-';
            i += 3;
            continue;
        }
        // Non-breaking space (C2 A0) becomes a plain space.
        if (c == 0xC2 && i + 1 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0xA0) {
            out += ' ';
            i += 2;
            continue;
        }
        out += static_cast<char>(c);
        ++i;
    }
    // Collapse runs of spaces and trim.
    std::string collapsed;
    bool in_space = true;
    for (char c : out) {
        if (c == ' ' || c == '\t') {
            if (!in_space && !collapsed.empty()) collapsed += ' ';
            in_space = true;
        } else {
            collapsed += c;
            in_space = false;
        }
    }
    while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();
    return collapsed;
}

CorpusGraph CorpusGraph::ingest(const std::vector<ClauseRecord>& documents) {
    CorpusGraph g;
    for (const auto& doc : documents) {
        std::string citation = normalize_citation(doc.citation);
        if (!is_valid_citation(citation)) throw MalformedCitation(doc.citation);
        if (doc.text.empty()) throw EmptyClauseText(citation);
        if (g.nodes_.count(citation)) throw DuplicateCitation(citation);
        ClauseRecord rec = doc;
        rec.citation = citation;
        rec.references.clear();
        for (const auto& ref : doc.references) {
            std::string target = normalize_citation(ref);
            if (!is_valid_citation(target)) throw MalformedCitation(ref);
            rec.references.push_back(target);
        }
        g.nodes_.emplace(citation, std::move(rec));
    }
    for (const auto& [citation, rec] : g.nodes_) {
        for (const auto& ref : rec.references) {
            if (g.nodes_.count(ref)) {
                g.edges_.emplace(citation, ref);
            } else {
                g.warnings_.push_back("dangling reference " + ref + " from " + citation);
            }
        }
    }
    return g;
}

CorpusGraph CorpusGraph::ingest_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedCitation(std::string("corpus JSON: ") + e.what());
    }
    if (!doc.is_array()) throw MalformedCitation("corpus JSON: expected an array of clauses");
    std::vector<ClauseRecord> records;
    for (const auto& item : doc) {
        ClauseRecord rec;
        rec.citation = item.value("citation", "");
        rec.text = item.value("text", "");
        if (item.contains("effective_date")) {
            rec.effective_date = item["effective_date"].get<std::string>();
        }
        if (item.contains("references")) {
            for (const auto& ref : item["references"]) {
                rec.references.push_back(ref.get<std::string>());
            }
        }
        if (item.contains("domain_hint")) {
            rec.domain_hint = item["domain_hint"].get<std::string>();
        }
        records.push_back(std::move(rec));
    }
    return ingest(records);
}

const ClauseRecord& CorpusGraph::clause(const std::string& citation) const {
    auto it = nodes_.find(citation);
    if (it == nodes_.end()) throw UnknownCitation(citation);
    return it->second;
}

std::set<std::string> CorpusGraph::neighbors(const std::string& citation,
                                             std::size_t depth) const {
    if (!nodes_.count(citation)) throw UnknownCitation(citation);
    std::set<std::string> seen{citation};
    std::set<std::string> result;
    std::queue<std::pair<std::string, std::size_t>> frontier;
    frontier.emplace(citation, 0);
    while (!frontier.empty()) {
        auto [current, dist] = frontier.front();
        frontier.pop();
        if (dist >= depth) continue;
        for (const auto& [from, to] : edges_) {
            if (from != current || seen.count(to)) continue;
            seen.insert(to);
            result.insert(to);
            frontier.emplace(to, dist + 1);
        }
    }
    return result;
}

std::string CorpusGraph::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [citation, rec] : nodes_) {
        nlohmann::json item;
        item["citation"] = citation;
        item["text"] = rec.text;
        if (rec.effective_date) item["effective_date"] = *rec.effective_date;
        if (!rec.references.empty()) item["references"] = rec.references;
        if (rec.domain_hint) item["domain_hint"] = *rec.domain_hint;
        out.push_back(std::move(item));
    }
    return out.dump(2);
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string CorpusGraph::to_dot() const {
    std::string out = "digraph corpus {\n";
    for (const auto& [citation, rec] : nodes_) {
        out += "  \"" + dot_escape(citation) + "\";\n";
    }
    for (const auto& [from, to] : edges_) {
        out += "  \"" + dot_escape(from) + "\" -> \"" + dot_escape(to) + "\";\n";
    }
    out += "}\n";
    return out;
}

}  // namespace lexverify
