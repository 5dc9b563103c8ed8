// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#include "lexverify/ontology.hpp"

#include <cctype>

#include "json.hpp"
#include "lexverify/errors.hpp"

namespace lexverify {

bool is_valid_concept_label(const std::string& label) {
    if (label.empty()) return false;
    bool expect_alpha = true;
    for (char c : label) {
        if (c == '_') {
            if (expect_alpha) return false;
            expect_alpha = true;
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            expect_alpha = false;
        } else {
            return false;
        }
    }
    return !expect_alpha;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

ValueKind default_value_kind(const std::string& label) {
    for (const char* numeric : {"Income", "Threshold", "Resources", "Size", "Age"}) {
        if (ends_with(label, numeric)) return ValueKind::Numeric;
    }
    for (const char* text : {"County", "State"}) {
        if (ends_with(label, text)) return ValueKind::Text;
    }
    return ValueKind::Boolean;
}

void OntologyGraph::add_concept(Concept c, bool enforce_grammar) {
    // Seed and extension documents must use identifier-shaped labels; the
    // integration path accepts free-form candidate labels from extraction.
    if (enforce_grammar && !is_valid_concept_label(c.label)) {
        throw MalformedSeed("concept label violates the identifier grammar: " + c.label);
    }
    if (concepts_.count(c.label) || domains_.count(c.label)) throw DuplicateLabel(c.label);
    std::string label = c.label;
    concepts_.emplace(std::move(label), std::move(c));
}

OntologyGraph OntologyGraph::seed(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedSeed(std::string("seed is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("Root") || !doc["Root"].is_object() ||
        !doc["Root"].contains("subclasses") || !doc["Root"]["subclasses"].is_array()) {
        throw MalformedSeed("seed must contain Root.subclasses");
    }
    OntologyGraph g;
    for (const auto& sub : doc["Root"]["subclasses"]) {
        if (!sub.is_string()) throw MalformedSeed("Root.subclasses entries must be strings");
        std::string domain = sub.get<std::string>();
        if (!is_valid_concept_label(domain)) {
            throw MalformedSeed("domain label violates the identifier grammar: " + domain);
        }
        if (g.domains_.count(domain)) throw DuplicateLabel(domain);
        g.domains_.emplace(domain, DomainInfo{});
    }
    for (const auto& [key, section] : doc.items()) {
        if (key == "Root") continue;
        if (!g.domains_.count(key)) {
            throw MalformedSeed("section " + key + " is not a Root subclass");
        }
        if (!section.is_object() || !section.contains("attributes") ||
            !section["attributes"].is_array()) {
            throw MalformedSeed("domain section " + key + " must list attributes");
        }
        for (const auto& attr : section["attributes"]) {
            Concept c;
            c.domain = key;
            if (attr.is_string()) {
                c.label = attr.get<std::string>();
                c.value_kind = default_value_kind(c.label);
            } else if (attr.is_object() && attr.contains("label")) {
                c.label = attr["label"].get<std::string>();
                c.definition = attr.value("definition", "");
                c.citation = attr.value("citation", "");
                if (attr.contains("conceptType")) {
                    auto kind = value_kind_from_string(attr["conceptType"].get<std::string>());
                    if (!kind) {
                        throw MalformedSeed("unknown conceptType for " + c.label);
                    }
                    c.value_kind = *kind;
                } else {
                    c.value_kind = default_value_kind(c.label);
                }
            } else {
                throw MalformedSeed("attribute entries must be strings or labeled objects");
            }
            g.add_concept(std::move(c));
        }
    }
    return g;
}

void OntologyGraph::extend(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedSeed(std::string("extension is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw MalformedSeed("extension must be a JSON object of groups");
    for (const auto& [group, body] : doc.items()) {
        if (group == "dependencies") {
            if (!body.is_array()) throw MalformedSeed("dependencies must be an array");
            for (const auto& edge : body) {
                add_dependency(edge.value("from", ""), edge.value("to", ""),
                               edge.value("label", ""));
            }
            continue;
        }
        if (!body.is_object()) throw MalformedSeed("group " + group + " must be an object");
        if (!is_valid_concept_label(group)) {
            throw MalformedSeed("group label violates the identifier grammar: " + group);
        }
        if (concepts_.count(group)) throw DuplicateLabel(group);
        auto it = domains_.find(group);
        if (it == domains_.end()) {
            DomainInfo info;
            info.definition = body.value("definition", "");
            info.citation = body.value("citation", "");
            info.concept_type = body.value("conceptType", "Entity");
            domains_.emplace(group, std::move(info));
        }
        if (!body.contains("subtypes")) continue;
        if (!body["subtypes"].is_object()) {
            throw MalformedSeed("subtypes of " + group + " must be an object");
        }
        for (const auto& [label, sub] : body["subtypes"].items()) {
            Concept c;
            c.label = label;
            c.domain = group;
            c.definition = sub.value("definition", "");
            c.citation = sub.value("citation", "");
            if (sub.contains("conceptType")) {
                auto kind = value_kind_from_string(sub["conceptType"].get<std::string>());
                if (!kind) throw MalformedSeed("unknown conceptType for " + label);
                c.value_kind = *kind;
            } else {
                c.value_kind = default_value_kind(label);
            }
            add_concept(std::move(c));
        }
    }
}

IntegrationOutcome OntologyGraph::integrate(const Concept& candidate,
                                            SimilarityProvider& provider) {
    if (!domains_.count(candidate.domain)) throw UnknownDomain(candidate.domain);
    auto exact = concepts_.find(candidate.label);
    if (exact != concepts_.end()) {
        merge_log_.push_back({candidate.label, candidate.citation, exact->second.label,
                              exact->second.citation, 1.0});
        return {IntegrationOutcome::Kind::MergedInto, candidate.label, 1.0};
    }
    double best_score = -1.0;
    std::string best_label;
    // Map order is label-ascending, so keeping strict improvements breaks
    // score ties toward the lexicographically smallest existing label.
    for (const auto& [label, existing] : concepts_) {
        double score = provider.similarity(candidate.label, label);
        if (score > best_score) {
            best_score = score;
            best_label = label;
        }
    }
    if (best_score > 0.85) {
        const Concept& match = concepts_.at(best_label);
        merge_log_.push_back(
            {candidate.label, candidate.citation, match.label, match.citation, best_score});
        return {IntegrationOutcome::Kind::MergedInto, best_label, best_score};
    }
    Concept stored = candidate;
    add_concept(std::move(stored), false);
    return {IntegrationOutcome::Kind::Added, candidate.label,
            best_score < 0 ? 0.0 : best_score};
}

void OntologyGraph::add_dependency(const std::string& from, const std::string& to,
                                   const std::string& label) {
    auto known = [&](const std::string& name) {
        return domains_.count(name) > 0 || concepts_.count(name) > 0;
    };
    if (!known(from)) throw UnknownDomain(from);
    if (!known(to)) throw UnknownDomain(to);
    dependencies_.push_back({from, to, label});
}

void OntologyGraph::ensure_embeddings(SimilarityProvider& provider) {
    for (auto& [label, node] : concepts_) {
        if (node.embedding.empty()) node.embedding = provider.embed(label);
    }
}

ClusterDiagnostics OntologyGraph::cluster_diagnostics() const {
    for (const auto& [label, node] : concepts_) {
        if (node.embedding.empty()) throw MissingEmbedding(label);
    }
    std::vector<const Concept*> all;
    for (const auto& [label, node] : concepts_) all.push_back(&node);

    double intra_sum = 0, inter_sum = 0;
    std::size_t intra_n = 0, inter_n = 0;
    std::map<std::string, std::pair<double, std::size_t>> per_domain;
    for (const auto& [domain, info] : domains_) per_domain[domain] = {0.0, 0};

    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            double dist = 1.0 - cosine_similarity(all[i]->embedding, all[j]->embedding);
            if (all[i]->domain == all[j]->domain) {
                intra_sum += dist;
                ++intra_n;
                auto& row = per_domain[all[i]->domain];
                row.first += dist;
                ++row.second;
            } else {
                inter_sum += dist;
                ++inter_n;
            }
        }
    }
    ClusterDiagnostics out;
    out.intra = intra_n ? intra_sum / intra_n : 0.0;
    out.inter = inter_n ? inter_sum / inter_n : 0.0;
    for (const auto& [domain, row] : per_domain) {
        out.per_domain.push_back(
            {domain, row.second, row.second ? row.first / row.second : 0.0});
    }
    return out;
}

Vocabulary OntologyGraph::vocabulary() const {
    Vocabulary v;
    for (const auto& [label, node] : concepts_) {
        v.concepts.emplace(label, node.value_kind);
    }
    return v;
}

std::string OntologyGraph::to_json() const {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [domain, info] : domains_) {
        nlohmann::json group;
        group["definition"] = info.definition;
        group["conceptType"] = info.concept_type;
        group["citation"] = info.citation;
        nlohmann::json subtypes = nlohmann::json::object();
        for (const auto& [label, node] : concepts_) {
            if (node.domain != domain) continue;
            nlohmann::json sub;
            sub["definition"] = node.definition;
            sub["citation"] = node.citation;
            sub["conceptType"] = to_string(node.value_kind);
            subtypes[label] = std::move(sub);
        }
        group["subtypes"] = std::move(subtypes);
        out[domain] = std::move(group);
    }
    if (!dependencies_.empty()) {
        nlohmann::json deps = nlohmann::json::array();
        for (const auto& d : dependencies_) {
            deps.push_back({{"from", d.from}, {"to", d.to}, {"label", d.label}});
        }
        out["dependencies"] = std::move(deps);
    }
    return out.dump(2);
}

std::string OntologyGraph::to_dot() const {
    std::string out = "digraph ontology {\n  rankdir=LR;\n";
    for (const auto& [domain, info] : domains_) {
        out += "  \"" + domain + "\" [shape=box];\n";
    }
    for (const auto& [label, node] : concepts_) {
        out += "  \"" + label + "\" [shape=ellipse];\n";
        out += "  \"" + node.domain + "\" -> \"" + label + "\";\n";
    }
    for (const auto& d : dependencies_) {
        out += "  \"" + d.from + "\" -> \"" + d.to + "\" [label=\"" + d.label +
               "\", style=dashed];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace lexverify
