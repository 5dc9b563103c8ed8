// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#include "lexverify/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>

#include "httplib.h"
#include "json.hpp"
#include "lexverify/errors.hpp"

namespace lexverify {

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) dot += a[i] * b[i];
    for (double v : a) na += v * v;
    for (double v : b) nb += v * v;
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::string normalize_label(const std::string& label) {
    std::string spaced;
    char prev = '\0';
    for (char c : label) {
        if (std::isupper(static_cast<unsigned char>(c)) &&
            std::islower(static_cast<unsigned char>(prev))) {
            spaced += ' ';
        }
        if (c == '_' || std::ispunct(static_cast<unsigned char>(c))) {
            spaced += ' ';
        } else {
            spaced += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        prev = c;
    }
    std::string out;
    bool in_space = true;
    for (char c : spaced) {
        if (c == ' ' || c == '\t') {
            if (!in_space) out += ' ';
            in_space = true;
        } else {
            out += c;
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

namespace {

std::map<std::string, int> trigram_counts(const std::string& normalized) {
    std::map<std::string, int> counts;
    std::string padded = " " + normalized + " ";
    if (padded.size() < 3) {
        counts[padded] = 1;
        return counts;
    }
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
        ++counts[padded.substr(i, 3)];
    }
    return counts;
}

double trigram_cosine(const std::string& a, const std::string& b) {
    auto ca = trigram_counts(a);
    auto cb = trigram_counts(b);
    double dot = 0, na = 0, nb = 0;
    for (const auto& [gram, count] : ca) {
        na += static_cast<double>(count) * count;
        auto it = cb.find(gram);
        if (it != cb.end()) dot += static_cast<double>(count) * it->second;
    }
    for (const auto& [gram, count] : cb) nb += static_cast<double>(count) * count;
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::string> tokens_of(const std::string& normalized) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : normalized) {
        if (c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool is_subsequence(const std::vector<std::string>& needle,
                    const std::vector<std::string>& hay) {
    if (needle.empty()) return false;
    std::size_t i = 0;
    for (const auto& tok : hay) {
        if (i < needle.size() && tok == needle[i]) ++i;
    }
    return i == needle.size();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

bool OfflineTrigramProvider::alias_hit(const std::string& label, const std::string& text) const {
    auto it = aliases_.find(label);
    if (it == aliases_.end()) return false;
    auto text_tokens = tokens_of(normalize_label(text));
    for (const auto& phrase : it->second) {
        auto phrase_tokens = tokens_of(normalize_label(phrase));
        if (is_subsequence(phrase_tokens, text_tokens) ||
            is_subsequence(text_tokens, phrase_tokens)) {
            return true;
        }
    }
    return false;
}

double OfflineTrigramProvider::similarity(const std::string& a, const std::string& b) {
    double score = trigram_cosine(normalize_label(a), normalize_label(b));
    if (alias_hit(a, b) || alias_hit(b, a)) score = std::max(score, 0.9);
    return std::clamp(score, 0.0, 1.0);
}

std::vector<double> OfflineTrigramProvider::embed(const std::string& text) {
    std::vector<double> vec(embedding_dim(), 0.0);
    for (const auto& [gram, count] : trigram_counts(normalize_label(text))) {
        vec[fnv1a(gram) % vec.size()] += count;
    }
    return vec;
}

EmbeddingServiceProvider::EmbeddingServiceProvider(std::string base_url, std::string auth_token,
                                                   int timeout_ms)
    : base_url_(std::move(base_url)), auth_token_(std::move(auth_token)),
      timeout_ms_(timeout_ms) {}

std::vector<std::vector<double>> EmbeddingServiceProvider::embed_batch(
    const std::vector<std::string>& texts) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(0, timeout_ms_ * 1000);
    client.set_read_timeout(0, timeout_ms_ * 1000);
    httplib::Headers headers;
    if (!auth_token_.empty()) headers.emplace("Authorization", "Bearer " + auth_token_);
    nlohmann::json body;
    body["texts"] = texts;
    auto res = client.Post("/embed", headers, body.dump(), "application/json");
    if (!res) throw ClientUnavailable("embedding service unreachable at " + base_url_);
    if (res->status != 200) {
        throw ClientUnavailable("embedding service returned status " +
                                std::to_string(res->status));
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw ClientUnavailable(std::string("embedding service sent malformed JSON: ") + e.what());
    }
    if (!doc.contains("vectors") || !doc["vectors"].is_array() ||
        doc["vectors"].size() != texts.size()) {
        throw ClientUnavailable("embedding service response missing vectors");
    }
    std::vector<std::vector<double>> out;
    for (const auto& row : doc["vectors"]) {
        std::vector<double> vec;
        for (const auto& v : row) vec.push_back(v.get<double>());
        if (!vec.empty()) dim_ = vec.size();
        out.push_back(std::move(vec));
    }
    return out;
}

std::vector<double> EmbeddingServiceProvider::embed(const std::string& text) {
    return embed_batch({text})[0];
}

double EmbeddingServiceProvider::similarity(const std::string& a, const std::string& b) {
    auto vecs = embed_batch({a, b});
    return std::clamp(cosine_similarity(vecs[0], vecs[1]), 0.0, 1.0);
}

}  // namespace lexverify
