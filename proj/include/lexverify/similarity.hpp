// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

namespace lexverify {

// Similarity scores are always in [0, 1]; 1 means same concept.
class SimilarityProvider {
public:
    virtual ~SimilarityProvider() = default;
    virtual double similarity(const std::string& a, const std::string& b) = 0;
    virtual std::vector<double> embed(const std::string& text) = 0;
    virtual std::size_t embedding_dim() const = 0;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// Lowercases, splits CamelCase and underscores, strips punctuation.
std::string normalize_label(const std::string& label);

using AliasTable = std::map<std::string, std::vector<std::string>>;

// Deterministic offline provider: cosine over character-trigram counts of
// normalized labels, with a fixed boost for configured alias phrases.
class OfflineTrigramProvider : public SimilarityProvider {
public:
    OfflineTrigramProvider() = default;
    explicit OfflineTrigramProvider(AliasTable aliases) : aliases_(std::move(aliases)) {}

    double similarity(const std::string& a, const std::string& b) override;
    std::vector<double> embed(const std::string& text) override;
    std::size_t embedding_dim() const override { return 128; }

private:
    bool alias_hit(const std::string& label, const std::string& text) const;
    AliasTable aliases_;
};

// HTTP client for an external embedding service. POST /embed with
// {"texts": [...]} returns {"vectors": [[...], ...]}.
class EmbeddingServiceProvider : public SimilarityProvider {
public:
    EmbeddingServiceProvider(std::string base_url, std::string auth_token, int timeout_ms);

    double similarity(const std::string& a, const std::string& b) override;
    std::vector<double> embed(const std::string& text) override;
    std::size_t embedding_dim() const override { return dim_; }

    std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts);

private:
    std::string base_url_;
    std::string auth_token_;
    int timeout_ms_;
    mutable std::size_t dim_ = 0;
};

}  // namespace lexverify
