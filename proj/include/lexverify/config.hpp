// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>

#include "lexverify/eval.hpp"
#include "lexverify/extraction.hpp"
#include "lexverify/ontology.hpp"
#include "lexverify/rulestore.hpp"
#include "lexverify/similarity.hpp"
#include "lexverify/verify.hpp"

namespace lexverify {

struct EmbeddingEndpoint {
    std::string base_url;  // empty selects the offline trigram provider
    std::string auth_token;
    int timeout_ms = 5000;
};

struct FormalizerEndpoint {
    std::string base_url;  // empty selects the deterministic echo fallback
    std::string model;
    int timeout_ms = 15000;
    std::string prompt_template;  // path to a template file; empty = built-in
};

// All tunables in one file. Paths are resolved relative to the directory
// containing the config file, so a data directory can be relocated whole.
struct Config {
    EmbeddingEndpoint embedding_service;
    FormalizerEndpoint formalizer;
    double dedup_threshold = 0.85;
    double match_floor = 0.5;
    std::string fpl_table;
    std::string alias_table;
    std::string ontology_seed;
    std::string ontology_extension;
    std::string rules;
    std::string corpus;
    std::size_t parallelism = 1;
    bool include_permission_rules = false;
    std::string base_dir;

    // base_dir-relative resolution; absolute paths and empty stay as-is.
    std::string resolve(const std::string& path) const;
};

// Parses one config file. Throws ConfigError on unreadable or invalid input.
Config load_config_file(const std::string& path);

// Precedence: explicit path, then the LEXVERIFY_CONFIG environment variable,
// then ./lexverify.json if present, then built-in defaults. Environment
// overrides (LEXVERIFY_EMBEDDING_URL, LEXVERIFY_FORMALIZER_URL,
// LEXVERIFY_PARALLELISM, ...) are applied on top.
Config resolve_config(const std::string& explicit_path = "");

void apply_env_overrides(Config& config);

// {"FPL": {"1": "1580.00", ...}} with exact decimal strings.
FunctionTables load_function_tables(const std::string& path);

AliasTable load_alias_table(const std::string& path);

// Everything verification needs, assembled from one config: the extended
// ontology, the typechecked rulebook, registered function tables, and
// factories for per-worker similarity providers and formalizer clients.
struct Engine {
    Config config;
    OntologyGraph ontology;
    RuleStore store;
    FunctionTables tables;
    AliasTable aliases;
    std::string prompt_template;  // loaded template text, empty = built-in

    VerifyOptions verify_options() const;
    ProviderFactory provider_factory() const;
    ClientFactory client_factory() const;
};

Engine load_engine(const Config& config);

}  // namespace lexverify
