// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
#include "lexverify/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lexverify/errors.hpp"

namespace lexverify {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ConfigError("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

const char* env(const char* name) { return std::getenv(name); }

std::size_t parse_count(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos != text.size() || v < 1) throw std::invalid_argument(text);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError(what + " must be a positive integer, got \"" + text + "\"");
    }
}

double parse_fraction(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size() || v < 0.0 || v > 1.0) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + " must be a number in [0, 1], got \"" + text + "\"");
    }
}

bool parse_flag(const std::string& text, const std::string& what) {
    if (text == "1" || text == "true" || text == "yes") return true;
    if (text == "0" || text == "false" || text == "no") return false;
    throw ConfigError(what + " must be a boolean flag, got \"" + text + "\"");
}

Rational rational_field(const json& value, const std::string& where) {
    if (value.is_string()) {
        auto r = Rational::parse(value.get<std::string>());
        if (r) return *r;
        throw ConfigError(where + ": not a decimal value: " + value.get<std::string>());
    }
    if (value.is_number_integer()) {
        return Rational(value.get<long long>());
    }
    throw ConfigError(where + ": table entries must be decimal strings or integers");
}

}  // namespace

std::string Config::resolve(const std::string& path) const {
    if (path.empty() || base_dir.empty()) return path;
    const std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

Config load_config_file(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(path + ": config must be a JSON object");

    Config c;
    c.base_dir = std::filesystem::path(path).parent_path().string();
    if (c.base_dir.empty()) c.base_dir = ".";

    try {
        if (doc.contains("embedding_service")) {
            const auto& s = doc["embedding_service"];
            c.embedding_service.base_url = s.value("base_url", "");
            c.embedding_service.auth_token = s.value("auth_token", "");
            c.embedding_service.timeout_ms = s.value("timeout_ms", 5000);
        }
        if (doc.contains("formalizer")) {
            const auto& s = doc["formalizer"];
            c.formalizer.base_url = s.value("base_url", "");
            c.formalizer.model = s.value("model", "");
            c.formalizer.timeout_ms = s.value("timeout_ms", 15000);
            c.formalizer.prompt_template = s.value("prompt_template", "");
        }
        if (doc.contains("thresholds")) {
            const auto& s = doc["thresholds"];
            c.dedup_threshold = s.value("dedup", 0.85);
            c.match_floor = s.value("match_floor", 0.5);
        }
        c.fpl_table = doc.value("fpl_table", "");
        c.alias_table = doc.value("alias_table", "");
        c.ontology_seed = doc.value("ontology_seed", "");
        c.ontology_extension = doc.value("ontology_extension", "");
        c.rules = doc.value("rules", "");
        c.corpus = doc.value("corpus", "");
        if (doc.contains("parallelism")) {
            const long long p = doc["parallelism"].get<long long>();
            if (p < 1) throw ConfigError(path + ": parallelism must be at least 1");
            c.parallelism = static_cast<std::size_t>(p);
        }
        c.include_permission_rules = doc.value("include_permission_rules", false);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (c.dedup_threshold < 0.0 || c.dedup_threshold > 1.0) {
        throw ConfigError(path + ": thresholds.dedup must be in [0, 1]");
    }
    if (c.match_floor < 0.0 || c.match_floor > 1.0) {
        throw ConfigError(path + ": thresholds.match_floor must be in [0, 1]");
    }
    return c;
}

void apply_env_overrides(Config& c) {
    if (const char* v = env("LEXVERIFY_EMBEDDING_URL")) c.embedding_service.base_url = v;
    if (const char* v = env("LEXVERIFY_EMBEDDING_TOKEN")) c.embedding_service.auth_token = v;
    if (const char* v = env("LEXVERIFY_FORMALIZER_URL")) c.formalizer.base_url = v;
    if (const char* v = env("LEXVERIFY_FORMALIZER_MODEL")) c.formalizer.model = v;
    if (const char* v = env("LEXVERIFY_PARALLELISM")) {
        c.parallelism = parse_count(v, "LEXVERIFY_PARALLELISM");
    }
    if (const char* v = env("LEXVERIFY_DEDUP_THRESHOLD")) {
        c.dedup_threshold = parse_fraction(v, "LEXVERIFY_DEDUP_THRESHOLD");
    }
    if (const char* v = env("LEXVERIFY_MATCH_FLOOR")) {
        c.match_floor = parse_fraction(v, "LEXVERIFY_MATCH_FLOOR");
    }
    if (const char* v = env("LEXVERIFY_INCLUDE_PERMISSION_RULES")) {
        c.include_permission_rules = parse_flag(v, "LEXVERIFY_INCLUDE_PERMISSION_RULES");
    }
}

Config resolve_config(const std::string& explicit_path) {
    Config c;
    if (!explicit_path.empty()) {
        c = load_config_file(explicit_path);
    } else if (const char* v = env("LEXVERIFY_CONFIG"); v && *v) {
        c = load_config_file(v);
    } else if (std::filesystem::exists("lexverify.json")) {
        c = load_config_file("lexverify.json");
    } else {
        c.base_dir = ".";
    }
    apply_env_overrides(c);
    return c;
}

FunctionTables load_function_tables(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(path + ": expected {function: {arg: value}}");
    FunctionTables tables;
    for (const auto& [fn, rows] : doc.items()) {
        if (!rows.is_object()) throw ConfigError(path + ": table " + fn + " must be an object");
        auto& table = tables[fn];
        for (const auto& [arg, value] : rows.items()) {
            auto key = Rational::parse(arg);
            if (!key) throw ConfigError(path + ": " + fn + ": bad argument " + arg);
            if (!table.emplace(*key, rational_field(value, path + ": " + fn)).second) {
                throw ConfigError(path + ": " + fn + ": duplicate argument " + arg);
            }
        }
    }
    return tables;
}

AliasTable load_alias_table(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(path + ": expected {label: [phrases]}");
    AliasTable table;
    try {
        for (const auto& [label, phrases] : doc.items()) {
            for (const auto& phrase : phrases) {
                table[label].push_back(phrase.get<std::string>());
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return table;
}

VerifyOptions Engine::verify_options() const {
    VerifyOptions options;
    options.tables = tables;
    options.include_permission_rules = config.include_permission_rules;
    options.assertion_options.match_floor = config.match_floor;
    options.assertion_options.template_text = prompt_template;
    return options;
}

ProviderFactory Engine::provider_factory() const {
    if (config.embedding_service.base_url.empty()) {
        const AliasTable table = aliases;
        return [table] {
            return std::unique_ptr<SimilarityProvider>(new OfflineTrigramProvider(table));
        };
    }
    const EmbeddingEndpoint ep = config.embedding_service;
    return [ep] {
        return std::unique_ptr<SimilarityProvider>(
            new EmbeddingServiceProvider(ep.base_url, ep.auth_token, ep.timeout_ms));
    };
}

ClientFactory Engine::client_factory() const {
    if (config.formalizer.base_url.empty()) {
        return [] { return std::unique_ptr<FormalizerClient>(new EchoFallbackClient()); };
    }
    const FormalizerEndpoint ep = config.formalizer;
    return [ep] {
        return std::unique_ptr<FormalizerClient>(
            new HttpFormalizerClient(ep.base_url, ep.model, ep.timeout_ms));
    };
}

Engine load_engine(const Config& config) {
    Engine engine;
    engine.config = config;

    if (config.ontology_seed.empty()) {
        throw ConfigError("config names no ontology_seed");
    }
    engine.ontology = OntologyGraph::seed(read_file(config.resolve(config.ontology_seed)));
    if (!config.ontology_extension.empty()) {
        engine.ontology.extend(read_file(config.resolve(config.ontology_extension)));
    }
    if (!config.fpl_table.empty()) {
        engine.tables = load_function_tables(config.resolve(config.fpl_table));
    }
    if (!config.alias_table.empty()) {
        engine.aliases = load_alias_table(config.resolve(config.alias_table));
    }
    if (!config.formalizer.prompt_template.empty()) {
        engine.prompt_template = read_file(config.resolve(config.formalizer.prompt_template));
    }
    if (!config.rules.empty()) {
        // The eligibility conclusion and registered table functions are part
        // of the rule vocabulary even when the ontology does not list them.
        Vocabulary vocab = engine.ontology.vocabulary();
        vocab.concepts.emplace("Applicant_Eligible", ValueKind::Boolean);
        for (const auto& [fn, rows] : engine.tables) vocab.functions.insert(fn);
        engine.store.load_json(read_file(config.resolve(config.rules)), vocab);
    }
    return engine;
}

}  // namespace lexverify
