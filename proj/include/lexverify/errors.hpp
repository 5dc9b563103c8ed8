// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lexverify {

// Base class for all typed failures raised by the engine. Callers that need
// to distinguish causes catch the concrete type; everything carries a
// human-readable message suitable for CLI output.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// corpus
class DuplicateCitation : public Error {
public:
    explicit DuplicateCitation(const std::string& c) : Error("duplicate citation: " + c), citation(c) {}
    std::string citation;
};
class MalformedCitation : public Error {
public:
    explicit MalformedCitation(const std::string& c) : Error("malformed citation: " + c), citation(c) {}
    std::string citation;
};
class EmptyClauseText : public Error {
public:
    explicit EmptyClauseText(const std::string& c) : Error("empty clause text for " + c), citation(c) {}
    std::string citation;
};
class UnknownCitation : public Error {
public:
    explicit UnknownCitation(const std::string& c) : Error("unknown citation: " + c), citation(c) {}
    std::string citation;
};

// ontology
class MalformedSeed : public Error {
public:
    explicit MalformedSeed(const std::string& detail) : Error("malformed ontology seed: " + detail) {}
};
class DuplicateLabel : public Error {
public:
    explicit DuplicateLabel(const std::string& l) : Error("duplicate concept label: " + l), label(l) {}
    std::string label;
};
class UnknownDomain : public Error {
public:
    explicit UnknownDomain(const std::string& d) : Error("unknown domain: " + d), domain(d) {}
    std::string domain;
};
class MissingEmbedding : public Error {
public:
    explicit MissingEmbedding(const std::string& l) : Error("concept has no embedding: " + l), label(l) {}
    std::string label;
};

// logic parser
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t pos, const std::string& expected, const std::string& got)
        : Error("syntax error at offset " + std::to_string(pos) + ": expected " + expected + ", got " + got),
          position(pos), expected_tokens(expected) {}
    std::size_t position;
    std::string expected_tokens;
};
class ArityError : public Error {
public:
    ArityError(const std::string& op, std::size_t got)
        : Error("operator " + op + " applied to " + std::to_string(got) + " arguments"),
          op_name(op), arity(got) {}
    std::string op_name;
    std::size_t arity;
};

// rulestore
class DuplicateId : public Error {
public:
    explicit DuplicateId(const std::string& id) : Error("duplicate rule id: " + id), rule_id(id) {}
    std::string rule_id;
};
class DuplicateRule : public Error {
public:
    explicit DuplicateRule(const std::string& existing)
        : Error("rule duplicates existing rule " + existing), existing_id(existing) {}
    std::string existing_id;
};
class TypecheckFailed : public Error {
public:
    explicit TypecheckFailed(const std::string& detail) : Error("typecheck failed: " + detail) {}
};

// abox
class FactKindMismatch : public Error {
public:
    FactKindMismatch(const std::string& l, const std::string& detail)
        : Error("fact kind mismatch for " + l + ": " + detail), label(l) {}
    std::string label;
};
class UnmappableExplanation : public Error {
public:
    explicit UnmappableExplanation(const std::string& detail)
        : Error("no explanation clause produced a rule: " + detail) {}
};
class MalformedCase : public Error {
public:
    explicit MalformedCase(const std::string& detail) : Error("malformed case record: " + detail) {}
};

// verify
class MissingTableEntry : public Error {
public:
    MissingTableEntry(const std::string& fn, const std::string& arg)
        : Error("no table entry for " + fn + "(" + arg + ")"), function(fn), argument(arg) {}
    std::string function;
    std::string argument;
};
class FragmentExceeded : public Error {
public:
    explicit FragmentExceeded(const std::string& detail)
        : Error("constraint set left the supported fragment: " + detail) {}
};
class EmptyEnvironment : public Error {
public:
    explicit EmptyEnvironment(const std::string& detail)
        : Error("rule retrieval produced an empty environment: " + detail) {}
};

// clients / config
class ClientUnavailable : public Error {
public:
    explicit ClientUnavailable(const std::string& detail) : Error("client unavailable: " + detail) {}
};
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& detail) : Error("configuration error: " + detail) {}
};

}  // namespace lexverify
