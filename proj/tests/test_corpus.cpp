// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#include "lexverify/corpus.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "lexverify/errors.hpp"

using namespace lexverify;

namespace {

ClauseRecord clause(std::string citation, std::string text,
                    std::vector<std::string> refs = {}) {
    ClauseRecord r;
    r.citation = std::move(citation);
    r.text = std::move(text);
    r.references = std::move(refs);
    return r;
}

// Breadth-first reachability oracle over raw reference lists, written
// independently of the graph type's own traversal.
std::set<std::string> bfs_oracle(const std::vector<ClauseRecord>& docs, const std::string& start,
                                 std::size_t depth) {
    std::set<std::string> present;
    for (const auto& d : docs) present.insert(d.citation);
    std::set<std::string> layer{start};
    std::set<std::string> seen{start};
    std::set<std::string> out;
    for (std::size_t hop = 0; hop < depth; ++hop) {
        std::set<std::string> next;
        for (const auto& c : layer) {
            for (const auto& d : docs) {
                if (d.citation != c) continue;
                for (const auto& ref : d.references) {
                    if (present.count(ref) && !seen.count(ref)) {
                        seen.insert(ref);
                        next.insert(ref);
                        out.insert(ref);
                    }
                }
            }
        }
        layer = next;
    }
    return out;
}

}  // namespace

TEST_CASE("citation grammar accepts dotted section numbers only") {
    CHECK(is_valid_citation("MPP 63-401.1"));
    CHECK(is_valid_citation("MPP 63-300"));
    CHECK(is_valid_citation("MPP 63-502.36"));
    CHECK(is_valid_citation("MPP 63-503.321"));
    CHECK_FALSE(is_valid_citation("MPP 63-"));
    CHECK_FALSE(is_valid_citation("MPP 63"));
    CHECK_FALSE(is_valid_citation("63-401.1"));
    CHECK_FALSE(is_valid_citation("MPP 63-401."));
    CHECK_FALSE(is_valid_citation("MPP  63-401.1"));
    CHECK_FALSE(is_valid_citation("mpp 63-401.1"));
    CHECK_FALSE(is_valid_citation(""));
}

TEST_CASE("citation normalization repairs source-text variants") {
    CHECK(normalize_citation("MPP \xC2\xA7""63-401.1") == "MPP 63-401.1");
    CHECK(normalize_citation("MPP 63\xE2\x80\x93""401.1") == "MPP 63-401.1");
    CHECK(normalize_citation("MPP\xC2\xA0""63-402") == "MPP 63-402");
    CHECK(normalize_citation("  MPP   63-300  ") == "MPP 63-300");
    CHECK(normalize_citation("MPP 63-401.1") == "MPP 63-401.1");
}

TEST_CASE("ingest builds a single node for a lone clause") {
    auto g = CorpusGraph::ingest(
        {clause("MPP 63-401.1", "A household shall be considered a resident...")});
    CHECK(g.nodes().size() == 1);
    CHECK(g.edges().empty());
    CHECK(g.warnings().empty());
    CHECK(g.clause("MPP 63-401.1").text == "A household shall be considered a resident...");
}

TEST_CASE("ingest of nothing yields the empty graph") {
    auto g = CorpusGraph::ingest({});
    CHECK(g.nodes().empty());
    CHECK(g.edges().empty());
    CHECK(g.warnings().empty());
}

TEST_CASE("ingest wires one edge per resolvable reference") {
    std::vector<ClauseRecord> docs = {
        clause("MPP 63-100", "a", {"MPP 63-200", "MPP 63-300"}),
        clause("MPP 63-200", "b", {"MPP 63-300"}),
        clause("MPP 63-300", "c"),
    };
    // Count expected edges straight off the reference lists.
    std::size_t expected = 0;
    for (const auto& d : docs) expected += d.references.size();
    auto g = CorpusGraph::ingest(docs);
    CHECK(g.nodes().size() == 3);
    CHECK(g.edges().size() == expected);
    CHECK(g.edges().count({"MPP 63-100", "MPP 63-200"}) == 1);
    CHECK(g.edges().count({"MPP 63-100", "MPP 63-300"}) == 1);
    CHECK(g.edges().count({"MPP 63-200", "MPP 63-300"}) == 1);
}

TEST_CASE("ingest rejects duplicates, bad citations, and empty text") {
    CHECK_THROWS_AS(CorpusGraph::ingest({clause("MPP 63-100", "a"), clause("MPP 63-100", "b")}),
                    DuplicateCitation);
    CHECK_THROWS_AS(CorpusGraph::ingest({clause("WIC 18901", "a")}), MalformedCitation);
    CHECK_THROWS_AS(CorpusGraph::ingest({clause("MPP 63-100", "")}), EmptyClauseText);
    CHECK_THROWS_AS(CorpusGraph::ingest({clause("MPP 63-100", "a", {"bogus"})}),
                    MalformedCitation);
}

TEST_CASE("dangling references flag a warning instead of failing") {
    auto g = CorpusGraph::ingest({clause("MPP 63-100", "a", {"MPP 63-999"})});
    CHECK(g.nodes().size() == 1);
    CHECK(g.edges().empty());
    REQUIRE(g.warnings().size() == 1);
    CHECK(g.warnings()[0].find("MPP 63-999") != std::string::npos);
}

TEST_CASE("neighbors at depth zero is empty and depth one follows direct edges") {
    std::vector<ClauseRecord> docs = {
        clause("MPP 63-100", "a", {"MPP 63-200"}),
        clause("MPP 63-200", "b", {"MPP 63-300"}),
        clause("MPP 63-300", "c"),
    };
    auto g = CorpusGraph::ingest(docs);
    CHECK(g.neighbors("MPP 63-100", 0).empty());
    CHECK(g.neighbors("MPP 63-100", 1) == std::set<std::string>{"MPP 63-200"});
    CHECK(g.neighbors("MPP 63-100", 2) ==
          std::set<std::string>{"MPP 63-200", "MPP 63-300"});
    CHECK_THROWS_AS(g.neighbors("MPP 63-777", 1), UnknownCitation);
}

TEST_CASE("neighbors matches an independent breadth-first oracle on random graphs") {
    std::mt19937 rng(40291);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::string> names;
        for (int i = 0; i < 10; ++i) names.push_back("MPP 63-" + std::to_string(100 + i));
        std::vector<ClauseRecord> docs;
        for (const auto& n : names) {
            std::vector<std::string> refs;
            for (const auto& m : names) {
                if (m != n && rng() % 4 == 0) refs.push_back(m);
            }
            docs.push_back(clause(n, "text " + n, refs));
        }
        auto g = CorpusGraph::ingest(docs);
        for (std::size_t depth : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
            for (const auto& n : names) {
                CHECK(g.neighbors(n, depth) == bfs_oracle(docs, n, depth));
            }
        }
    }
}

TEST_CASE("neighbors grows monotonically with depth") {
    std::mt19937 rng(555);
    std::vector<std::string> names;
    for (int i = 0; i < 8; ++i) names.push_back("MPP 63-" + std::to_string(400 + i));
    std::vector<ClauseRecord> docs;
    for (const auto& n : names) {
        std::vector<std::string> refs;
        for (const auto& m : names) {
            if (m != n && rng() % 3 == 0) refs.push_back(m);
        }
        docs.push_back(clause(n, "t", refs));
    }
    auto g = CorpusGraph::ingest(docs);
    for (const auto& n : names) {
        for (std::size_t d = 0; d < 4; ++d) {
            auto small = g.neighbors(n, d);
            auto large = g.neighbors(n, d + 1);
            CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));
        }
    }
}

TEST_CASE("ingest order does not affect the graph") {
    std::vector<ClauseRecord> docs = {
        clause("MPP 63-100", "a", {"MPP 63-200"}),
        clause("MPP 63-200", "b", {"MPP 63-100", "MPP 63-300"}),
        clause("MPP 63-300", "c"),
    };
    auto forward = CorpusGraph::ingest(docs);
    std::vector<ClauseRecord> shuffled = {docs[2], docs[0], docs[1]};
    auto backward = CorpusGraph::ingest(shuffled);
    CHECK(forward.edges() == backward.edges());
    REQUIRE(forward.nodes().size() == backward.nodes().size());
    for (const auto& [citation, rec] : forward.nodes()) {
        CHECK(backward.clause(citation).text == rec.text);
    }
}

TEST_CASE("JSON round-trip preserves the graph exactly") {
    std::vector<ClauseRecord> docs = {
        clause("MPP 63-100", "first clause", {"MPP 63-200"}),
        clause("MPP 63-200", "second clause"),
    };
    docs[0].effective_date = "2024-10-01";
    docs[1].domain_hint = "Residency";
    auto g = CorpusGraph::ingest(docs);
    auto g2 = CorpusGraph::ingest_json(g.to_json());
    CHECK(g2.edges() == g.edges());
    REQUIRE(g2.nodes().size() == g.nodes().size());
    for (const auto& [citation, rec] : g.nodes()) {
        const auto& other = g2.clause(citation);
        CHECK(other.text == rec.text);
        CHECK(other.effective_date == rec.effective_date);
        CHECK(other.references == rec.references);
        CHECK(other.domain_hint == rec.domain_hint);
    }
    CHECK(g2.to_json() == g.to_json());
}

TEST_CASE("cycles are allowed") {
    auto g = CorpusGraph::ingest({
        clause("MPP 63-100", "a", {"MPP 63-200"}),
        clause("MPP 63-200", "b", {"MPP 63-100"}),
    });
    CHECK(g.edges().size() == 2);
    CHECK(g.neighbors("MPP 63-100", 5) == std::set<std::string>{"MPP 63-200"});
}

TEST_CASE("DOT export names every node and edge") {
    auto g = CorpusGraph::ingest({
        clause("MPP 63-100", "a", {"MPP 63-200"}),
        clause("MPP 63-200", "b"),
    });
    std::string dot = g.to_dot();
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("\"MPP 63-100\"") != std::string::npos);
    CHECK(dot.find("\"MPP 63-100\" -> \"MPP 63-200\"") != std::string::npos);
}
