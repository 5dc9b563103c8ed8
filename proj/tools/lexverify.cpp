// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Exit codes: 0 clean, 1 when any per-case error
// was recorded, 2 for configuration problems (bad config file, unreadable
// inputs, unusable command line).
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lexverify/abox.hpp"
#include "lexverify/config.hpp"
#include "lexverify/corpus.hpp"
#include "lexverify/errors.hpp"
#include "lexverify/eval.hpp"
#include "lexverify/extraction.hpp"
#include "lexverify/ontology.hpp"
#include "lexverify/rulestore.hpp"
#include "lexverify/verify.hpp"

namespace {

using namespace lexverify;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ConfigError("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spill(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out.good()) throw ConfigError("cannot write " + path);
    out << body;
    if (!out.good()) throw ConfigError("cannot write " + path);
}

int cmd_ingest(const std::string& path, const std::string& dot_path,
               const std::string& json_path) {
    const CorpusGraph graph = CorpusGraph::ingest_json(slurp(path));
    for (const auto& warning : graph.warnings()) {
        std::cerr << "warning: " << warning << "\n";
    }
    std::cout << "clauses: " << graph.nodes().size()
              << "  references: " << graph.edges().size()
              << "  warnings: " << graph.warnings().size() << "\n";
    if (!dot_path.empty()) spill(dot_path, graph.to_dot());
    if (!json_path.empty()) spill(json_path, graph.to_json());
    return 0;
}

int cmd_ontology_seed(const Config& config, const std::string& path) {
    std::string seed_path = path;
    if (seed_path.empty()) seed_path = config.resolve(config.ontology_seed);
    if (seed_path.empty()) throw ConfigError("no seed document given or configured");
    const OntologyGraph onto = OntologyGraph::seed(slurp(seed_path));
    std::cout << "domains: " << onto.domains().size()
              << "  concepts: " << onto.concepts().size() << "\n";
    for (const auto& [label, info] : onto.domains()) {
        std::size_t members = 0;
        for (const auto& [_, c] : onto.concepts()) {
            if (c.domain == label) ++members;
        }
        std::cout << "  " << label << ": " << members << " concepts\n";
    }
    return 0;
}

// Candidate file: array of objects with label, domain, and optionally
// definition, citation, conceptType.
int cmd_ontology_integrate(const Engine& engine, const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(slurp(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    if (!doc.is_array()) throw ConfigError(path + ": expected an array of candidates");

    OntologyGraph onto = engine.ontology;
    auto provider = engine.provider_factory()();
    for (const auto& item : doc) {
        Concept candidate;
        candidate.label = item.value("label", "");
        candidate.domain = item.value("domain", "");
        candidate.definition = item.value("definition", "");
        candidate.citation = item.value("citation", "");
        if (item.contains("conceptType")) {
            const std::string kind_text = item["conceptType"].get<std::string>();
            const auto kind = value_kind_from_string(kind_text);
            if (!kind) throw ConfigError(path + ": unknown conceptType " + kind_text);
            candidate.value_kind = *kind;
        } else {
            candidate.value_kind = default_value_kind(candidate.label);
        }
        const IntegrationOutcome outcome = onto.integrate(candidate, *provider);
        if (outcome.kind == IntegrationOutcome::Kind::Added) {
            std::cout << "added " << outcome.label << "\n";
        } else {
            char score[32];
            std::snprintf(score, sizeof score, "%.3f", outcome.score);
            std::cout << "merged " << candidate.label << " -> " << outcome.label
                      << " (score " << score << ")\n";
        }
    }
    std::cout << "concepts: " << onto.concepts().size() << "\n";
    return 0;
}

int cmd_ontology_diagnostics(const Engine& engine) {
    OntologyGraph onto = engine.ontology;
    auto provider = engine.provider_factory()();
    onto.ensure_embeddings(*provider);
    const ClusterDiagnostics d = onto.cluster_diagnostics();
    char line[128];
    std::snprintf(line, sizeof line, "intra: %.4f  inter: %.4f", d.intra, d.inter);
    std::cout << line << "\n";
    for (const auto& row : d.per_domain) {
        std::snprintf(line, sizeof line, "  %-24s pairs: %-4zu intra: %.4f",
                      row.domain.c_str(), row.pair_count, row.intra);
        std::cout << line << "\n";
    }
    return 0;
}

int cmd_rules_add(Engine& engine, const std::string& path) {
    Vocabulary vocab = engine.ontology.vocabulary();
    vocab.concepts.emplace("Applicant_Eligible", ValueKind::Boolean);
    for (const auto& [fn, _] : engine.tables) vocab.functions.insert(fn);
    const std::size_t before = engine.store.rules().size();
    engine.store.load_json(slurp(path), vocab);
    const std::size_t after = engine.store.rules().size();
    std::cout << "added " << (after - before) << " rules, rulebook holds "
              << after << "\n";
    return 0;
}

int cmd_rules_list(const Engine& engine) {
    for (const auto& rule : engine.store.rules()) {
        std::cout << rule.id << "  " << rule.citation << "  "
                  << to_string(rule.modality) << "\n    "
                  << print(rule.logic) << "\n";
    }
    std::cout << "rules: " << engine.store.rules().size() << "\n";
    return 0;
}

int cmd_formalize(const Engine& engine, const std::string& clause) {
    auto provider = engine.provider_factory()();
    auto client = engine.client_factory()();
    const Vocabulary full = engine.ontology.vocabulary();

    const auto spans = segment(clause, SegmentMode::Explanation, "cli");
    if (spans.empty()) throw ConfigError("clause is empty");

    int failures = 0;
    for (const auto& span : spans) {
        const ConceptMatch match =
            match_concepts(span, engine.ontology, *provider, engine.config.match_floor);
        FormalizationRequest request;
        request.clause = span.text;
        request.template_text = engine.prompt_template;
        for (const auto& label : match.labels) {
            request.vocab.concepts.emplace(label, full.concepts.at(label));
        }
        const FormalizationResult result =
            formalize(request, *client, engine.verify_options().assertion_options.max_attempts);
        if (result.ok()) {
            for (const auto& expr : result.parsed) {
                std::cout << print(expr) << "\n";
            }
        } else {
            ++failures;
            std::cerr << "error: clause " << span.index << ": "
                      << result.failure.value_or("formalization failed") << "\n";
        }
    }
    return failures == 0 ? 0 : 1;
}

int cmd_verify(const Engine& engine, const std::string& case_path,
               const std::string& dot_path, const std::string& trace_path) {
    auto provider = engine.provider_factory()();
    auto client = engine.client_factory()();
    const Vocabulary vocab = engine.ontology.vocabulary();
    const CaseRecord record = load_case_file(case_path, vocab);
    const CaseReport report = verify_case(record, engine.store, engine.ontology,
                                          *provider, *client, engine.verify_options());
    std::cout << result_to_json(report) << "\n";
    if (!dot_path.empty()) spill(dot_path, violation_graph_dot(report));
    if (!trace_path.empty()) {
        std::string trace;
        for (const auto& line : report.result.trace) {
            trace += line;
            trace += '\n';
        }
        spill(trace_path, trace);
    }
    return 0;
}

int cmd_evaluate(const Engine& engine, const std::string& dir, bool relaxed,
                 const std::string& report_path) {
    EvalOptions options;
    options.verify = engine.verify_options();
    options.relaxed_citations = relaxed;
    options.parallelism = engine.config.parallelism;
    const EvaluationReport report =
        run_dataset(dir, engine.store, engine.ontology, engine.provider_factory(),
                    engine.client_factory(), options);
    std::cout << report_to_text(report);
    if (!report_path.empty()) spill(report_path, report_to_json(report));
    return report.failures == 0 ? 0 : 1;
}

int cmd_export_graph(const Engine& engine, const std::string& path) {
    spill(path, engine.ontology.to_dot());
    std::cout << "wrote " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Checks eligibility explanations against formalized statutes."};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "Config file (default: $LEXVERIFY_CONFIG, then ./lexverify.json)");

    auto* ingest = app.add_subcommand("ingest", "Load a statute corpus file");
    std::string corpus_path, ingest_dot, ingest_json;
    ingest->add_option("corpus", corpus_path, "Corpus JSON file")->required();
    ingest->add_option("--dot", ingest_dot, "Write the citation graph as DOT");
    ingest->add_option("--json", ingest_json, "Write the graph back as JSON");

    auto* ontology = app.add_subcommand("ontology", "Ontology operations");
    ontology->require_subcommand(1);
    auto* onto_seed = ontology->add_subcommand("seed", "Build and summarize a seed ontology");
    std::string seed_path;
    onto_seed->add_option("seed", seed_path, "Seed document (default: configured seed)");
    auto* onto_integrate =
        ontology->add_subcommand("integrate", "Run candidate concepts through the dedup gate");
    std::string candidates_path;
    onto_integrate->add_option("candidates", candidates_path, "Candidate concepts JSON")
        ->required();
    auto* onto_diag =
        ontology->add_subcommand("diagnostics", "Embedding cluster distances per domain");

    auto* rules = app.add_subcommand("rules", "Rulebook operations");
    rules->require_subcommand(1);
    auto* rules_add = rules->add_subcommand("add", "Typecheck rules from a JSON file");
    std::string rules_path;
    rules_add->add_option("rules", rules_path, "Rules JSON file")->required();
    auto* rules_list = rules->add_subcommand("list", "List the loaded rulebook");

    auto* formalize_cmd =
        app.add_subcommand("formalize", "Formalize one explanation clause");
    std::string clause_text;
    formalize_cmd->add_option("clause", clause_text, "Explanation clause text")->required();

    auto* verify_cmd = app.add_subcommand("verify", "Verify one case file");
    std::string case_path, verify_dot, verify_trace;
    verify_cmd->add_option("case", case_path, "Case JSON file")->required();
    verify_cmd->add_option("--export-dot", verify_dot, "Write the violation graph as DOT");
    verify_cmd->add_option("--trace", verify_trace, "Write the solver trace");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a case dataset directory");
    std::string dataset_dir, report_path;
    bool relaxed = false;
    evaluate_cmd->add_option("dataset", dataset_dir, "Directory of case JSON files")
        ->required();
    evaluate_cmd->add_flag("--relaxed-citations", relaxed,
                           "Match citations at section granularity");
    evaluate_cmd->add_option("--report", report_path, "Write the JSON report");

    auto* export_cmd = app.add_subcommand("export-graph", "Write the ontology graph as DOT");
    std::string graph_path;
    export_cmd->add_option("path", graph_path, "Output DOT file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(corpus_path, ingest_dot, ingest_json);

        const Config config = resolve_config(config_path);
        if (ontology->parsed() && onto_seed->parsed()) {
            return cmd_ontology_seed(config, seed_path);
        }

        Engine engine = load_engine(config);
        if (ontology->parsed() && onto_integrate->parsed()) {
            return cmd_ontology_integrate(engine, candidates_path);
        }
        if (ontology->parsed() && onto_diag->parsed()) {
            return cmd_ontology_diagnostics(engine);
        }
        if (rules->parsed() && rules_add->parsed()) return cmd_rules_add(engine, rules_path);
        if (rules->parsed() && rules_list->parsed()) return cmd_rules_list(engine);
        if (formalize_cmd->parsed()) return cmd_formalize(engine, clause_text);
        if (verify_cmd->parsed()) {
            return cmd_verify(engine, case_path, verify_dot, verify_trace);
        }
        if (evaluate_cmd->parsed()) {
            return cmd_evaluate(engine, dataset_dir, relaxed, report_path);
        }
        if (export_cmd->parsed()) return cmd_export_graph(engine, graph_path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
