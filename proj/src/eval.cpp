// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0
#include "lexverify/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <thread>

#include "lexverify/errors.hpp"
#include "nlohmann/json.hpp"

namespace lexverify {
namespace {

using nlohmann::json;

std::string squeeze_spaces(const std::string& text) {
    std::string out;
    bool pending = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(c);
    }
    return out;
}

std::set<std::string> normalize_set(const std::set<std::string>& citations, bool relaxed) {
    std::set<std::string> out;
    for (const auto& c : citations) {
        std::string n = squeeze_spaces(c);
        if (relaxed) n = citation_prefix(n);
        out.insert(std::move(n));
    }
    return out;
}

}  // namespace

std::string citation_prefix(const std::string& citation) {
    const auto dot = citation.rfind('.');
    if (dot == std::string::npos) return citation;
    return citation.substr(0, dot);
}

F1Result violation_f1(const std::set<std::string>& predicted,
                      const std::set<std::string>& expected, bool relaxed) {
    const std::set<std::string> pred = normalize_set(predicted, relaxed);
    const std::set<std::string> exp = normalize_set(expected, relaxed);

    std::size_t inter = 0;
    for (const auto& c : pred) inter += exp.count(c);

    F1Result r;
    r.precision = pred.empty() ? (exp.empty() ? 1.0 : 0.0)
                               : static_cast<double>(inter) / static_cast<double>(pred.size());
    r.recall = exp.empty() ? (pred.empty() ? 1.0 : 0.0)
                           : static_cast<double>(inter) / static_cast<double>(exp.size());
    if (r.precision + r.recall == 0.0) {
        r.f1.reset();
    } else {
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    }
    return r;
}

double smt_accuracy(const std::vector<std::pair<Status, Legality>>& results) {
    if (results.empty()) return 1.0;
    std::size_t agree = 0;
    for (const auto& [status, legality] : results) {
        const bool sat = status == Status::Sat;
        const bool upheld = legality == Legality::Upheld;
        if (sat == upheld) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(results.size());
}

namespace {

// Everything one case contributes to the aggregate, computed workers-side
// so the reduce below is a pure fold in file order.
struct CaseOutcome {
    CaseDetail detail;
    bool has_gt = false;
    bool smt_agree = false;
    std::size_t inter = 0;  // citation instances, after normalization
    std::size_t pred = 0;
    std::size_t exp = 0;
    std::optional<double> case_f1;
};

struct Accum {
    std::size_t count = 0;
    std::size_t gt_cases = 0;
    std::size_t smt_agree = 0;
    std::size_t inter = 0;
    std::size_t pred = 0;
    std::size_t exp = 0;
    double f1_sum = 0.0;
    std::size_t f1_cases = 0;

    void add(const CaseOutcome& o) {
        ++count;
        if (!o.has_gt) return;
        ++gt_cases;
        if (o.smt_agree) ++smt_agree;
        inter += o.inter;
        pred += o.pred;
        exp += o.exp;
        if (o.case_f1) {
            f1_sum += *o.case_f1;
            ++f1_cases;
        }
    }
};

MetricRow to_row(const std::string& category, const std::string& group, const Accum& a) {
    MetricRow row;
    row.category = category;
    row.status_group = group;
    row.count = a.count;
    if (a.gt_cases == 0) return row;

    const double p = a.pred == 0 ? (a.exp == 0 ? 1.0 : 0.0)
                                 : static_cast<double>(a.inter) / static_cast<double>(a.pred);
    const double r = a.exp == 0 ? (a.pred == 0 ? 1.0 : 0.0)
                                : static_cast<double>(a.inter) / static_cast<double>(a.exp);
    row.precision = p;
    row.recall = r;
    if (p + r > 0.0) row.f1 = 2.0 * p * r / (p + r);
    if (a.f1_cases > 0) row.macro_f1 = a.f1_sum / static_cast<double>(a.f1_cases);
    row.smt_accuracy = static_cast<double>(a.smt_agree) / static_cast<double>(a.gt_cases);
    return row;
}

CaseOutcome evaluate_one(const std::filesystem::path& path, const RuleStore& store,
                         const OntologyGraph& onto, const Vocabulary& vocab,
                         SimilarityProvider& provider, FormalizerClient& client,
                         const EvalOptions& options) {
    CaseOutcome out;
    out.detail.case_id = path.stem().string();
    out.detail.predicted_status = "error";
    try {
        const CaseRecord record = load_case_file(path.string(), vocab);
        out.detail.case_id = record.case_id;
        out.detail.category = record.category.empty() ? "uncategorized" : record.category;
        if (record.ground_truth) {
            out.detail.expected_status =
                record.ground_truth->legality == Legality::Upheld ? "sat" : "unsat";
            out.detail.expected_citations = record.ground_truth->violated_citations;
        }

        const CaseReport report =
            verify_case(record, store, onto, provider, client, options.verify);
        out.detail.predicted_status = to_string(report.result.status);
        std::set<std::string> cited;
        for (const auto& item : report.result.core) {
            if (item.tag.kind == ItemTag::Kind::Rule) cited.insert(item.tag.citation);
        }
        out.detail.predicted_citations.assign(cited.begin(), cited.end());

        if (record.ground_truth) {
            out.has_gt = true;
            out.smt_agree = (report.result.status == Status::Sat) ==
                            (record.ground_truth->legality == Legality::Upheld);
            const std::set<std::string> expected(out.detail.expected_citations.begin(),
                                                 out.detail.expected_citations.end());
            const F1Result f1 = violation_f1(cited, expected, options.relaxed_citations);
            const std::set<std::string> np = normalize_set(cited, options.relaxed_citations);
            const std::set<std::string> ne = normalize_set(expected, options.relaxed_citations);
            out.pred = np.size();
            out.exp = ne.size();
            for (const auto& c : np) out.inter += ne.count(c);
            out.case_f1 = f1.f1;
        }
    } catch (const std::exception& e) {
        out.detail.predicted_status = "error";
        out.detail.error = e.what();
        out.has_gt = false;
    }
    return out;
}

int group_order(const std::string& group) {
    if (group == "all") return 0;
    if (group == "sat") return 1;
    if (group == "unsat") return 2;
    return 3;
}

std::optional<double> round4(const std::optional<double>& v) {
    if (!v) return std::nullopt;
    return std::round(*v * 10000.0) / 10000.0;
}

json metric_json(const std::optional<double>& v) {
    const auto r = round4(v);
    if (!r) return nullptr;
    return *r;
}

json row_json(const MetricRow& row) {
    json j;
    j["category"] = row.category;
    j["status_group"] = row.status_group;
    j["count"] = row.count;
    j["violation_precision"] = metric_json(row.precision);
    j["violation_recall"] = metric_json(row.recall);
    j["violation_f1"] = metric_json(row.f1);
    j["macro_f1"] = metric_json(row.macro_f1);
    j["smt_accuracy"] = metric_json(row.smt_accuracy);
    return j;
}

std::string metric_cell(const std::optional<double>& v) {
    const auto r = round4(v);
    if (!r) return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *r);
    return buf;
}

}  // namespace

EvaluationReport run_dataset(const std::string& dir, const RuleStore& store,
                             const OntologyGraph& onto, const ProviderFactory& make_provider,
                             const ClientFactory& make_client, const EvalOptions& options) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    if (fs::exists(dir)) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                files.push_back(entry.path());
            }
        }
    }
    std::sort(files.begin(), files.end());

    const Vocabulary vocab = onto.vocabulary();
    std::vector<CaseOutcome> outcomes(files.size());

    const std::size_t workers =
        std::max<std::size_t>(1, std::min(options.parallelism, files.size()));
    if (workers <= 1) {
        auto provider = make_provider();
        auto client = make_client();
        for (std::size_t i = 0; i < files.size(); ++i) {
            outcomes[i] =
                evaluate_one(files[i], store, onto, vocab, *provider, *client, options);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto work = [&]() {
            auto provider = make_provider();
            auto client = make_client();
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= files.size()) return;
                outcomes[i] =
                    evaluate_one(files[i], store, onto, vocab, *provider, *client, options);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // Deterministic reduce in file order, independent of completion order.
    EvaluationReport report;
    std::map<std::pair<std::string, std::string>, Accum> groups;
    Accum total;
    for (const auto& o : outcomes) {
        report.cases.push_back(o.detail);
        if (!o.detail.error.empty()) ++report.failures;
        // Group by the recorded ruling so row counts reproduce the dataset's
        // outcome distribution; cases without one fall back to the verdict.
        std::string group = "error";
        if (o.detail.error.empty()) {
            group = o.detail.expected_status.empty() ? o.detail.predicted_status
                                                     : o.detail.expected_status;
        }
        groups[{o.detail.category, "all"}].add(o);
        groups[{o.detail.category, group}].add(o);
        total.add(o);
    }

    for (const auto& [key, accum] : groups) {
        report.rows.push_back(to_row(key.first, key.second, accum));
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const MetricRow& a, const MetricRow& b) {
                  if (a.category != b.category) return a.category < b.category;
                  return group_order(a.status_group) < group_order(b.status_group);
              });
    report.totals = to_row("all", "all", total);
    return report;
}

std::string report_to_json(const EvaluationReport& report) {
    json j;
    j["rows"] = json::array();
    for (const auto& row : report.rows) j["rows"].push_back(row_json(row));
    j["totals"] = row_json(report.totals);
    j["cases"] = json::array();
    for (const auto& c : report.cases) {
        json d;
        d["case_id"] = c.case_id;
        d["category"] = c.category;
        d["predicted_status"] = c.predicted_status;
        d["expected_status"] = c.expected_status;
        d["predicted_citations"] = c.predicted_citations;
        d["expected_citations"] = c.expected_citations;
        if (!c.error.empty()) d["error"] = c.error;
        j["cases"].push_back(std::move(d));
    }
    j["failures"] = report.failures;
    return j.dump(2);
}

std::string report_to_text(const EvaluationReport& report) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-16s %-6s %6s %10s %8s %8s %9s %8s\n", "category",
                  "group", "cases", "precision", "recall", "f1", "macro_f1", "smt_acc");
    out += line;
    auto emit = [&](const MetricRow& row) {
        std::snprintf(line, sizeof(line), "%-16s %-6s %6zu %10s %8s %8s %9s %8s\n",
                      row.category.c_str(), row.status_group.c_str(), row.count,
                      metric_cell(row.precision).c_str(), metric_cell(row.recall).c_str(),
                      metric_cell(row.f1).c_str(), metric_cell(row.macro_f1).c_str(),
                      metric_cell(row.smt_accuracy).c_str());
        out += line;
    };
    for (const auto& row : report.rows) emit(row);
    emit(report.totals);
    std::snprintf(line, sizeof(line), "cases: %zu  failures: %zu\n", report.cases.size(),
                  report.failures);
    out += line;
    return out;
}

}  // namespace lexverify
