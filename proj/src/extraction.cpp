// Copyright 2025 The Lexverify Authors
// SPDX-License-Identifier: Apache-2.0

#include "lexverify/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <initializer_list>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "httplib.h"
#include "json.hpp"
#include "lexverify/errors.hpp"

namespace lexverify {

namespace {

std::string lowercase(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// ---------------------------------------------------------------------------
// Tokens and the rule-based tagger.

struct Word {
    std::string text;
    std::string lower;
    std::size_t begin = 0;  // byte offsets into the source
    std::size_t end = 0;
};

// Splits into alphabetic words and numeric tokens. A numeral keeps internal
// '-' and '.' so citation fragments like 63-401.1 stay one token.
std::vector<Word> tokenize(const std::string& text, std::size_t from, std::size_t to) {
    std::vector<Word> words;
    std::size_t i = from;
    auto alpha = [&](std::size_t k) {
        return k < to && std::isalpha(static_cast<unsigned char>(text[k]));
    };
    auto digit = [&](std::size_t k) {
        return k < to && std::isdigit(static_cast<unsigned char>(text[k]));
    };
    while (i < to) {
        if (alpha(i)) {
            std::size_t j = i;
            while (alpha(j)) ++j;
            Word w;
            w.text = text.substr(i, j - i);
            w.lower = lowercase(w.text);
            w.begin = i;
            w.end = j;
            words.push_back(std::move(w));
            i = j;
        } else if (digit(i)) {
            std::size_t j = i;
            while (digit(j) || ((text[j] == '-' || text[j] == '.') && digit(j + 1))) ++j;
            Word w;
            w.text = text.substr(i, j - i);
            w.lower = w.text;
            w.begin = i;
            w.end = j;
            words.push_back(std::move(w));
            i = j;
        } else {
            ++i;
        }
    }
    return words;
}

enum class Tag { Det, Pron, Prep, Conj, Aux, Verb, Adj, Adv, Noun, Num };

const std::unordered_set<std::string>& determiner_set() {
    static const std::unordered_set<std::string> s{
        "a", "an", "the", "this", "that", "these", "those", "its", "their",
        "his", "her", "your", "any", "each", "every", "all", "some", "no", "such"};
    return s;
}

const std::unordered_set<std::string>& pronoun_set() {
    static const std::unordered_set<std::string> s{
        "it", "he", "she", "they", "you", "we", "i", "who", "whom", "which",
        "them", "him", "us", "me", "itself", "themselves"};
    return s;
}

const std::unordered_set<std::string>& preposition_set() {
    static const std::unordered_set<std::string> s{
        "of", "in", "on", "for", "with", "by", "to", "from", "at", "under",
        "within", "during", "against", "between", "into", "through", "after",
        "before", "above", "below", "over", "upon", "per", "without",
        "toward", "towards", "as"};
    return s;
}

const std::unordered_set<std::string>& conjunction_set() {
    static const std::unordered_set<std::string> s{
        "and", "or", "but", "when", "if", "while", "because", "unless",
        "until", "than", "whether", "nor", "so", "where"};
    return s;
}

const std::unordered_set<std::string>& auxiliary_set() {
    static const std::unordered_set<std::string> s{
        "shall", "must", "may", "can", "will", "would", "should", "could",
        "might", "is", "are", "was", "were", "be", "been", "being", "am",
        "has", "have", "had", "do", "does", "did", "not", "cannot"};
    return s;
}

// Open-class verbs the eligibility corpus leans on. Inflections are listed
// outright; -ed and -ing forms of anything else fall to the suffix rules.
const std::unordered_set<std::string>& verb_set() {
    static const std::unordered_set<std::string> s{
        "consider", "considers", "considered", "considering",
        "apply",    "applies",   "applied",    "applying",
        "live",     "lives",     "lived",      "living",
        "reside",   "resides",   "resided",    "residing",
        "provide",  "provides",  "provided",   "providing",
        "verify",   "verifies",  "verified",   "verifying",
        "meet",     "meets",     "met",
        "exceed",   "exceeds",   "exceeded",   "exceeding",
        "receive",  "receives",  "received",   "receiving",
        "file",     "files",     "filed",      "filing",
        "qualify",  "qualifies", "qualified",  "qualifying",
        "participate", "participates", "participated", "participating",
        "deny",     "denies",    "denied",     "denying",
        "approve",  "approves",  "approved",   "approving",
        "terminate", "terminates", "terminated", "terminating",
        "submit",   "submits",   "submitted",  "submitting",
        "fail",     "fails",     "failed",     "failing",
        "determine", "determines", "determined", "determining",
        "comply",   "complies",  "complied",   "complying",
        "remain",   "remains",   "remained",
        "become",   "becomes",   "became"};
    return s;
}

const std::unordered_set<std::string>& adjective_set() {
    static const std::unordered_set<std::string> s{
        "eligible", "ineligible", "gross", "net", "monthly", "annual",
        "allowable", "countable", "elderly", "disabled", "medical",
        "federal", "expedited", "categorical", "homeless", "dependent",
        "lawful", "permanent", "migrant", "seasonal", "high", "low",
        "same", "different"};
    return s;
}

const std::unordered_set<std::string>& adverb_set() {
    static const std::unordered_set<std::string> s{
        "there", "too", "very", "also", "already", "currently", "only"};
    return s;
}

bool ends_with(const std::string& s, const char* suffix) {
    std::size_t n = std::strlen(suffix);
    return s.size() >= n && s.compare(s.size() - n, n, suffix) == 0;
}

Tag tag_word(const Word& w) {
    if (std::isdigit(static_cast<unsigned char>(w.text[0]))) return Tag::Num;
    const std::string& t = w.lower;
    if (determiner_set().count(t)) return Tag::Det;
    if (pronoun_set().count(t)) return Tag::Pron;
    if (preposition_set().count(t)) return Tag::Prep;
    if (conjunction_set().count(t)) return Tag::Conj;
    if (auxiliary_set().count(t)) return Tag::Aux;
    if (verb_set().count(t)) return Tag::Verb;
    if (adjective_set().count(t)) return Tag::Adj;
    if (adverb_set().count(t)) return Tag::Adv;
    if (ends_with(t, "ly")) return Tag::Adv;
    if (t.size() > 4 && ends_with(t, "ing")) return Tag::Verb;
    if (t.size() > 3 && ends_with(t, "ed")) return Tag::Verb;
    return Tag::Noun;
}

std::vector<Tag> tag_words(const std::vector<Word>& words) {
    std::vector<Tag> tags;
    tags.reserve(words.size());
    for (const Word& w : words) tags.push_back(tag_word(w));
    return tags;
}

bool has_verb_evidence(const std::vector<Tag>& tags, std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
        if (tags[i] == Tag::Verb || tags[i] == Tag::Aux) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Segmentation.

bool is_terminator(const std::string& text, std::size_t i) {
    char c = text[i];
    if (c == '!' || c == '?' || c == ';') return true;
    if (c != '.') return false;
    // A period flanked by digits is a decimal or citation dot, not a boundary.
    bool digit_before = i > 0 && std::isdigit(static_cast<unsigned char>(text[i - 1]));
    bool digit_after =
        i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]));
    return !(digit_before && digit_after);
}

// Trims, drops a dangling comma or semicolon, capitalizes, and makes sure
// the span reads as a sentence of its own.
std::optional<std::string> polish_span(const std::string& raw) {
    std::size_t b = 0, e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    while (e > b && (raw[e - 1] == ',' || raw[e - 1] == ';')) --e;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    std::string s = raw.substr(b, e - b);
    bool has_letter = std::any_of(s.begin(), s.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c));
    });
    if (!has_letter) return std::nullopt;
    for (char& c : s) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            break;
        }
    }
    char last = s.back();
    if (last != '.' && last != '!' && last != '?') s += '.';
    return s;
}

}  // namespace

std::vector<ClauseSpan> segment(const std::string& text, SegmentMode mode,
                                const std::string& source_id) {
    (void)mode;  // both modes share the cut rules today
    std::vector<ClauseSpan> spans;
    auto emit = [&](std::size_t from, std::size_t to) {
        if (to <= from) return;
        if (auto polished = polish_span(text.substr(from, to - from))) {
            ClauseSpan span;
            span.source_id = source_id;
            span.index = spans.size();
            span.text = *polished;
            spans.push_back(std::move(span));
        }
    };

    std::size_t sentence_start = 0;
    std::size_t i = 0;
    while (i <= text.size()) {
        bool at_end = i == text.size();
        if (!at_end && !is_terminator(text, i)) {
            ++i;
            continue;
        }
        std::size_t sentence_end = at_end ? text.size() : i + 1;  // keep the mark
        auto words = tokenize(text, sentence_start, sentence_end);
        auto tags = tag_words(words);
        std::size_t piece_start = sentence_start;
        std::size_t piece_first_word = 0;
        for (std::size_t w = 0; w < words.size(); ++w) {
            if (words[w].lower != "and" && words[w].lower != "but") continue;
            bool left_ok =
                w > piece_first_word && has_verb_evidence(tags, piece_first_word, w);
            bool right_ok = w + 1 < words.size() &&
                            has_verb_evidence(tags, w + 1, words.size()) &&
                            tags[w + 1] != Tag::Verb;
            if (left_ok && right_ok) {
                emit(piece_start, words[w].begin);
                piece_start = words[w + 1].begin;
                piece_first_word = w + 1;
            }
        }
        emit(piece_start, sentence_end);
        if (at_end) break;
        i = sentence_end;
        sentence_start = sentence_end;
    }
    return spans;
}

ConceptMatch match_concepts(const ClauseSpan& span, const OntologyGraph& onto,
                            SimilarityProvider& provider, double floor) {
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& [label, node] : onto.concepts()) {
        double s = provider.similarity(span.text, label);
        if (s >= floor) scored.emplace_back(s, label);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (scored.size() > 8) scored.resize(8);
    ConceptMatch match;
    match.span = span;
    for (auto& [s, label] : scored) {
        match.labels.push_back(label);
        match.scores.push_back(s);
    }
    return match;
}

// ---------------------------------------------------------------------------
// Prompting.

std::string default_prompt_template() {
    return
        "You are a legal reasoning assistant that converts explanatory\n"
        "clauses into formal logic rules compatible with the Z3 SMT solver.\n"
        "\n"
        "Use only the ontology variables provided below.\n"
        "Represent the eligibility conclusion as Applicant_Eligible.\n"
        "\n"
        "Syntax Requirements:\n"
        "- Express each rule as a single logical implication\n"
        "- Use first-order logic operators: Implies, And, Or, Not, Equals\n"
        "- Use only ontology variable names exactly as listed\n"
        "- Output only JSON with the field: \"hasLogic\"\n"
        "- Do not include natural language explanations\n"
        "\n"
        "Ontology Concepts:\n"
        "{ontology_concepts}\n"
        "\n"
        "Clause:\n"
        "\"{explanation_clause}\"\n"
        "\n"
        "Output format:\n"
        "{\n"
        "  \"hasLogic\": \"<first-order logical implication>\"\n"
        "}\n";
}

namespace {

void replace_all(std::string& text, const std::string& token, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
}

}  // namespace

std::string render_prompt(const std::string& template_text,
                          const std::vector<std::string>& concepts,
                          const std::string& clause) {
    std::string joined;
    for (const std::string& c : concepts) {
        if (!joined.empty()) joined += ", ";
        joined += c;
    }
    std::string out = template_text;
    replace_all(out, "{ontology_concepts}", joined);
    replace_all(out, "{explanation_clause}", clause);
    return out;
}

// ---------------------------------------------------------------------------
// Clients.

HttpFormalizerClient::HttpFormalizerClient(std::string base_url, std::string model,
                                           int timeout_ms)
    : base_url_(std::move(base_url)), model_(std::move(model)), timeout_ms_(timeout_ms) {}

std::string HttpFormalizerClient::complete(const std::string& prompt) {
    nlohmann::json body{{"prompt", prompt}};
    if (!model_.empty()) body["model"] = model_;
    const std::string payload = body.dump();
    for (int attempt = 0; attempt < 3; ++attempt) {
        httplib::Client client(base_url_);
        client.set_connection_timeout(0, timeout_ms_ * 1000);
        client.set_read_timeout(0, timeout_ms_ * 1000);
        auto res = client.Post("/complete", payload, "application/json");
        if (!res) continue;  // transport trouble: retry
        if (res->status != 200) {
            throw ClientUnavailable("formalizer returned status " +
                                    std::to_string(res->status));
        }
        auto parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("completion") ||
            !parsed["completion"].is_string()) {
            throw ClientUnavailable("formalizer returned a malformed response");
        }
        return parsed["completion"].get<std::string>();
    }
    throw ClientUnavailable("formalizer unreachable at " + base_url_);
}

ScriptedReplayClient::ScriptedReplayClient(std::vector<std::string> responses)
    : responses_(responses.begin(), responses.end()) {}

std::string ScriptedReplayClient::complete(const std::string& prompt) {
    prompts_.push_back(prompt);
    if (responses_.empty()) {
        throw ClientUnavailable("scripted formalizer exhausted after " +
                                std::to_string(prompts_.size() - 1) + " responses");
    }
    std::string next = std::move(responses_.front());
    responses_.pop_front();
    return next;
}

namespace {

// Pulls the single line following a "<marker>\n" out of a rendered prompt.
std::optional<std::string> line_after(const std::string& prompt, const std::string& marker) {
    std::size_t pos = prompt.find(marker);
    if (pos == std::string::npos) return std::nullopt;
    pos = prompt.find('\n', pos);
    if (pos == std::string::npos) return std::nullopt;
    ++pos;
    std::size_t end = prompt.find('\n', pos);
    if (end == std::string::npos) end = prompt.size();
    return prompt.substr(pos, end - pos);
}

std::string trim_copy(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// The clause lowercased with punctuation collapsed to single spaces and a
// space pad on both ends, so " not " style cue lookups respect word edges.
std::string cue_pad(const std::string& clause) {
    std::string out = " ";
    bool last_space = true;
    for (char raw : clause) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
        if (!std::isalnum(static_cast<unsigned char>(c))) c = ' ';
        if (c == ' ' && last_space) continue;
        out += c;
        last_space = c == ' ';
    }
    if (!last_space) out += ' ';
    return out;
}

bool has_cue(const std::string& padded, std::initializer_list<const char*> cues) {
    for (const char* cue : cues) {
        if (padded.find(" " + std::string(cue) + " ") != std::string::npos) return true;
    }
    return false;
}

}  // namespace

std::string EchoFallbackClient::complete(const std::string& prompt) {
    auto concept_line = line_after(prompt, "Ontology Concepts:");
    auto clause_line = line_after(prompt, "Clause:");
    std::set<std::string> concepts;
    if (concept_line) {
        std::stringstream ss(*concept_line);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            piece = trim_copy(piece);
            if (!piece.empty()) concepts.insert(piece);
        }
    }
    std::string clause = clause_line ? trim_copy(*clause_line) : std::string();
    if (clause.size() >= 2 && clause.front() == '"' && clause.back() == '"') {
        clause = clause.substr(1, clause.size() - 2);
    }

    const std::string padded = cue_pad(clause);
    auto has = [&](const char* label) { return concepts.count(label) > 0; };
    auto negative = [&](std::initializer_list<const char*> cues) {
        return has_cue(padded, cues);
    };

    std::string rule;
    if (has("Applicant_ResidenceCounty") && has("Applicant_ApplicationCounty")) {
        if (negative({"mismatch", "different", "another", "outside", "not", "must",
                      "denied"})) {
            rule =
                "Implies(Applicant_ResidenceCounty != Applicant_ApplicationCounty, "
                "Not(Applicant_Eligible))";
        } else {
            rule =
                "Implies(Applicant_ResidenceCounty = Applicant_ApplicationCounty, "
                "Applicant_Eligible)";
        }
    } else if (has("Applicant_ResidenceState") && has("AdministeringState")) {
        if (negative({"different", "another", "outside", "not"})) {
            rule =
                "Implies(Applicant_ResidenceState != AdministeringState, "
                "Not(Applicant_Eligible))";
        } else {
            rule =
                "Implies(Applicant_ResidenceState = AdministeringState, "
                "Applicant_Eligible)";
        }
    } else if (has("GrossIncome") && has("IncomeThreshold")) {
        if (has_cue(padded, {"below", "under", "within", "less than", "did not exceed",
                             "meets"})) {
            rule = "Implies(GrossIncome <= IncomeThreshold, Applicant_Eligible)";
        } else {
            rule = "Implies(GrossIncome > IncomeThreshold, Not(Applicant_Eligible))";
        }
    } else if (has("HouseholdResources") && has("ResourceThreshold")) {
        if (has_cue(padded, {"below", "under", "within", "less than", "did not exceed",
                             "meets"})) {
            rule = "Implies(HouseholdResources <= ResourceThreshold, Applicant_Eligible)";
        } else {
            rule =
                "Implies(HouseholdResources > ResourceThreshold, Not(Applicant_Eligible))";
        }
    } else if (has("CitizenStatus") && has("VerificationProvided")) {
        if (negative({"not", "without", "neither", "no", "fail", "failed"})) {
            rule =
                "Implies(And(Not(CitizenStatus), Not(VerificationProvided)), "
                "Not(Applicant_Eligible))";
        } else {
            rule = "Implies(CitizenStatus, Applicant_Eligible)";
        }
    } else if (has("StudentFlag") && has("MeetsStudentExemption")) {
        if (negative({"not", "without", "no", "ineligible", "fails"})) {
            rule =
                "Implies(And(StudentFlag, Not(MeetsStudentExemption)), "
                "Not(Applicant_Eligible))";
        } else {
            rule =
                "Implies(And(StudentFlag, MeetsStudentExemption), Applicant_Eligible)";
        }
    } else if (has("Age") && has("HasDisabilityStatus")) {
        rule = "Implies(Or(Age >= 60, HasDisabilityStatus), Applicant_Eligible)";
    } else if (has("Residency_HouseholdLocation") && has("Residency_ApplicationCounty")) {
        if (negative({"not", "outside", "different", "no"})) {
            rule =
                "Implies(Not(And(Residency_ApplicationCounty, "
                "Residency_HouseholdLocation)), Not(Applicant_Eligible))";
        } else {
            rule =
                "Implies(And(Residency_HouseholdLocation, Residency_ApplicationCounty), "
                "Applicant_Eligible)";
        }
    } else {
        std::string verification;
        for (const std::string& c : concepts) {
            if (c.find("Verification") != std::string::npos) {
                verification = c;
                break;  // set order, so the smallest such label
            }
        }
        if (!verification.empty()) {
            if (negative({"not", "without", "missing", "fail", "failed", "no"})) {
                rule = "Implies(Not(" + verification + "), Not(Applicant_Eligible))";
            } else {
                rule = "Implies(" + verification + ", Applicant_Eligible)";
            }
        } else if (has("Resident")) {
            if (negative({"not", "no", "outside"})) {
                rule = "Implies(Not(Resident), Not(Applicant_Eligible))";
            } else {
                rule = "Implies(Resident, Applicant_Eligible)";
            }
        } else if (!concepts.empty()) {
            const std::string& only = *concepts.begin();
            if (negative({"not", "no", "without", "denied", "fail", "failed"})) {
                rule = "Implies(Not(" + only + "), Not(Applicant_Eligible))";
            } else {
                rule = "Implies(" + only + ", Applicant_Eligible)";
            }
        }
    }

    if (rule.empty()) return "I cannot formalize this clause.";
    nlohmann::json out{{"hasLogic", rule}};
    return out.dump(2);
}

// ---------------------------------------------------------------------------
// The validation loop.

namespace {

// First balanced {...} object in the text, skipping over string literals.
// An unbalanced candidate falls through to the next opening brace.
std::optional<std::string> extract_json_object(const std::string& raw) {
    std::size_t start = raw.find('{');
    while (start != std::string::npos) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < raw.size(); ++i) {
            char c = raw[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) return raw.substr(start, i - start + 1);
            }
        }
        start = raw.find('{', start + 1);
    }
    return std::nullopt;
}

bool concludes_eligibility(const ExprPtr& rule) {
    if (rule->kind() != Expr::Kind::Implies) return false;
    const ExprPtr& conclusion = rule->consequent();
    if (conclusion->kind() == Expr::Kind::Var) {
        return conclusion->label() == "Applicant_Eligible";
    }
    if (conclusion->kind() == Expr::Kind::Not) {
        const ExprPtr& inner = conclusion->child();
        return inner->kind() == Expr::Kind::Var && inner->label() == "Applicant_Eligible";
    }
    return false;
}

struct ValidationOutcome {
    std::vector<ExprPtr> rules;
    std::string error;  // empty means accepted
};

ValidationOutcome validate_response(const std::string& raw, const Vocabulary& vocab) {
    ValidationOutcome out;
    auto object_text = extract_json_object(raw);
    if (!object_text) {
        out.error = "unparseable";
        return out;
    }
    auto parsed = nlohmann::json::parse(*object_text, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        out.error = "unparseable";
        return out;
    }
    if (!parsed.contains("hasLogic")) {
        out.error = "missing hasLogic field";
        return out;
    }
    std::vector<std::string> sources;
    const auto& logic = parsed["hasLogic"];
    if (logic.is_string()) {
        sources.push_back(logic.get<std::string>());
    } else if (logic.is_array()) {
        for (const auto& item : logic) {
            if (!item.is_string()) {
                out.error = "hasLogic must be a string or an array of strings";
                return out;
            }
            sources.push_back(item.get<std::string>());
        }
    } else {
        out.error = "hasLogic must be a string or an array of strings";
        return out;
    }
    if (sources.empty()) {
        out.error = "hasLogic is empty";
        return out;
    }
    for (const std::string& source : sources) {
        ExprPtr rule;
        try {
            rule = parse(source);
        } catch (const Error& e) {
            out.error = "rejected logic \"" + source + "\": " + e.what();
            out.rules.clear();
            return out;
        }
        rule = rewrite_applied_vars(rule, vocab);
        if (auto err = typecheck(rule, vocab)) {
            out.error = "rejected logic \"" + source + "\": " + err->str();
            out.rules.clear();
            return out;
        }
        if (!concludes_eligibility(rule)) {
            out.error = "rejected logic \"" + source +
                        "\": must be an implication concluding Applicant_Eligible or "
                        "Not(Applicant_Eligible)";
            out.rules.clear();
            return out;
        }
        out.rules.push_back(canonicalize(rule));
    }
    return out;
}

}  // namespace

FormalizationResult formalize(const FormalizationRequest& request,
                              FormalizerClient& client, int max_attempts) {
    Vocabulary vocab = request.vocab;
    vocab.concepts.emplace("Applicant_Eligible", ValueKind::Boolean);

    std::vector<std::string> names;
    for (const auto& [label, kind] : request.vocab.concepts) names.push_back(label);
    const std::string base = render_prompt(
        request.template_text.empty() ? default_prompt_template() : request.template_text,
        names, request.clause);

    FormalizationResult result;
    std::string prompt = base;
    std::string last_error;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        std::string raw = client.complete(prompt);
        result.attempts = attempt;
        result.raw_output = raw;
        ValidationOutcome outcome = validate_response(raw, vocab);
        if (outcome.error.empty()) {
            result.parsed = std::move(outcome.rules);
            return result;
        }
        last_error = outcome.error;
        prompt = base + "\n\nThe previous attempt was rejected: " + last_error +
                 "\nPrevious output:\n" + raw +
                 "\nReturn only corrected JSON with the field \"hasLogic\".";
    }
    result.failure = last_error;
    return result;
}

// ---------------------------------------------------------------------------
// Statute concept candidates.

namespace {

const std::unordered_map<std::string, std::string>& irregular_lemmas() {
    static const std::unordered_map<std::string, std::string> m{
        {"children", "child"}, {"people", "person"}, {"men", "man"},
        {"women", "woman"},    {"criteria", "criterion"}};
    return m;
}

std::string lemmatize(const std::string& lower) {
    auto it = irregular_lemmas().find(lower);
    if (it != irregular_lemmas().end()) return it->second;
    if (lower.size() >= 5 && ends_with(lower, "ies")) {
        return lower.substr(0, lower.size() - 3) + "y";
    }
    if (ends_with(lower, "sses") || ends_with(lower, "ches") || ends_with(lower, "shes") ||
        ends_with(lower, "xes") || ends_with(lower, "zes")) {
        return lower.substr(0, lower.size() - 2);
    }
    if (lower.size() > 3 && ends_with(lower, "s") && !ends_with(lower, "ss") &&
        !ends_with(lower, "us") && !ends_with(lower, "is")) {
        return lower.substr(0, lower.size() - 1);
    }
    return lower;
}

std::string camel(const std::string& lemma) {
    std::string out = lemma;
    if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

// Constructions whose legal meaning is not recoverable from noun-phrase
// chunks alone. Matched as contiguous lowercased word sequences.
struct CompoundPattern {
    std::vector<std::string> tokens;
    std::string label_suffix;
};

const std::vector<CompoundPattern>& compound_patterns() {
    static const std::vector<CompoundPattern> patterns{
        {{"living", "there"}, "HouseholdLocation"},
        {{"lives", "there"}, "HouseholdLocation"},
        {{"resides", "there"}, "HouseholdLocation"},
        {{"residing", "there"}, "HouseholdLocation"},
        {{"applies", "for", "benefits", "in", "that", "county"}, "ApplicationCounty"},
        {{"applies", "for", "benefits", "in", "the", "county"}, "ApplicationCounty"},
        {{"applied", "for", "benefits", "in", "that", "county"}, "ApplicationCounty"},
    };
    return patterns;
}

// Short concept prefixes for the eligibility domains; an unlisted domain
// prefixes with its own name.
std::string domain_prefix(const std::string& domain) {
    static const std::unordered_map<std::string, std::string> m{
        {"ResidencyRequirement", "Residency"},
        {"IncomeEligibility", "Income"},
        {"CitizenshipStatus", "Citizenship"},
        {"HouseholdComposition", "Household"},
        {"ResourceEligibility", "Resource"},
        {"WorkRequirement", "Work"}};
    auto it = m.find(domain);
    return it == m.end() ? domain : it->second;
}

}  // namespace

std::vector<Concept> extract_statute_concepts(const ClauseSpan& clause,
                                              const std::string& domain) {
    auto words = tokenize(clause.text, 0, clause.text.size());
    auto tags = tag_words(words);
    const std::string prefix = domain_prefix(domain);
    auto make_label = [&](const std::string& suffix) {
        return prefix.empty() ? suffix : prefix + "_" + suffix;
    };

    std::vector<Concept> found;
    std::set<std::string> seen;
    auto add = [&](const std::string& suffix, const std::string& phrase) {
        std::string label = make_label(suffix);
        if (!seen.insert(label).second) return;
        Concept c;
        c.label = label;
        c.domain = domain;
        c.value_kind = default_value_kind(label);
        c.definition = phrase;
        c.citation = clause.source_id;
        found.push_back(std::move(c));
    };

    for (const CompoundPattern& pattern : compound_patterns()) {
        if (pattern.tokens.size() > words.size()) continue;
        for (std::size_t i = 0; i + pattern.tokens.size() <= words.size(); ++i) {
            bool hit = true;
            for (std::size_t k = 0; k < pattern.tokens.size(); ++k) {
                if (words[i + k].lower != pattern.tokens[k]) {
                    hit = false;
                    break;
                }
            }
            if (hit) {
                std::string phrase;
                for (std::size_t k = 0; k < pattern.tokens.size(); ++k) {
                    if (k) phrase += ' ';
                    phrase += words[i + k].text;
                }
                add(pattern.label_suffix, phrase);
                break;
            }
        }
    }

    // Noun-phrase chunks: optional determiner, then adjectives and nouns,
    // trimmed back so the chunk ends on a noun.
    std::size_t i = 0;
    while (i < words.size()) {
        std::size_t j = i;
        if (tags[j] == Tag::Det) ++j;
        std::vector<std::size_t> run;
        while (j < words.size() && (tags[j] == Tag::Adj || tags[j] == Tag::Noun)) {
            run.push_back(j);
            ++j;
        }
        while (!run.empty() && tags[run.back()] == Tag::Adj) run.pop_back();
        if (run.empty()) {
            ++i;
            continue;
        }
        std::string suffix;
        std::string phrase;
        for (std::size_t k : run) {
            suffix += camel(lemmatize(words[k].lower));
            if (!phrase.empty()) phrase += ' ';
            phrase += words[k].text;
        }
        add(suffix, phrase);
        i = j;
    }
    return found;
}

}  // namespace lexverify
