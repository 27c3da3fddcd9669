#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xpc/corpus.hpp"
#include "xpc/model.hpp"
#include "xpc/snippets.hpp"
#include "xpc/text.hpp"

namespace xpc::rationale {

using corpus::Document;
using corpus::RationaleSpan;
using corpus::TokenSpan;
using snippets::Snippet;

enum class Method { DocumentModel, RationaleModel };
enum class MatchMode { Overlap, Containment };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
std::string_view to_string(MatchMode mode);
MatchMode parse_match_mode(std::string_view name);

struct ExtractionConfig {
    Method method = Method::RationaleModel;
    snippets::WindowConfig window{50};
    std::size_t top_k = 1;
    double responsive_threshold = 0.5;
    bool refine = false;  // document-model method only
    snippets::RefineConfig refine_config;
    MatchMode match_mode = MatchMode::Overlap;

    void validate() const;
};

// Vocabulary plus the models bound to it.
struct ModelSet {
    text::Vocabulary vocabulary;
    model::LinearClassifier document;
    std::optional<model::LinearClassifier> rationale;

    // vocabulary.json, document_model.json and, if present, rationale_model.json
    void save(const std::filesystem::path& dir) const;
    static ModelSet load(const std::filesystem::path& dir);
};

struct RationaleResult {
    std::string doc_id;
    double document_score = 0.0;
    std::vector<Snippet> rationales;  // best first
    std::vector<bool> matched;        // one flag per annotated span, when annotations exist

    nlohmann::json to_json() const;
};

struct RankedDocument {
    std::size_t index = 0;  // position in the corpus
    double score = 0.0;
};

// Documents scoring >= threshold, best first (corpus order breaks ties).
std::vector<RankedDocument> identify_responsive(const model::LinearClassifier& doc_model,
                                                const text::Vocabulary& vocab,
                                                const corpus::Corpus& corpus, double threshold);

// Rank order: higher logit, then earlier start, then shorter span.
bool ranks_before(const Snippet& a, const Snippet& b);

// Every window of the document scored and sorted in rank order.
std::vector<Snippet> rank_snippets(const Document& doc, std::size_t n, const snippets::SpanScorer& scorer);

bool match_rationale(TokenSpan snippet, std::span<const RationaleSpan> annotations, MatchMode mode);

RationaleResult extract_rationales(const Document& doc, const ExtractionConfig& config,
                                   const model::LinearClassifier& doc_model,
                                   const model::LinearClassifier* rationale_model,
                                   const text::Vocabulary& vocab);

// Scorer-level core of extract_rationales: top_k windows in rank order. With
// `refine` set each selected window is refined under the same scorer, then
// duplicates are merged and the list re-ranked.
std::vector<Snippet> select_rationales(const Document& doc, std::size_t n, std::size_t top_k,
                                       const snippets::SpanScorer& scorer,
                                       const snippets::RefineConfig* refine = nullptr);

// Results are gathered in corpus order regardless of thread count.
std::vector<RationaleResult> run_pipeline(const corpus::Corpus& corpus, const ModelSet& models,
                                          const ExtractionConfig& config, std::size_t threads = 1);

void write_results_jsonl(const std::vector<RationaleResult>& results, std::ostream& out);
void write_results_report(const std::vector<RationaleResult>& results, const corpus::Corpus& corpus,
                          const ExtractionConfig& config, std::ostream& out);

} // namespace xpc::rationale
