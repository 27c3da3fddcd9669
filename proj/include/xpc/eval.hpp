#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xpc/corpus.hpp"
#include "xpc/rationale.hpp"
#include "xpc/snippets.hpp"

namespace xpc::eval {

using rationale::MatchMode;
using rationale::Method;

// ---------------------------------------------------------------------------
// Cross-validation folds

struct FoldSplit {
    std::size_t fold_id = 0;
    std::vector<std::size_t> train;  // corpus positions, ascending
    std::vector<std::size_t> test;
};

// Stratified by label (responsive vs not responsive; unlabeled documents are
// left out). Each class is shuffled and dealt round-robin, the second class
// continuing where the first stopped, so fold sizes differ by at most one.
std::vector<FoldSplit> kfold_split(const corpus::Corpus& corpus, std::size_t k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Precision / recall

struct ScoredItem {
    double score = 0.0;
    bool positive = false;
};

struct PRPoint {
    double recall = 0.0;
    double precision = 0.0;
    double threshold = 0.0;
};

struct PRCurve {
    std::vector<PRPoint> points;  // thresholds descending
    double positive_rate = 0.0;
};

// One point per distinct score t, predicting positive when score >= t.
PRCurve pr_curve(std::span<const ScoredItem> items);

// Precision at the given recall: linear interpolation between neighbouring
// points, highest precision when several points share the recall, and the
// first point's precision below the curve's smallest recall.
double interpolate_precision(const PRCurve& curve, double recall);

struct AveragedPRCurve {
    std::vector<double> recall;     // 0.00, 0.01, ..., 1.00
    std::vector<double> precision;  // mean over folds
    std::vector<PRCurve> folds;

    double precision_at(double recall) const;
};

AveragedPRCurve average_pr_curves(std::vector<PRCurve> folds);

struct FoldSnippetScores {
    std::vector<ScoredItem> rationale_model;
    std::vector<ScoredItem> document_model;
};

struct SnippetClassificationReport {
    AveragedPRCurve rationale_model;
    AveragedPRCurve document_model;

    nlohmann::json to_json() const;
    void write_csv(std::ostream& out) const;
    void write_summary(std::ostream& out) const;
};

// Throws NoPositives when a fold has no positive item for either method.
SnippetClassificationReport snippet_classification_eval(std::span<const FoldSnippetScores> folds);

// ---------------------------------------------------------------------------
// Snippet statistics

struct SnippetStats {
    std::size_t n = 0;
    std::size_t total_snippets = 0;
    std::size_t documents = 0;
    double average_per_document = 0.0;
};

SnippetStats snippet_stats(std::span<const corpus::Document* const> docs, std::size_t n);

nlohmann::json to_json(std::span<const SnippetStats> rows);
void write_snippet_stats_table(std::span<const SnippetStats> rows, std::ostream& out);

// ---------------------------------------------------------------------------
// Rationale recall@K

struct RecallAtKTable {
    std::vector<std::size_t> ns;
    std::size_t max_k = 5;
    std::vector<Method> methods;
    MatchMode match_mode = MatchMode::Overlap;
    std::size_t folds = 0;
    std::size_t documents = 0;  // evaluated documents over all folds
    std::map<std::tuple<std::size_t, std::size_t, Method>, double> recall;

    double at(std::size_t n, std::size_t k, Method method) const { return recall.at({n, k, method}); }
    nlohmann::json to_json() const;
    void write_table(std::ostream& out) const;
};

struct FoldRationaleInput {
    // Labeled responsive test documents; those without usable annotations
    // are skipped.
    std::vector<const corpus::Document*> documents;
    std::vector<std::pair<Method, snippets::SpanScorer>> scorers;
};

// Recall per fold = share of annotated documents with an annotation matched
// by one of the top-K windows; the table holds the mean over folds that
// contain at least one annotated document. With `refine` set, selections of
// the document-model method are refined before matching.
RecallAtKTable rationale_identification_eval(std::span<const FoldRationaleInput> folds,
                                             std::span<const std::size_t> ns, std::size_t max_k,
                                             MatchMode match_mode,
                                             const snippets::RefineConfig* refine = nullptr,
                                             std::size_t threads = 1);

// ---------------------------------------------------------------------------
// Word savings

struct CoverageRange {
    double min_words = 0.0;
    double max_words = 0.0;
};

struct WordSavingsReport {
    double avg_doc_words = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t documents = 0;
    std::optional<double> recall;
    CoverageRange coverage;
    bool coverage_overridden = false;
    CoverageRange savings_per_doc;      // [avg - max coverage, avg - min coverage]
    CoverageRange total_savings;        // per doc x documents
    CoverageRange document_equivalents; // floor(total / avg)
    CoverageRange document_fraction;    // document_equivalents / documents
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
    void write_summary(std::ostream& out) const;
};

// Coverage of k overlapping n-word windows is [n + (k-1)n/2, kn] unless an
// explicit range is given. Savings below zero are floored with a warning.
WordSavingsReport word_savings(double avg_doc_words, std::size_t n, std::size_t k, std::size_t documents,
                               std::optional<double> recall = std::nullopt,
                               std::optional<CoverageRange> coverage_override = std::nullopt);

} // namespace xpc::eval
