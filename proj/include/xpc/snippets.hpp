#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xpc/corpus.hpp"
#include "xpc/model.hpp"
#include "xpc/random.hpp"
#include "xpc/text.hpp"

namespace xpc::snippets {

using corpus::Document;
using corpus::TokenSpan;

struct Snippet {
    std::string doc_id;
    TokenSpan span;
    std::optional<double> score;  // probability
    double logit = 0.0;           // ranking key; finer than the probability once it saturates

    std::size_t length() const { return span.length(); }
    nlohmann::json to_json() const;
};

struct WindowConfig {
    std::size_t n = 50;

    std::size_t stride() const { return n / 2; }
    void validate() const;  // n >= 2 and even
};

// Windows of n tokens starting every n/2 tokens over [0, length). A window
// contained in the previously kept one is dropped. length <= n gives [0, length).
std::vector<TokenSpan> window_spans(std::size_t length, std::size_t n);
std::vector<Snippet> window_document(const Document& doc, const WindowConfig& config);

// Linear score (logit) of a token span of a document.
using SpanScorer = std::function<double(const Document&, TokenSpan)>;

// Scores spans by featurizing their tokens; checks the model is bound to vocab.
SpanScorer model_scorer(const model::LinearClassifier& model, const text::Vocabulary& vocab);

Snippet score_span(const Document& doc, TokenSpan span, const SpanScorer& scorer);

inline constexpr std::size_t kNegativeMinWords = 10;
inline constexpr std::size_t kNegativeMaxWords = 250;

// Length uniform in [10, 250] (clamped to the document), start uniform over
// the valid positions. nullopt when the document has fewer than 10 tokens.
std::optional<Snippet> sample_negative_snippet(const Document& doc, Rng& rng);

struct NegativeSamples {
    // One slot per corpus document; set for sampled not-responsive documents.
    std::vector<std::optional<Snippet>> by_document;
    std::size_t sampled = 0;
    std::size_t skipped = 0;  // not-responsive documents too short to sample
};

// Each document draws from its own stream derived from (seed, document id).
NegativeSamples sample_negative_snippets(const corpus::Corpus& corpus, std::uint64_t seed);

struct RefineConfig {
    std::size_t min_size = 25;
    double epsilon = 0.0;
};

struct RefineTrace {
    std::vector<double> scores;  // seed score, then one per accepted step
    std::size_t accepted_steps = 0;
};

// Repeatedly windows the current best snippet at half its size (rounded down
// to even, stride a quarter) and moves to the best child while that improves
// the probability by more than epsilon and half the current size is still at
// least min_size. Children tie-break on earliest start.
Snippet refine_snippet(const Document& doc, const SpanScorer& scorer, const Snippet& seed,
                       const RefineConfig& config = {}, RefineTrace* trace = nullptr);

void write_snippets_jsonl(const std::vector<Snippet>& snippets, std::ostream& out);

} // namespace xpc::snippets
