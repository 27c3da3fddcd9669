#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xpc/text.hpp"

namespace xpc::corpus {

enum class Label { Responsive, NotResponsive, Unlabeled };

std::string_view to_string(Label label);
Label parse_label(std::string_view name);

// Half-open token interval [start, end).
struct TokenSpan {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - start; }
    bool contains(const TokenSpan& other) const { return start <= other.start && other.end <= end; }
    bool overlaps(const TokenSpan& other) const { return start < other.end && other.start < end; }
    friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

enum class SpanSource { Annotated, Resolved };

struct RationaleSpan {
    TokenSpan span;
    SpanSource source = SpanSource::Annotated;

    std::size_t start_token() const { return span.start; }
    std::size_t end_token() const { return span.end; }
    std::size_t word_length() const { return span.length(); }
};

struct Document {
    std::string id;
    std::string text;
    std::vector<std::string> tokens;
    std::vector<text::TokenOffset> offsets;
    Label label = Label::Unlabeled;
    std::vector<RationaleSpan> rationales;
    // Set by filter_rationales on responsive documents left with no usable span.
    bool excluded_from_rationale_eval = false;

    static Document from_text(std::string id, std::string text, Label label);

    std::size_t token_count() const { return tokens.size(); }
    std::span<const std::string> tokens_in(TokenSpan span) const;
    // Original source text covered by the span.
    std::string_view excerpt(TokenSpan span) const;
    bool has_usable_rationales() const {
        return label == Label::Responsive && !excluded_from_rationale_eval && !rationales.empty();
    }
};

struct LengthDistribution {
    double mean = 0.0;
    double stddev = 0.0;
};

struct SyntheticConfig {
    std::size_t n_docs = 2000;
    double responsive_rate = 0.065;
    LengthDistribution doc_length{970.0, 250.0};
    LengthDistribution rationale_length{52.0, 25.0};
    std::size_t min_doc_words = 20;
    std::size_t min_rationale_words = 10;
    std::size_t max_rationale_words = 250;
    std::size_t background_vocab_size = 5000;
    std::size_t topic_vocab_size = 100;
    double topic_mix = 0.8;
    std::uint64_t seed = 7;

    void validate() const;
    nlohmann::json to_json() const;
};

struct Provenance {
    bool synthetic = false;
    std::optional<SyntheticConfig> config;
};

struct Corpus {
    std::vector<Document> documents;
    Provenance provenance;
    // Text annotations that could not be located and were dropped on load.
    std::size_t unresolved_rationales = 0;

    std::size_t count(Label label) const;
    const Document* find(std::string_view id) const;
};

// JSONL I/O. Each record:
//   {"id", "text", "label": "responsive"|"not_responsive"|"unlabeled",
//    "rationales": [{"start_token", "end_token"} | {"text"}]}
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::istream& in, const std::string& source_name = "<stream>");
void write_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// First exact token-sequence match of the tokenized text inside the document.
std::optional<TokenSpan> locate_rationale(const Document& doc, std::string_view rationale_text);

// Responsive documents keep spans with min_words <= length < max_words.
Corpus filter_rationales(Corpus corpus, std::size_t min_words = 10, std::size_t max_words = 250);

Corpus generate_synthetic_corpus(const SyntheticConfig& config);

struct CorpusStats {
    std::size_t documents = 0;
    std::size_t responsive = 0;
    std::size_t not_responsive = 0;
    std::size_t unlabeled = 0;
    std::size_t excluded = 0;
    std::size_t unresolved_rationales = 0;
    double responsive_rate = 0.0;
    LengthDistribution doc_length;
    std::size_t rationale_count = 0;
    LengthDistribution rationale_length;
    std::size_t length_threshold = 250;
    double fraction_below_threshold = 0.0;

    nlohmann::json to_json() const;
};

// Lengths use population standard deviation. The responsive rate is over
// labeled documents.
CorpusStats corpus_stats(const Corpus& corpus, std::size_t length_threshold = 250);

} // namespace xpc::corpus
