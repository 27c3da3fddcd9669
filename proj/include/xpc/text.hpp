#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace xpc::text {

// Byte range [begin, end) of a token in the source text.
struct TokenOffset {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct TokenizedText {
    std::vector<std::string> tokens;
    std::vector<TokenOffset> offsets;
};

// Lowercased maximal runs of letters/digits. Everything else (punctuation,
// whitespace, symbols, malformed UTF-8) separates tokens. No stemming and no
// stopword removal.
std::vector<std::string> tokenize(std::string_view text);
TokenizedText tokenize_with_offsets(std::string_view text);

// Dense term <-> index mapping with indices assigned in lexicographic
// (byte-wise) term order.
class Vocabulary {
public:
    Vocabulary() = default;

    // Terms must be unique; they are sorted on construction.
    static Vocabulary from_terms(std::vector<std::string> terms, std::size_t min_df);

    std::optional<std::uint32_t> index(std::string_view term) const;
    const std::string& term(std::size_t index) const { return terms_.at(index); }
    const std::vector<std::string>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    std::size_t min_df() const { return min_df_; }

    // Hash of the ordered term list; binds trained models to this vocabulary.
    std::uint64_t fingerprint() const { return fingerprint_; }

    nlohmann::json to_json() const;
    static Vocabulary from_json(const nlohmann::json& j);

private:
    std::vector<std::string> terms_;
    std::size_t min_df_ = 1;
    std::uint64_t fingerprint_ = 0;
};

// Incremental document-frequency counter behind build_vocabulary.
class VocabularyBuilder {
public:
    void add_document(std::span<const std::string> tokens);
    std::size_t document_count() const { return documents_; }
    Vocabulary build(std::size_t min_df) const;

private:
    std::unordered_map<std::string, std::size_t> document_frequency_;
    std::size_t documents_ = 0;
};

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs, std::size_t min_df = 2);

// Normalized-frequency bag of words.
struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries;  // strictly increasing index
    std::size_t dimension = 0;
    std::size_t token_count = 0;  // denominator, OOV tokens included

    // Empty token lists featurize to the zero vector with this flag set.
    bool from_empty_input() const { return token_count == 0; }
    double sum() const;
    double dot(std::span<const double> dense) const;
};

SparseVector featurize(std::span<const std::string> tokens, const Vocabulary& vocab);

std::string fingerprint_hex(std::uint64_t fingerprint);
std::uint64_t parse_fingerprint_hex(const std::string& hex);

} // namespace xpc::text
