#include "xpc/text.hpp"

#include <algorithm>
#include <cstdio>

#include "xpc/error.hpp"
#include "xpc/random.hpp"

namespace xpc::text {

namespace {

struct Decoded {
    char32_t code_point;
    std::size_t length;  // bytes consumed; code_point is U+FFFD when malformed
};

constexpr char32_t kReplacement = 0xFFFD;

Decoded decode_utf8(std::string_view s, std::size_t i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char lead = byte(i);
    if (lead < 0x80) {
        return {lead, 1};
    }
    std::size_t length = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        length = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        length = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        length = 4;
        cp = lead & 0x07;
    } else {
        return {kReplacement, 1};
    }
    if (i + length > s.size()) {
        return {kReplacement, 1};
    }
    for (std::size_t k = 1; k < length; ++k) {
        const unsigned char b = byte(i + k);
        if ((b & 0xC0) != 0x80) {
            return {kReplacement, 1};
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMinimum[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinimum[length] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        return {kReplacement, length};
    }
    return {cp, length};
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

struct Range {
    char32_t lo;
    char32_t hi;
};

// Letter, digit and combining-mark blocks. Coarse outside Latin, Greek and
// Cyrillic, but stable: the table is the definition of a word character.
constexpr Range kWordRanges[] = {
    {0x0030, 0x0039}, {0x0041, 0x005A}, {0x0061, 0x007A}, {0x00AA, 0x00AA},
    {0x00B5, 0x00B5}, {0x00BA, 0x00BA}, {0x00C0, 0x00D6}, {0x00D8, 0x00F6},
    {0x00F8, 0x02AF}, {0x0300, 0x036F}, {0x0370, 0x0373}, {0x0376, 0x0377},
    {0x037B, 0x037D}, {0x037F, 0x037F}, {0x0386, 0x0386}, {0x0388, 0x03F5},
    {0x03F7, 0x0481}, {0x0483, 0x052F}, {0x0531, 0x0556}, {0x0561, 0x0587},
    {0x05B0, 0x05BD}, {0x05D0, 0x05EA}, {0x0610, 0x061A}, {0x0620, 0x0669},
    {0x066E, 0x06D3}, {0x06D5, 0x06DC}, {0x06F0, 0x06FF}, {0x0900, 0x0963},
    {0x0966, 0x096F}, {0x0971, 0x0DFF}, {0x0E01, 0x0E3A}, {0x0E40, 0x0E4E},
    {0x0E50, 0x0E59}, {0x0E81, 0x0EDF}, {0x10A0, 0x10FF}, {0x1100, 0x11FF},
    {0x1E00, 0x1FBC}, {0x1FC2, 0x1FCC}, {0x1FD0, 0x1FDB}, {0x1FE0, 0x1FEC},
    {0x1FF2, 0x1FFC}, {0x3041, 0x3096}, {0x309D, 0x309F}, {0x30A1, 0x30FA},
    {0x30FC, 0x30FF}, {0x3400, 0x4DBF}, {0x4E00, 0x9FFF}, {0xAC00, 0xD7A3},
    {0xF900, 0xFAFF}, {0xFF10, 0xFF19}, {0xFF21, 0xFF3A}, {0xFF41, 0xFF5A},
    {0x20000, 0x2FFFF},
};

bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    if (cp == 0x00D7 || cp == 0x00F7) {
        return false;
    }
    const auto it = std::upper_bound(std::begin(kWordRanges), std::end(kWordRanges), cp,
                                     [](char32_t value, const Range& r) { return value < r.lo; });
    if (it == std::begin(kWordRanges)) {
        return false;
    }
    return cp <= std::prev(it)->hi;
}

char32_t to_lower(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 'A' && cp <= 'Z') ? cp + 0x20 : cp;
    }
    if ((cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7)) {
        return cp + 0x20;
    }
    if (cp >= 0x0100 && cp <= 0x017F) {
        if (cp == 0x0130) {
            return 0x0069;
        }
        if (cp == 0x0178) {
            return 0x00FF;
        }
        if ((cp >= 0x0139 && cp <= 0x0148) || (cp >= 0x0179 && cp <= 0x017E)) {
            return (cp % 2 == 1) ? cp + 1 : cp;
        }
        if (cp == 0x0138 || cp == 0x0149 || cp == 0x017F) {
            return cp;
        }
        return (cp % 2 == 0) ? cp + 1 : cp;
    }
    if (cp >= 0x0391 && cp <= 0x03AB && cp != 0x03A2) {
        return cp + 0x20;
    }
    if (cp >= 0x0400 && cp <= 0x040F) {
        return cp + 0x50;
    }
    if (cp >= 0x0410 && cp <= 0x042F) {
        return cp + 0x20;
    }
    if ((cp >= 0x0460 && cp <= 0x0481) || (cp >= 0x048A && cp <= 0x04BF)) {
        return (cp % 2 == 0) ? cp + 1 : cp;
    }
    if (cp >= 0x0531 && cp <= 0x0556) {
        return cp + 0x30;
    }
    if (cp >= 0xFF21 && cp <= 0xFF3A) {
        return cp + 0x20;
    }
    return cp;
}

} // namespace

TokenizedText tokenize_with_offsets(std::string_view text) {
    TokenizedText out;
    std::string current;
    std::size_t begin = 0;
    bool in_token = false;

    std::size_t i = 0;
    while (i < text.size()) {
        const Decoded d = decode_utf8(text, i);
        if (d.code_point != kReplacement && is_word_char(d.code_point)) {
            if (!in_token) {
                in_token = true;
                begin = i;
            }
            append_utf8(current, to_lower(d.code_point));
        } else if (in_token) {
            out.tokens.push_back(std::move(current));
            out.offsets.push_back({begin, i});
            current.clear();
            in_token = false;
        }
        i += d.length;
    }
    if (in_token) {
        out.tokens.push_back(std::move(current));
        out.offsets.push_back({begin, text.size()});
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    return tokenize_with_offsets(text).tokens;
}

Vocabulary Vocabulary::from_terms(std::vector<std::string> terms, std::size_t min_df) {
    std::sort(terms.begin(), terms.end());
    if (std::adjacent_find(terms.begin(), terms.end()) != terms.end()) {
        throw Error(ErrorKind::InvalidArgument, "vocabulary terms must be unique");
    }
    Vocabulary vocab;
    vocab.terms_ = std::move(terms);
    vocab.min_df_ = min_df;
    std::uint64_t hash = fnv1a64("xpc-vocabulary");
    for (const auto& term : vocab.terms_) {
        hash = fnv1a64(term, hash);
        hash = fnv1a64(std::string_view("\0", 1), hash);
    }
    vocab.fingerprint_ = hash;
    return vocab;
}

std::optional<std::uint32_t> Vocabulary::index(std::string_view term) const {
    const auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                                     [](const std::string& a, std::string_view b) { return a < b; });
    if (it == terms_.end() || *it != term) {
        return std::nullopt;
    }
    return static_cast<std::uint32_t>(it - terms_.begin());
}

nlohmann::json Vocabulary::to_json() const {
    // Object keys serialize sorted, which is also index order.
    nlohmann::json terms = nlohmann::json::object();
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        terms[terms_[i]] = i;
    }
    return {{"fingerprint", fingerprint_hex(fingerprint_)},
            {"min_df", min_df_},
            {"terms", std::move(terms)}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
    try {
        const auto& map = j.at("terms");
        std::vector<std::string> terms(map.size());
        std::vector<bool> seen(map.size(), false);
        for (const auto& [term, value] : map.items()) {
            const auto index = value.get<std::size_t>();
            if (index >= terms.size() || seen[index]) {
                throw Error(ErrorKind::Parse, "vocabulary indices are not dense");
            }
            seen[index] = true;
            terms[index] = term;
        }
        auto vocab = from_terms(terms, j.value("min_df", std::size_t{1}));
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (vocab.terms_[i] != terms[i]) {
                throw Error(ErrorKind::Parse, "vocabulary indices are not in lexicographic order");
            }
        }
        if (j.contains("fingerprint") &&
            parse_fingerprint_hex(j.at("fingerprint").get<std::string>()) != vocab.fingerprint()) {
            throw Error(ErrorKind::VocabularyMismatch, "vocabulary fingerprint does not match its terms");
        }
        return vocab;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("malformed vocabulary: ") + e.what());
    }
}

void VocabularyBuilder::add_document(std::span<const std::string> tokens) {
    std::vector<std::string_view> unique(tokens.begin(), tokens.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (auto term : unique) {
        ++document_frequency_[std::string(term)];
    }
    ++documents_;
}

Vocabulary VocabularyBuilder::build(std::size_t min_df) const {
    if (documents_ == 0) {
        throw Error(ErrorKind::InvalidArgument, "build_vocabulary: no documents");
    }
    std::vector<std::string> kept;
    for (const auto& [term, df] : document_frequency_) {
        if (df >= min_df) {
            kept.push_back(term);
        }
    }
    if (kept.empty()) {
        throw Error(ErrorKind::EmptyVocabulary,
                    "build_vocabulary: no term reaches min_df=" + std::to_string(min_df));
    }
    return Vocabulary::from_terms(std::move(kept), min_df);
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs, std::size_t min_df) {
    VocabularyBuilder builder;
    for (const auto& doc : docs) {
        builder.add_document(doc);
    }
    return builder.build(min_df);
}

double SparseVector::sum() const {
    double total = 0.0;
    for (const auto& [index, value] : entries) {
        total += value;
    }
    return total;
}

double SparseVector::dot(std::span<const double> dense) const {
    double total = 0.0;
    for (const auto& [index, value] : entries) {
        total += dense[index] * value;
    }
    return total;
}

SparseVector featurize(std::span<const std::string> tokens, const Vocabulary& vocab) {
    SparseVector out;
    out.dimension = vocab.size();
    out.token_count = tokens.size();
    if (tokens.empty()) {
        return out;
    }
    std::vector<std::uint32_t> hits;
    hits.reserve(tokens.size());
    for (const auto& token : tokens) {
        if (auto index = vocab.index(token)) {
            hits.push_back(*index);
        }
    }
    std::sort(hits.begin(), hits.end());
    const double denominator = static_cast<double>(tokens.size());
    for (std::size_t i = 0; i < hits.size();) {
        std::size_t j = i;
        while (j < hits.size() && hits[j] == hits[i]) {
            ++j;
        }
        out.entries.emplace_back(hits[i], static_cast<double>(j - i) / denominator);
        i = j;
    }
    return out;
}

std::string fingerprint_hex(std::uint64_t fingerprint) {
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(fingerprint));
    return buffer;
}

std::uint64_t parse_fingerprint_hex(const std::string& hex) {
    if (hex.empty() || hex.size() > 16 ||
        hex.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
        throw Error(ErrorKind::Parse, "malformed fingerprint '" + hex + "'");
    }
    return std::stoull(hex, nullptr, 16);
}

} // namespace xpc::text
