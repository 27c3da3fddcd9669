#include "xpc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "xpc/error.hpp"

namespace xpc::corpus {

std::string_view to_string(Label label) {
    switch (label) {
    case Label::Responsive: return "responsive";
    case Label::NotResponsive: return "not_responsive";
    case Label::Unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

Label parse_label(std::string_view name) {
    if (name == "responsive") {
        return Label::Responsive;
    }
    if (name == "not_responsive") {
        return Label::NotResponsive;
    }
    if (name == "unlabeled") {
        return Label::Unlabeled;
    }
    throw Error(ErrorKind::Parse, "unknown label '" + std::string(name) + "'");
}

Document Document::from_text(std::string id, std::string text, Label label) {
    Document doc;
    doc.id = std::move(id);
    doc.text = std::move(text);
    auto tokenized = text::tokenize_with_offsets(doc.text);
    doc.tokens = std::move(tokenized.tokens);
    doc.offsets = std::move(tokenized.offsets);
    doc.label = label;
    return doc;
}

std::span<const std::string> Document::tokens_in(TokenSpan span) const {
    if (span.start > span.end || span.end > tokens.size()) {
        throw Error(ErrorKind::OutOfBounds, "span outside document '" + id + "'");
    }
    return std::span<const std::string>(tokens).subspan(span.start, span.length());
}

std::string_view Document::excerpt(TokenSpan span) const {
    if (span.length() == 0 || span.end > offsets.size()) {
        return {};
    }
    const std::size_t begin = offsets[span.start].begin;
    const std::size_t end = offsets[span.end - 1].end;
    return std::string_view(text).substr(begin, end - begin);
}

std::size_t Corpus::count(Label label) const {
    return static_cast<std::size_t>(std::count_if(documents.begin(), documents.end(),
                                                  [&](const Document& d) { return d.label == label; }));
}

const Document* Corpus::find(std::string_view id) const {
    for (const auto& doc : documents) {
        if (doc.id == id) {
            return &doc;
        }
    }
    return nullptr;
}

std::optional<TokenSpan> locate_rationale(const Document& doc, std::string_view rationale_text) {
    const auto needle = text::tokenize(rationale_text);
    if (needle.empty() || needle.size() > doc.tokens.size()) {
        return std::nullopt;
    }
    const auto it = std::search(doc.tokens.begin(), doc.tokens.end(), needle.begin(), needle.end());
    if (it == doc.tokens.end()) {
        return std::nullopt;
    }
    const auto start = static_cast<std::size_t>(it - doc.tokens.begin());
    return TokenSpan{start, start + needle.size()};
}

namespace {

Document parse_record(const nlohmann::json& j, std::size_t& unresolved) {
    if (!j.is_object()) {
        throw Error(ErrorKind::Parse, "record is not a JSON object");
    }
    auto doc = Document::from_text(j.at("id").get<std::string>(), j.at("text").get<std::string>(),
                                   parse_label(j.at("label").get<std::string>()));
    if (doc.id.empty()) {
        throw Error(ErrorKind::Parse, "empty id");
    }
    if (!j.contains("rationales") || j.at("rationales").is_null()) {
        return doc;
    }
    for (const auto& r : j.at("rationales")) {
        if (r.contains("text")) {
            const auto rationale_text = r.at("text").get<std::string>();
            if (auto span = locate_rationale(doc, rationale_text)) {
                doc.rationales.push_back({*span, SpanSource::Resolved});
            } else {
                ++unresolved;
            }
            continue;
        }
        const auto start = r.at("start_token").get<std::int64_t>();
        const auto end = r.at("end_token").get<std::int64_t>();
        if (start < 0 || end <= start || static_cast<std::size_t>(end) > doc.token_count()) {
            throw Error(ErrorKind::OutOfBounds,
                        "document '" + doc.id + "': rationale span [" + std::to_string(start) + ", " +
                            std::to_string(end) + ") outside [0, " +
                            std::to_string(doc.token_count()) + ")");
        }
        doc.rationales.push_back(
            {{static_cast<std::size_t>(start), static_cast<std::size_t>(end)}, SpanSource::Annotated});
    }
    return doc;
}

} // namespace

Corpus parse_corpus(std::istream& in, const std::string& source_name) {
    Corpus corpus;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = source_name + ":" + std::to_string(line_number) + ": ";
        Document doc;
        try {
            doc = parse_record(nlohmann::json::parse(line), corpus.unresolved_rationales);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Parse, where + "malformed record: " + e.what());
        } catch (const Error& e) {
            throw Error(e.kind(), where + e.what());
        }
        if (!ids.insert(doc.id).second) {
            throw Error(ErrorKind::DuplicateId, where + "duplicate id '" + doc.id + "'");
        }
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open corpus '" + path.string() + "'");
    }
    return parse_corpus(in, path.string());
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& doc : corpus.documents) {
        nlohmann::ordered_json j;
        j["id"] = doc.id;
        j["text"] = doc.text;
        j["label"] = to_string(doc.label);
        auto spans = nlohmann::ordered_json::array();
        for (const auto& r : doc.rationales) {
            spans.push_back({{"start_token", r.span.start}, {"end_token", r.span.end}});
        }
        j["rationales"] = std::move(spans);
        out << j.dump() << '\n';
    }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write corpus '" + path.string() + "'");
    }
    write_corpus(corpus, out);
}

Corpus filter_rationales(Corpus corpus, std::size_t min_words, std::size_t max_words) {
    for (auto& doc : corpus.documents) {
        if (doc.label != Label::Responsive) {
            continue;
        }
        std::erase_if(doc.rationales, [&](const RationaleSpan& r) {
            return r.word_length() < min_words || r.word_length() >= max_words;
        });
        if (doc.rationales.empty()) {
            doc.excluded_from_rationale_eval = true;
        }
    }
    return corpus;
}

namespace {

LengthDistribution describe(const std::vector<double>& values) {
    LengthDistribution out;
    if (values.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    out.mean = sum / static_cast<double>(values.size());
    double squares = 0.0;
    for (double v : values) {
        squares += (v - out.mean) * (v - out.mean);
    }
    out.stddev = std::sqrt(squares / static_cast<double>(values.size()));
    return out;
}

} // namespace

CorpusStats corpus_stats(const Corpus& corpus, std::size_t length_threshold) {
    CorpusStats stats;
    stats.documents = corpus.documents.size();
    stats.unresolved_rationales = corpus.unresolved_rationales;
    stats.length_threshold = length_threshold;

    std::vector<double> doc_lengths;
    std::vector<double> rationale_lengths;
    std::size_t below = 0;
    for (const auto& doc : corpus.documents) {
        doc_lengths.push_back(static_cast<double>(doc.token_count()));
        switch (doc.label) {
        case Label::Responsive: ++stats.responsive; break;
        case Label::NotResponsive: ++stats.not_responsive; break;
        case Label::Unlabeled: ++stats.unlabeled; break;
        }
        if (doc.label != Label::Responsive) {
            continue;
        }
        if (doc.excluded_from_rationale_eval) {
            ++stats.excluded;
        }
        for (const auto& r : doc.rationales) {
            rationale_lengths.push_back(static_cast<double>(r.word_length()));
            if (r.word_length() < length_threshold) {
                ++below;
            }
        }
    }
    const std::size_t labeled = stats.responsive + stats.not_responsive;
    stats.responsive_rate =
        labeled == 0 ? 0.0 : static_cast<double>(stats.responsive) / static_cast<double>(labeled);
    stats.doc_length = describe(doc_lengths);
    stats.rationale_count = rationale_lengths.size();
    stats.rationale_length = describe(rationale_lengths);
    stats.fraction_below_threshold =
        rationale_lengths.empty()
            ? 0.0
            : static_cast<double>(below) / static_cast<double>(rationale_lengths.size());
    return stats;
}

nlohmann::json CorpusStats::to_json() const {
    return {
        {"documents", documents},
        {"responsive", responsive},
        {"not_responsive", not_responsive},
        {"unlabeled", unlabeled},
        {"responsive_rate", responsive_rate},
        {"excluded_from_rationale_eval", excluded},
        {"unresolved_rationales", unresolved_rationales},
        {"doc_length", {{"mean", doc_length.mean}, {"std", doc_length.stddev}}},
        {"rationale_count", rationale_count},
        {"rationale_length", {{"mean", rationale_length.mean}, {"std", rationale_length.stddev}}},
        {"length_threshold", length_threshold},
        {"fraction_below_threshold", fraction_below_threshold},
    };
}

} // namespace xpc::corpus
