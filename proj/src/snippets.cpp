#include "xpc/snippets.hpp"

#include <algorithm>
#include <ostream>

#include "xpc/error.hpp"

namespace xpc::snippets {

nlohmann::json Snippet::to_json() const {
    nlohmann::json j = {{"doc_id", doc_id}, {"start_token", span.start}, {"end_token", span.end}};
    j["score"] = score ? nlohmann::json(*score) : nlohmann::json(nullptr);
    return j;
}

void WindowConfig::validate() const {
    if (n < 2 || n % 2 != 0) {
        throw Error(ErrorKind::InvalidArgument,
                    "window size must be even and at least 2 (got " + std::to_string(n) + ")");
    }
}

std::vector<TokenSpan> window_spans(std::size_t length, std::size_t n) {
    WindowConfig{n}.validate();
    std::vector<TokenSpan> spans;
    if (length == 0) {
        return spans;
    }
    if (length <= n) {
        spans.push_back({0, length});
        return spans;
    }
    const std::size_t stride = n / 2;
    for (std::size_t start = 0; start < length; start += stride) {
        const TokenSpan candidate{start, std::min(start + n, length)};
        if (!spans.empty() && spans.back().contains(candidate)) {
            continue;
        }
        spans.push_back(candidate);
    }
    return spans;
}

std::vector<Snippet> window_document(const Document& doc, const WindowConfig& config) {
    std::vector<Snippet> out;
    for (const auto& span : window_spans(doc.token_count(), config.n)) {
        out.push_back({doc.id, span, std::nullopt, 0.0});
    }
    return out;
}

SpanScorer model_scorer(const model::LinearClassifier& model, const text::Vocabulary& vocab) {
    if (model.vocab_fingerprint != vocab.fingerprint() || model.dimension() != vocab.size()) {
        throw Error(ErrorKind::VocabularyMismatch,
                    std::string(model::to_string(model.kind)) +
                        " model is bound to a different vocabulary (model " +
                        text::fingerprint_hex(model.vocab_fingerprint) + ", vocabulary " +
                        text::fingerprint_hex(vocab.fingerprint()) + ")");
    }
    return [&model, &vocab](const Document& doc, TokenSpan span) {
        return model.logit(text::featurize(doc.tokens_in(span), vocab));
    };
}

Snippet score_span(const Document& doc, TokenSpan span, const SpanScorer& scorer) {
    const double logit = scorer(doc, span);
    return {doc.id, span, model::sigmoid(logit), logit};
}

std::optional<Snippet> sample_negative_snippet(const Document& doc, Rng& rng) {
    if (doc.label != corpus::Label::NotResponsive) {
        throw Error(ErrorKind::InvalidArgument,
                    "negative snippets come from not-responsive documents ('" + doc.id + "')");
    }
    const std::size_t length = doc.token_count();
    if (length < kNegativeMinWords) {
        return std::nullopt;
    }
    const std::size_t drawn = rng.uniform_int(kNegativeMinWords, kNegativeMaxWords);
    const std::size_t words = std::min(drawn, length);
    const std::size_t start = rng.uniform_int(0, length - words);
    return Snippet{doc.id, {start, start + words}, std::nullopt, 0.0};
}

NegativeSamples sample_negative_snippets(const corpus::Corpus& corpus, std::uint64_t seed) {
    NegativeSamples out;
    out.by_document.resize(corpus.documents.size());
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        const auto& doc = corpus.documents[i];
        if (doc.label != corpus::Label::NotResponsive) {
            continue;
        }
        Rng rng(derive_seed(seed, "negative:" + doc.id));
        out.by_document[i] = sample_negative_snippet(doc, rng);
        ++(out.by_document[i] ? out.sampled : out.skipped);
    }
    return out;
}

Snippet refine_snippet(const Document& doc, const SpanScorer& scorer, const Snippet& seed,
                       const RefineConfig& config, RefineTrace* trace) {
    Snippet best = score_span(doc, seed.span, scorer);
    RefineTrace local;
    local.scores.push_back(*best.score);

    while (best.length() / 2 >= config.min_size) {
        const std::size_t child = (best.length() / 2) & ~std::size_t{1};
        if (child < 2) {
            break;
        }
        std::optional<Snippet> top;
        for (const auto& rel : window_spans(best.length(), child)) {
            const TokenSpan span{best.span.start + rel.start, best.span.start + rel.end};
            auto candidate = score_span(doc, span, scorer);
            if (!top || candidate.logit > top->logit) {  // strict: earliest start wins ties
                top = std::move(candidate);
            }
        }
        if (!top || !(*top->score > *best.score + config.epsilon)) {
            break;
        }
        best = std::move(*top);
        local.scores.push_back(*best.score);
        ++local.accepted_steps;
    }

    if (trace != nullptr) {
        *trace = std::move(local);
    }
    return best;
}

void write_snippets_jsonl(const std::vector<Snippet>& snippets, std::ostream& out) {
    for (const auto& s : snippets) {
        out << s.to_json().dump() << '\n';
    }
}

} // namespace xpc::snippets
