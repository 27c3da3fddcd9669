#include "xpc/rationale.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "xpc/error.hpp"
#include "xpc/parallel.hpp"

namespace xpc::rationale {

std::string_view to_string(Method method) {
    return method == Method::DocumentModel ? "document" : "rationale";
}

Method parse_method(std::string_view name) {
    if (name == "document") {
        return Method::DocumentModel;
    }
    if (name == "rationale") {
        return Method::RationaleModel;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::string_view to_string(MatchMode mode) {
    return mode == MatchMode::Overlap ? "overlap" : "containment";
}

MatchMode parse_match_mode(std::string_view name) {
    if (name == "overlap") {
        return MatchMode::Overlap;
    }
    if (name == "containment") {
        return MatchMode::Containment;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown match mode '" + std::string(name) + "'");
}

void ExtractionConfig::validate() const {
    window.validate();
    if (top_k < 1) {
        throw Error(ErrorKind::InvalidArgument, "top_k must be >= 1");
    }
    if (!(responsive_threshold > 0.0 && responsive_threshold < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "responsive threshold must lie in (0, 1)");
    }
    if (refine && method != Method::DocumentModel) {
        throw Error(ErrorKind::InvalidArgument, "refinement applies to the document-model method only");
    }
}

namespace {

std::filesystem::path vocabulary_path(const std::filesystem::path& dir) { return dir / "vocabulary.json"; }
std::filesystem::path document_path(const std::filesystem::path& dir) { return dir / "document_model.json"; }
std::filesystem::path rationale_path(const std::filesystem::path& dir) { return dir / "rationale_model.json"; }

} // namespace

void ModelSet::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::ofstream out(vocabulary_path(dir), std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + vocabulary_path(dir).string());
    }
    out << vocabulary.to_json().dump() << '\n';
    model::save_model(document, document_path(dir));
    if (rationale) {
        model::save_model(*rationale, rationale_path(dir));
    }
}

ModelSet ModelSet::load(const std::filesystem::path& dir) {
    std::ifstream in(vocabulary_path(dir));
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + vocabulary_path(dir).string());
    }
    ModelSet set;
    try {
        set.vocabulary = text::Vocabulary::from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, vocabulary_path(dir).string() + ": " + e.what());
    }
    set.document = model::load_model(document_path(dir));
    if (std::filesystem::exists(rationale_path(dir))) {
        set.rationale = model::load_model(rationale_path(dir));
    }
    return set;
}

nlohmann::json RationaleResult::to_json() const {
    nlohmann::json snippets_json = nlohmann::json::array();
    for (const auto& s : rationales) {
        snippets_json.push_back(s.to_json());
    }
    nlohmann::json j = {{"doc_id", doc_id}, {"document_score", document_score}, {"rationales", snippets_json}};
    if (!matched.empty()) {
        j["matched"] = matched;
    }
    return j;
}

std::vector<RankedDocument> identify_responsive(const model::LinearClassifier& doc_model,
                                                const text::Vocabulary& vocab,
                                                const corpus::Corpus& corpus, double threshold) {
    if (doc_model.vocab_fingerprint != vocab.fingerprint() || doc_model.dimension() != vocab.size()) {
        throw Error(ErrorKind::VocabularyMismatch, "document model is bound to a different vocabulary");
    }
    std::vector<RankedDocument> ranked;
    std::vector<double> logits;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        const double logit = doc_model.logit(text::featurize(corpus.documents[i].tokens, vocab));
        const double p = model::sigmoid(logit);
        if (p >= threshold) {
            ranked.push_back({i, p});
            logits.push_back(logit);
        }
    }
    std::vector<std::size_t> order(ranked.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return logits[a] > logits[b]; });
    std::vector<RankedDocument> out;
    out.reserve(order.size());
    for (auto i : order) {
        out.push_back(ranked[i]);
    }
    return out;
}

bool ranks_before(const Snippet& a, const Snippet& b) {
    if (a.logit != b.logit) {
        return a.logit > b.logit;
    }
    if (a.span.start != b.span.start) {
        return a.span.start < b.span.start;
    }
    return a.span.length() < b.span.length();
}

std::vector<Snippet> rank_snippets(const Document& doc, std::size_t n, const snippets::SpanScorer& scorer) {
    std::vector<Snippet> ranked;
    for (const auto& span : snippets::window_spans(doc.token_count(), n)) {
        ranked.push_back(snippets::score_span(doc, span, scorer));
    }
    std::sort(ranked.begin(), ranked.end(), ranks_before);
    return ranked;
}

bool match_rationale(TokenSpan snippet, std::span<const RationaleSpan> annotations, MatchMode mode) {
    return std::any_of(annotations.begin(), annotations.end(), [&](const RationaleSpan& a) {
        return mode == MatchMode::Overlap ? snippet.overlaps(a.span) : snippet.contains(a.span);
    });
}

std::vector<Snippet> select_rationales(const Document& doc, std::size_t n, std::size_t top_k,
                                       const snippets::SpanScorer& scorer,
                                       const snippets::RefineConfig* refine) {
    if (doc.token_count() == 0) {
        throw Error(ErrorKind::EmptyDocument, "document '" + doc.id + "' has no tokens");
    }
    auto ranked = rank_snippets(doc, n, scorer);
    ranked.resize(std::min(top_k, ranked.size()));
    if (refine == nullptr) {
        return ranked;
    }
    for (auto& s : ranked) {
        s = snippets::refine_snippet(doc, scorer, s, *refine);
    }
    std::sort(ranked.begin(), ranked.end(), ranks_before);
    ranked.erase(std::unique(ranked.begin(), ranked.end(),
                             [](const Snippet& a, const Snippet& b) { return a.span == b.span; }),
                 ranked.end());
    return ranked;
}

RationaleResult extract_rationales(const Document& doc, const ExtractionConfig& config,
                                   const model::LinearClassifier& doc_model,
                                   const model::LinearClassifier* rationale_model,
                                   const text::Vocabulary& vocab) {
    config.validate();
    const bool wants_rationale_model = config.method == Method::RationaleModel;
    if (wants_rationale_model != (rationale_model != nullptr)) {
        throw Error(ErrorKind::InvalidArgument,
                    wants_rationale_model ? "rationale-model method needs a rationale model"
                                          : "document-model method takes no rationale model");
    }
    const auto& scoring_model = wants_rationale_model ? *rationale_model : doc_model;
    const auto scorer = snippets::model_scorer(scoring_model, vocab);

    RationaleResult result;
    result.doc_id = doc.id;
    result.document_score = model::predict_proba(doc_model, text::featurize(doc.tokens, vocab));
    result.rationales = select_rationales(doc, config.window.n, config.top_k, scorer,
                                          config.refine ? &config.refine_config : nullptr);
    for (const auto& annotation : doc.rationales) {
        bool hit = false;
        for (const auto& s : result.rationales) {
            hit = hit || match_rationale(s.span, std::span(&annotation, 1), config.match_mode);
        }
        result.matched.push_back(hit);
    }
    return result;
}

std::vector<RationaleResult> run_pipeline(const corpus::Corpus& corpus, const ModelSet& models,
                                          const ExtractionConfig& config, std::size_t threads) {
    config.validate();
    if (config.method == Method::RationaleModel && !models.rationale) {
        throw Error(ErrorKind::InvalidArgument, "rationale-model method needs a rationale model");
    }
    auto responsive =
        identify_responsive(models.document, models.vocabulary, corpus, config.responsive_threshold);
    std::sort(responsive.begin(), responsive.end(),
              [](const RankedDocument& a, const RankedDocument& b) { return a.index < b.index; });

    const model::LinearClassifier* rationale_model =
        config.method == Method::RationaleModel ? &*models.rationale : nullptr;
    std::vector<RationaleResult> results(responsive.size());
    parallel_for(responsive.size(), threads, [&](std::size_t i) {
        const auto& doc = corpus.documents[responsive[i].index];
        if (doc.token_count() == 0) {
            results[i] = {doc.id, responsive[i].score, {}, {}};
            return;
        }
        results[i] = extract_rationales(doc, config, models.document, rationale_model, models.vocabulary);
    });
    return results;
}

void write_results_jsonl(const std::vector<RationaleResult>& results, std::ostream& out) {
    for (const auto& r : results) {
        out << r.to_json().dump() << '\n';
    }
}

void write_results_report(const std::vector<RationaleResult>& results, const corpus::Corpus& corpus,
                          const ExtractionConfig& config, std::ostream& out) {
    constexpr std::size_t kExcerptBytes = 400;
    out << "Rationales (" << to_string(config.method) << " model, n=" << config.window.n
        << ", top " << config.top_k << (config.refine ? ", refined" : "") << ")\n";
    out << "Documents at or above threshold " << config.responsive_threshold << ": " << results.size()
        << "\n";
    char line[160];
    for (const auto& r : results) {
        const Document* doc = corpus.find(r.doc_id);
        std::snprintf(line, sizeof line, "\n== %s  document score %.4f\n", r.doc_id.c_str(), r.document_score);
        out << line;
        for (std::size_t k = 0; k < r.rationales.size(); ++k) {
            const auto& s = r.rationales[k];
            std::snprintf(line, sizeof line, "  #%zu  tokens [%zu, %zu)  score %.4f\n", k + 1, s.span.start,
                          s.span.end, s.score.value_or(0.0));
            out << line;
            if (doc != nullptr) {
                std::string excerpt(doc->excerpt(s.span));
                if (excerpt.size() > kExcerptBytes) {
                    std::size_t cut = kExcerptBytes;
                    while (cut > 0 && (static_cast<unsigned char>(excerpt[cut]) & 0xC0) == 0x80) {
                        --cut;  // keep UTF-8 sequences whole
                    }
                    excerpt = excerpt.substr(0, cut) + " ...";
                }
                out << "      \"" << excerpt << "\"\n";
            }
        }
        if (!r.matched.empty()) {
            const auto hits = std::count(r.matched.begin(), r.matched.end(), true);
            out << "  annotations matched: " << hits << "/" << r.matched.size() << "\n";
        }
    }
}

} // namespace xpc::rationale
