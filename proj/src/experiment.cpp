#include "xpc/experiment.hpp"

#include "xpc/error.hpp"
#include "xpc/parallel.hpp"
#include "xpc/random.hpp"

namespace xpc::eval {

std::uint64_t fold_seed(std::uint64_t seed) { return derive_seed(seed, "folds"); }
std::uint64_t negative_seed(std::uint64_t seed) { return derive_seed(seed, "negatives"); }

TrainedModels train_models(const corpus::Corpus& corpus, std::span<const std::size_t> train,
                           const snippets::NegativeSamples& negatives, std::size_t min_df,
                           const model::TrainConfig& config, bool with_rationale_model) {
    text::VocabularyBuilder builder;
    for (auto i : train) {
        builder.add_document(corpus.documents[i].tokens);
    }
    TrainedModels out;
    out.vocabulary = builder.build(min_df);
    const auto& vocab = out.vocabulary;

    std::vector<model::Example> document_examples;
    std::vector<model::Example> rationale_examples;
    for (auto i : train) {
        const auto& doc = corpus.documents[i];
        if (doc.label == corpus::Label::Unlabeled) {
            continue;
        }
        const bool responsive = doc.label == corpus::Label::Responsive;
        document_examples.push_back({text::featurize(doc.tokens, vocab), responsive ? 1 : 0});
        if (doc.has_usable_rationales()) {
            for (const auto& r : doc.rationales) {
                rationale_examples.push_back({text::featurize(doc.tokens_in(r.span), vocab), 1});
                ++out.rationale_positives;
            }
        }
        if (i < negatives.by_document.size() && negatives.by_document[i]) {
            rationale_examples.push_back({text::featurize(doc.tokens_in(negatives.by_document[i]->span), vocab), 0});
            ++out.rationale_negatives;
        }
    }
    out.document = model::train(document_examples, config, model::ModelKind::Document, vocab.fingerprint());
    if (!with_rationale_model) {
        return out;
    }
    try {
        out.rationale = model::train(rationale_examples, config, model::ModelKind::Rationale, vocab.fingerprint());
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("rationale model: ") + e.what() +
                                  " (needs annotated rationales and sampleable not-responsive documents)");
    }
    return out;
}

CrossValidation cross_validate(const corpus::Corpus& corpus, const ExperimentConfig& config) {
    CrossValidation cv;
    cv.negatives = snippets::sample_negative_snippets(corpus, negative_seed(config.seed));
    auto splits = kfold_split(corpus, config.folds, fold_seed(config.seed));
    cv.folds.resize(splits.size());
    parallel_for(splits.size(), config.threads, [&](std::size_t f) {
        cv.folds[f].models = train_models(corpus, splits[f].train, cv.negatives, config.min_df, config.train);
        cv.folds[f].split = std::move(splits[f]);
    });
    return cv;
}

std::vector<FoldSnippetScores> score_test_snippets(const corpus::Corpus& corpus, const CrossValidation& cv,
                                                   std::size_t threads) {
    std::vector<FoldSnippetScores> out(cv.folds.size());
    parallel_for(cv.folds.size(), threads, [&](std::size_t f) {
        const auto& fold = cv.folds[f];
        const auto& m = fold.models;
        auto score = [&](const corpus::Document& doc, corpus::TokenSpan span, bool positive) {
            const auto x = text::featurize(doc.tokens_in(span), m.vocabulary);
            out[f].rationale_model.push_back({model::predict_proba(*m.rationale, x), positive});
            out[f].document_model.push_back({model::predict_proba(m.document, x), positive});
        };
        for (auto i : fold.split.test) {
            const auto& doc = corpus.documents[i];
            if (doc.has_usable_rationales()) {
                for (const auto& r : doc.rationales) {
                    score(doc, r.span, true);
                }
            }
            if (i < cv.negatives.by_document.size() && cv.negatives.by_document[i]) {
                score(doc, cv.negatives.by_document[i]->span, false);
            }
        }
    });
    return out;
}

SnippetClassificationReport run_snippet_classification(const corpus::Corpus& corpus, const CrossValidation& cv,
                                                       std::size_t threads) {
    const auto scores = score_test_snippets(corpus, cv, threads);
    return snippet_classification_eval(scores);
}

RecallAtKTable run_rationale_identification(const corpus::Corpus& corpus, const CrossValidation& cv,
                                            std::span<const std::size_t> ns, std::size_t max_k,
                                            MatchMode match_mode, bool refine,
                                            const snippets::RefineConfig& refine_config, std::size_t threads) {
    std::vector<FoldRationaleInput> inputs;
    for (const auto& fold : cv.folds) {
        FoldRationaleInput input;
        for (auto i : fold.split.test) {
            if (corpus.documents[i].label == corpus::Label::Responsive) {
                input.documents.push_back(&corpus.documents[i]);
            }
        }
        const auto& m = fold.models;
        input.scorers.emplace_back(Method::RationaleModel, snippets::model_scorer(*m.rationale, m.vocabulary));
        input.scorers.emplace_back(Method::DocumentModel, snippets::model_scorer(m.document, m.vocabulary));
        inputs.push_back(std::move(input));
    }
    return rationale_identification_eval(inputs, ns, max_k, match_mode, refine ? &refine_config : nullptr,
                                         threads);
}

} // namespace xpc::eval
