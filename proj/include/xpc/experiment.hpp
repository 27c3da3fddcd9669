#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "xpc/corpus.hpp"
#include "xpc/eval.hpp"
#include "xpc/model.hpp"
#include "xpc/rationale.hpp"
#include "xpc/snippets.hpp"
#include "xpc/text.hpp"

namespace xpc::eval {

struct ExperimentConfig {
    std::size_t folds = 5;
    std::uint64_t seed = 7;  // fold assignment and negative sampling derive from it
    std::size_t min_df = 2;
    model::TrainConfig train;
    std::size_t threads = 1;
};

struct TrainedModels {
    text::Vocabulary vocabulary;
    model::LinearClassifier document;
    std::optional<model::LinearClassifier> rationale;
    std::size_t rationale_positives = 0;
    std::size_t rationale_negatives = 0;
};

// Vocabulary over the training documents, a document model over their
// labels, and a rationale model over their usable annotated spans (positive)
// against the sampled not-responsive snippets (negative).
TrainedModels train_models(const corpus::Corpus& corpus, std::span<const std::size_t> train,
                           const snippets::NegativeSamples& negatives, std::size_t min_df,
                           const model::TrainConfig& config, bool with_rationale_model = true);

struct FoldModels {
    FoldSplit split;
    TrainedModels models;
};

struct CrossValidation {
    std::vector<FoldModels> folds;
    snippets::NegativeSamples negatives;
};

std::uint64_t fold_seed(std::uint64_t seed);
std::uint64_t negative_seed(std::uint64_t seed);

// Expects a corpus that already went through filter_rationales.
CrossValidation cross_validate(const corpus::Corpus& corpus, const ExperimentConfig& config);

// Test-fold rationales (positive) and negative snippets scored by both models.
std::vector<FoldSnippetScores> score_test_snippets(const corpus::Corpus& corpus, const CrossValidation& cv,
                                                   std::size_t threads = 1);

SnippetClassificationReport run_snippet_classification(const corpus::Corpus& corpus, const CrossValidation& cv,
                                                       std::size_t threads = 1);

RecallAtKTable run_rationale_identification(const corpus::Corpus& corpus, const CrossValidation& cv,
                                            std::span<const std::size_t> ns, std::size_t max_k,
                                            MatchMode match_mode, bool refine = false,
                                            const snippets::RefineConfig& refine_config = {},
                                            std::size_t threads = 1);

} // namespace xpc::eval
