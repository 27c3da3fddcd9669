#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xpc/text.hpp"

namespace xpc::model {

enum class ModelKind { Document, Rationale };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct TrainConfig {
    double l2_lambda = 1e-4;
    std::size_t max_iters = 1000;
    double tolerance = 1e-6;  // on the gradient infinity-norm
    // Training starts from zero and is deterministic; kept so a run config
    // records every seed it was given.
    std::uint64_t seed = 0;

    void validate() const;
};

struct Example {
    text::SparseVector features;
    int label = 0;  // 0 or 1
};

struct LinearClassifier {
    ModelKind kind = ModelKind::Document;
    std::vector<double> weights;
    double intercept = 0.0;
    std::uint64_t vocab_fingerprint = 0;

    std::size_t dimension() const { return weights.size(); }
    // w.x + b; throws DimensionMismatch.
    double logit(const text::SparseVector& x) const;

    nlohmann::json to_json() const;
    static LinearClassifier from_json(const nlohmann::json& j);
};

// Logistic function kept strictly inside (0, 1): saturated values are pinned
// to the nearest representable interior point.
double sigmoid(double z);

double predict_proba(const LinearClassifier& model, const text::SparseVector& x);

struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> weight_gradient;
    double intercept_gradient = 0.0;
};

// Mean logistic loss + (l2_lambda / 2) * ||w||^2. The intercept is not
// penalized.
LossAndGradient loss_and_gradient(std::span<const Example> examples, std::span<const double> weights,
                                  double intercept, double l2_lambda);

struct TrainTrace {
    std::vector<double> losses;  // initial loss, then one entry per accepted step
    std::size_t iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
};

// Full-batch gradient descent with Armijo backtracking from zero weights.
LinearClassifier train(std::span<const Example> examples, const TrainConfig& config,
                       ModelKind kind = ModelKind::Document, std::uint64_t vocab_fingerprint = 0,
                       TrainTrace* trace = nullptr);

void save_model(const LinearClassifier& model, const std::filesystem::path& path);
LinearClassifier load_model(const std::filesystem::path& path);

} // namespace xpc::model
