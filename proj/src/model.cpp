#include "xpc/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "xpc/error.hpp"

namespace xpc::model {

std::string_view to_string(ModelKind kind) {
    return kind == ModelKind::Document ? "document" : "rationale";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "document") {
        return ModelKind::Document;
    }
    if (name == "rationale") {
        return ModelKind::Rationale;
    }
    throw Error(ErrorKind::Parse, "unknown model kind '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
    if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) {
        throw Error(ErrorKind::InvalidArgument, "l2_lambda must be finite and >= 0");
    }
    if (!(tolerance > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "tolerance must be > 0");
    }
}

namespace {

double raw_sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus(double a) {
    return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a)));
}

void check_dimension(std::size_t expected, const text::SparseVector& x) {
    if (x.dimension != expected) {
        throw Error(ErrorKind::DimensionMismatch, "feature dimension " + std::to_string(x.dimension) +
                                                      " does not match model dimension " +
                                                      std::to_string(expected));
    }
}

std::vector<double> margins(std::span<const Example> examples, std::span<const double> weights,
                            double intercept) {
    std::vector<double> z(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        z[i] = examples[i].features.dot(weights) + intercept;
    }
    return z;
}

double loss_from_margins(std::span<const Example> examples, std::span<const double> z,
                         std::span<const double> weights, double l2_lambda) {
    double total = 0.0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        total += examples[i].label == 1 ? softplus(-z[i]) : softplus(z[i]);
    }
    double norm2 = 0.0;
    for (double w : weights) {
        norm2 += w * w;
    }
    return total / static_cast<double>(examples.size()) + 0.5 * l2_lambda * norm2;
}

LossAndGradient evaluate(std::span<const Example> examples, std::span<const double> z,
                         std::span<const double> weights, double l2_lambda) {
    LossAndGradient out;
    out.loss = loss_from_margins(examples, z, weights, l2_lambda);
    out.weight_gradient.assign(weights.size(), 0.0);
    const double scale = 1.0 / static_cast<double>(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const double residual = (raw_sigmoid(z[i]) - examples[i].label) * scale;
        for (const auto& [index, value] : examples[i].features.entries) {
            out.weight_gradient[index] += residual * value;
        }
        out.intercept_gradient += residual;
    }
    for (std::size_t j = 0; j < weights.size(); ++j) {
        out.weight_gradient[j] += l2_lambda * weights[j];
    }
    return out;
}

void validate_examples(std::span<const Example> examples) {
    if (examples.empty()) {
        throw Error(ErrorKind::InvalidArgument, "no training examples");
    }
    const std::size_t dim = examples.front().features.dimension;
    bool has_positive = false;
    bool has_negative = false;
    for (const auto& ex : examples) {
        check_dimension(dim, ex.features);
        if (ex.label != 0 && ex.label != 1) {
            throw Error(ErrorKind::InvalidArgument, "labels must be 0 or 1");
        }
        (ex.label == 1 ? has_positive : has_negative) = true;
    }
    if (!has_positive || !has_negative) {
        throw Error(ErrorKind::SingleClass, "training data contains a single class");
    }
}

} // namespace

double sigmoid(double z) {
    constexpr double kLow = std::numeric_limits<double>::min();
    const double kHigh = std::nextafter(1.0, 0.0);
    return std::clamp(raw_sigmoid(z), kLow, kHigh);
}

double LinearClassifier::logit(const text::SparseVector& x) const {
    check_dimension(weights.size(), x);
    return x.dot(weights) + intercept;
}

double predict_proba(const LinearClassifier& model, const text::SparseVector& x) {
    return sigmoid(model.logit(x));
}

LossAndGradient loss_and_gradient(std::span<const Example> examples, std::span<const double> weights,
                                  double intercept, double l2_lambda) {
    for (const auto& ex : examples) {
        check_dimension(weights.size(), ex.features);
    }
    if (examples.empty()) {
        throw Error(ErrorKind::InvalidArgument, "no examples");
    }
    const auto z = margins(examples, weights, intercept);
    return evaluate(examples, z, weights, l2_lambda);
}

LinearClassifier train(std::span<const Example> examples, const TrainConfig& config, ModelKind kind,
                       std::uint64_t vocab_fingerprint, TrainTrace* trace) {
    config.validate();
    validate_examples(examples);

    constexpr double kArmijo = 1e-4;
    constexpr double kMaxStep = 1e12;
    constexpr double kMinStep = 1e-14;

    LinearClassifier model;
    model.kind = kind;
    model.vocab_fingerprint = vocab_fingerprint;
    model.weights.assign(examples.front().features.dimension, 0.0);

    auto z = margins(examples, model.weights, model.intercept);
    auto current = evaluate(examples, z, model.weights, config.l2_lambda);

    TrainTrace local;
    local.losses.push_back(current.loss);

    std::vector<double> candidate(model.weights.size());
    double step = 0.5;
    for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
        double grad_inf = std::abs(current.intercept_gradient);
        double grad_sq = current.intercept_gradient * current.intercept_gradient;
        for (double g : current.weight_gradient) {
            grad_inf = std::max(grad_inf, std::abs(g));
            grad_sq += g * g;
        }
        local.gradient_norm = grad_inf;
        if (grad_inf < config.tolerance) {
            local.converged = true;
            break;
        }

        step = std::min(step * 2.0, kMaxStep);
        bool accepted = false;
        double candidate_intercept = 0.0;
        double candidate_loss = 0.0;
        std::vector<double> candidate_z;
        while (step >= kMinStep) {
            for (std::size_t j = 0; j < candidate.size(); ++j) {
                candidate[j] = model.weights[j] - step * current.weight_gradient[j];
            }
            candidate_intercept = model.intercept - step * current.intercept_gradient;
            candidate_z = margins(examples, candidate, candidate_intercept);
            candidate_loss = loss_from_margins(examples, candidate_z, candidate, config.l2_lambda);
            if (candidate_loss <= current.loss - kArmijo * step * grad_sq) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;  // no representable descent step left
        }
        model.weights.swap(candidate);
        model.intercept = candidate_intercept;
        candidate.assign(model.weights.size(), 0.0);
        current = evaluate(examples, candidate_z, model.weights, config.l2_lambda);
        local.losses.push_back(current.loss);
        local.iterations = iter + 1;
    }

    if (trace != nullptr) {
        *trace = std::move(local);
    }
    return model;
}

nlohmann::json LinearClassifier::to_json() const {
    return {{"kind", to_string(kind)},
            {"intercept", intercept},
            {"weights", weights},
            {"vocab_fingerprint", text::fingerprint_hex(vocab_fingerprint)}};
}

LinearClassifier LinearClassifier::from_json(const nlohmann::json& j) {
    try {
        LinearClassifier model;
        model.kind = parse_model_kind(j.at("kind").get<std::string>());
        model.intercept = j.at("intercept").get<double>();
        model.weights = j.at("weights").get<std::vector<double>>();
        model.vocab_fingerprint = text::parse_fingerprint_hex(j.at("vocab_fingerprint").get<std::string>());
        const bool finite = std::isfinite(model.intercept) &&
                            std::all_of(model.weights.begin(), model.weights.end(),
                                        [](double w) { return std::isfinite(w); });
        if (!finite) {
            throw Error(ErrorKind::Parse, "model contains non-finite values");
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("malformed model: ") + e.what());
    }
}

void save_model(const LinearClassifier& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write model '" + path.string() + "'");
    }
    out << model.to_json().dump() << '\n';
}

LinearClassifier load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open model '" + path.string() + "'");
    }
    try {
        return LinearClassifier::from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, "model '" + path.string() + "': " + e.what());
    }
}

} // namespace xpc::model
