#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "xpc/corpus.hpp"
#include "xpc/error.hpp"
#include "xpc/random.hpp"

namespace xpc::corpus {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::size_t kSyllables = 14 * 5;

// Pseudo-word for a vocabulary slot. Every syllable is consonant+vowel, so
// distinct indices always map to distinct strings.
std::string pseudo_word(std::size_t index) {
    std::size_t value = index + kSyllables + 1;  // at least two syllables
    std::string word;
    while (value > 0) {
        const std::size_t digit = (value - 1) % kSyllables;
        word.insert(word.begin(), kVowels[digit % 5]);
        word.insert(word.begin(), kConsonants[digit / 5]);
        value = (value - 1) / kSyllables;
    }
    return word;
}

// Zipf(s = 1) sampler over [0, size).
class ZipfSampler {
public:
    explicit ZipfSampler(std::size_t size) : cdf_(size) {
        double total = 0.0;
        for (std::size_t r = 0; r < size; ++r) {
            total += 1.0 / static_cast<double>(r + 1);
            cdf_[r] = total;
        }
        for (auto& c : cdf_) {
            c /= total;
        }
    }

    std::size_t operator()(Rng& rng) const {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    }

private:
    std::vector<double> cdf_;
};

std::size_t clipped_length(Rng& rng, const LengthDistribution& dist, std::size_t lo, std::size_t hi) {
    const double draw = std::round(rng.normal(dist.mean, dist.stddev));
    const double clipped = std::clamp(draw, static_cast<double>(lo), static_cast<double>(hi));
    return static_cast<std::size_t>(clipped);
}

} // namespace

void SyntheticConfig::validate() const {
    auto fail = [](const std::string& what) {
        throw Error(ErrorKind::InvalidArgument, "synthetic config: " + what);
    };
    if (n_docs == 0) {
        fail("n_docs must be positive");
    }
    if (!(responsive_rate > 0.0 && responsive_rate < 1.0)) {
        fail("responsive_rate must lie in (0, 1)");
    }
    if (!(topic_mix > 0.5 && topic_mix <= 1.0)) {
        fail("topic_mix must lie in (0.5, 1]");
    }
    if (background_vocab_size < 10 || topic_vocab_size < 10) {
        fail("vocabulary sizes must be at least 10");
    }
    if (doc_length.mean <= 0.0 || doc_length.stddev < 0.0 || rationale_length.mean <= 0.0 ||
        rationale_length.stddev < 0.0) {
        fail("length distributions need a positive mean and non-negative stddev");
    }
    if (min_rationale_words == 0 || min_rationale_words > max_rationale_words) {
        fail("rationale bounds must satisfy 0 < min <= max");
    }
    if (min_doc_words == 0) {
        fail("min_doc_words must be positive");
    }
}

nlohmann::json SyntheticConfig::to_json() const {
    return {
        {"n_docs", n_docs},
        {"responsive_rate", responsive_rate},
        {"doc_length", {{"mean", doc_length.mean}, {"std", doc_length.stddev}}},
        {"rationale_length", {{"mean", rationale_length.mean}, {"std", rationale_length.stddev}}},
        {"min_doc_words", min_doc_words},
        {"min_rationale_words", min_rationale_words},
        {"max_rationale_words", max_rationale_words},
        {"background_vocab_size", background_vocab_size},
        {"topic_vocab_size", topic_vocab_size},
        {"topic_mix", topic_mix},
        {"seed", seed},
    };
}

Corpus generate_synthetic_corpus(const SyntheticConfig& config) {
    config.validate();

    std::vector<std::string> words;
    words.reserve(config.background_vocab_size + config.topic_vocab_size);
    for (std::size_t i = 0; i < config.background_vocab_size + config.topic_vocab_size; ++i) {
        words.push_back(pseudo_word(i));
    }
    const ZipfSampler background(config.background_vocab_size);

    Corpus corpus;
    corpus.provenance = {true, config};
    corpus.documents.reserve(config.n_docs);

    for (std::size_t d = 0; d < config.n_docs; ++d) {
        Rng rng(derive_seed(config.seed, "synthetic-doc-" + std::to_string(d)));
        const bool responsive = rng.uniform() < config.responsive_rate;
        std::size_t length = clipped_length(rng, config.doc_length, config.min_doc_words,
                                            std::numeric_limits<std::size_t>::max() / 2);

        TokenSpan planted;
        if (responsive) {
            const std::size_t rationale = clipped_length(rng, config.rationale_length,
                                                         config.min_rationale_words,
                                                         config.max_rationale_words);
            length = std::max(length, rationale);
            const std::size_t start = rng.uniform_int(0, length - rationale);
            planted = {start, start + rationale};
        }

        std::string text;
        text.reserve(length * 7);
        for (std::size_t t = 0; t < length; ++t) {
            std::size_t slot = 0;
            if (responsive && t >= planted.start && t < planted.end && rng.uniform() < config.topic_mix) {
                slot = config.background_vocab_size +
                       rng.uniform_int(0, config.topic_vocab_size - 1);
            } else {
                slot = background(rng);
            }
            if (t > 0) {
                text.push_back(' ');
            }
            text += words[slot];
            if (rng.uniform() < 1.0 / 12.0) {
                text.push_back('.');
            }
        }

        char id[32];
        std::snprintf(id, sizeof id, "doc-%06zu", d);
        auto doc = Document::from_text(id, std::move(text),
                                       responsive ? Label::Responsive : Label::NotResponsive);
        if (responsive) {
            doc.rationales.push_back({planted, SpanSource::Annotated});
        }
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

} // namespace xpc::corpus
