#include "xpc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "xpc/error.hpp"
#include "xpc/parallel.hpp"
#include "xpc/random.hpp"

namespace xpc::eval {

namespace {

// Integral values serialize as JSON integers so counts print exactly.
nlohmann::json number(double value) {
    if (std::isfinite(value) && value == std::floor(value) && std::abs(value) < 9.0e15) {
        return static_cast<std::int64_t>(value);
    }
    return value;
}

nlohmann::json range_json(const CoverageRange& r) {
    return {{"min", number(r.min_words)}, {"max", number(r.max_words)}};
}

template <class T>
void shuffle(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::swap(values[i - 1], values[rng.uniform_int(0, i - 1)]);
    }
}

std::string format(const char* pattern, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, pattern, value);
    return buffer;
}

} // namespace

std::vector<FoldSplit> kfold_split(const corpus::Corpus& corpus, std::size_t k, std::uint64_t seed) {
    if (k < 2) {
        throw Error(ErrorKind::InvalidArgument, "k-fold split needs k >= 2");
    }
    std::vector<std::size_t> positives;
    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        switch (corpus.documents[i].label) {
        case corpus::Label::Responsive: positives.push_back(i); break;
        case corpus::Label::NotResponsive: negatives.push_back(i); break;
        case corpus::Label::Unlabeled: break;
        }
    }
    if (positives.size() < k || negatives.size() < k) {
        throw Error(ErrorKind::ClassTooSmall,
                    "k-fold split needs at least " + std::to_string(k) + " documents per class (responsive " +
                        std::to_string(positives.size()) + ", not responsive " +
                        std::to_string(negatives.size()) + ")");
    }
    Rng rng(seed);
    shuffle(positives, rng);
    shuffle(negatives, rng);

    std::vector<std::size_t> fold_of(corpus.documents.size(), k);
    std::size_t dealt = 0;
    for (auto i : positives) {
        fold_of[i] = dealt++ % k;
    }
    for (auto i : negatives) {
        fold_of[i] = dealt++ % k;
    }

    std::vector<FoldSplit> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        folds[f].fold_id = f;
    }
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] == k) {
            continue;
        }
        for (std::size_t f = 0; f < k; ++f) {
            (fold_of[i] == f ? folds[f].test : folds[f].train).push_back(i);
        }
    }
    return folds;
}

PRCurve pr_curve(std::span<const ScoredItem> items) {
    std::vector<ScoredItem> sorted(items.begin(), items.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ScoredItem& a, const ScoredItem& b) { return a.score > b.score; });
    const auto total_positive =
        static_cast<std::size_t>(std::count_if(sorted.begin(), sorted.end(), [](auto& s) { return s.positive; }));
    if (total_positive == 0) {
        throw Error(ErrorKind::NoPositives, "precision/recall needs at least one positive item");
    }
    PRCurve curve;
    curve.positive_rate = static_cast<double>(total_positive) / static_cast<double>(sorted.size());
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        const double threshold = sorted[i].score;
        while (i < sorted.size() && sorted[i].score == threshold) {
            ++(sorted[i].positive ? tp : fp);
            ++i;
        }
        curve.points.push_back({static_cast<double>(tp) / static_cast<double>(total_positive),
                                static_cast<double>(tp) / static_cast<double>(tp + fp), threshold});
    }
    return curve;
}

double interpolate_precision(const PRCurve& curve, double recall) {
    const auto& pts = curve.points;
    if (pts.empty()) {
        throw Error(ErrorKind::InvalidArgument, "empty precision/recall curve");
    }
    if (recall <= pts.front().recall) {
        return pts.front().precision;
    }
    for (std::size_t j = 1; j < pts.size(); ++j) {
        if (pts[j].recall < recall) {
            continue;
        }
        if (pts[j].recall == recall) {
            return pts[j].precision;
        }
        const auto& lo = pts[j - 1];
        const auto& hi = pts[j];
        const double t = (recall - lo.recall) / (hi.recall - lo.recall);
        return lo.precision + t * (hi.precision - lo.precision);
    }
    return pts.back().precision;
}

double AveragedPRCurve::precision_at(double r) const {
    if (recall.empty()) {
        throw Error(ErrorKind::InvalidArgument, "empty averaged curve");
    }
    const double position = std::clamp(r, 0.0, 1.0) * static_cast<double>(recall.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(position));
    const auto hi = std::min(lo + 1, recall.size() - 1);
    const double t = position - static_cast<double>(lo);
    return precision[lo] + t * (precision[hi] - precision[lo]);
}

AveragedPRCurve average_pr_curves(std::vector<PRCurve> folds) {
    if (folds.empty()) {
        throw Error(ErrorKind::InvalidArgument, "no folds to average");
    }
    AveragedPRCurve out;
    constexpr std::size_t kGrid = 100;
    for (std::size_t g = 0; g <= kGrid; ++g) {
        const double r = static_cast<double>(g) / static_cast<double>(kGrid);
        double sum = 0.0;
        for (const auto& fold : folds) {
            sum += interpolate_precision(fold, r);
        }
        out.recall.push_back(r);
        out.precision.push_back(sum / static_cast<double>(folds.size()));
    }
    out.folds = std::move(folds);
    return out;
}

SnippetClassificationReport snippet_classification_eval(std::span<const FoldSnippetScores> folds) {
    std::vector<PRCurve> rationale_curves;
    std::vector<PRCurve> document_curves;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        try {
            rationale_curves.push_back(pr_curve(folds[f].rationale_model));
            document_curves.push_back(pr_curve(folds[f].document_model));
        } catch (const Error& e) {
            throw Error(e.kind(), "fold " + std::to_string(f) + ": " + e.what());
        }
    }
    return {average_pr_curves(std::move(rationale_curves)), average_pr_curves(std::move(document_curves))};
}

nlohmann::json SnippetClassificationReport::to_json() const {
    auto curve_json = [](const AveragedPRCurve& c) {
        nlohmann::json folds = nlohmann::json::array();
        for (const auto& fold : c.folds) {
            nlohmann::json points = nlohmann::json::array();
            for (const auto& p : fold.points) {
                points.push_back({{"recall", p.recall}, {"precision", p.precision}, {"threshold", p.threshold}});
            }
            folds.push_back({{"positive_rate", fold.positive_rate}, {"points", points}});
        }
        return nlohmann::json{{"recall", c.recall},
                              {"precision", c.precision},
                              {"precision_at_recall_0.75", c.precision_at(0.75)},
                              {"precision_at_recall_0.80", c.precision_at(0.80)},
                              {"folds", folds}};
    };
    return {{"rationale_model", curve_json(rationale_model)},
            {"document_model", curve_json(document_model)},
            {"reference",
             {{"rationale_model_precision_at_recall_0.80", 0.70},
              {"document_model_min_precision_at_recall_0.75", 0.25}}}};
}

void SnippetClassificationReport::write_csv(std::ostream& out) const {
    out << "method,fold,recall,precision,threshold\n";
    auto emit = [&](const char* method, const AveragedPRCurve& c) {
        for (std::size_t i = 0; i < c.recall.size(); ++i) {
            out << method << ",mean," << format("%.6f", c.recall[i]) << ',' << format("%.6f", c.precision[i])
                << ",\n";
        }
        for (std::size_t f = 0; f < c.folds.size(); ++f) {
            for (const auto& p : c.folds[f].points) {
                out << method << ',' << f << ',' << format("%.6f", p.recall) << ','
                    << format("%.6f", p.precision) << ',' << format("%.9g", p.threshold) << '\n';
            }
        }
    };
    emit("rationale", rationale_model);
    emit("document", document_model);
}

void SnippetClassificationReport::write_summary(std::ostream& out) const {
    out << "Snippet classification (mean over " << rationale_model.folds.size() << " folds)\n";
    out << "  recall   rationale-model precision   document-model precision\n";
    for (double r : {0.25, 0.50, 0.75, 0.80, 0.90}) {
        char line[96];
        std::snprintf(line, sizeof line, "  %5.2f    %25.3f   %24.3f\n", r, rationale_model.precision_at(r),
                      document_model.precision_at(r));
        out << line;
    }
    out << "  reference operating points: rationale model 0.70 precision at 0.80 recall;\n"
           "  document model above 0.25 precision at 0.75 recall (6.5% responsive rate)\n";
}

SnippetStats snippet_stats(std::span<const corpus::Document* const> docs, std::size_t n) {
    SnippetStats stats;
    stats.n = n;
    for (const auto* doc : docs) {
        stats.total_snippets += snippets::window_spans(doc->token_count(), n).size();
        ++stats.documents;
    }
    stats.average_per_document =
        stats.documents == 0 ? 0.0 : static_cast<double>(stats.total_snippets) / static_cast<double>(stats.documents);
    return stats;
}

nlohmann::json to_json(std::span<const SnippetStats> rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        out.push_back({{"n", r.n},
                       {"total_snippets", r.total_snippets},
                       {"documents", r.documents},
                       {"average_per_document", r.average_per_document}});
    }
    return out;
}

void write_snippet_stats_table(std::span<const SnippetStats> rows, std::ostream& out) {
    out << "Snippet Setting  Total Number of Snippets  Number of Documents  Average Number of Snippets\n";
    for (const auto& r : rows) {
        char line[128];
        std::snprintf(line, sizeof line, "%-15zu  %24zu  %19zu  %26.0f\n", r.n, r.total_snippets, r.documents,
                      r.average_per_document);
        out << line;
    }
}

RecallAtKTable rationale_identification_eval(std::span<const FoldRationaleInput> folds,
                                             std::span<const std::size_t> ns, std::size_t max_k,
                                             MatchMode match_mode, const snippets::RefineConfig* refine,
                                             std::size_t threads) {
    if (max_k < 1 || ns.empty()) {
        throw Error(ErrorKind::InvalidArgument, "recall@K needs at least one n and K >= 1");
    }
    RecallAtKTable table;
    table.ns.assign(ns.begin(), ns.end());
    table.max_k = max_k;
    table.match_mode = match_mode;
    if (!folds.empty()) {
        for (const auto& [method, scorer] : folds.front().scorers) {
            table.methods.push_back(method);
        }
    }

    // sums[(n, k, method)] accumulates per-fold recall
    std::map<std::tuple<std::size_t, std::size_t, Method>, double> sums;
    for (const auto& fold : folds) {
        std::vector<const corpus::Document*> docs;
        for (const auto* doc : fold.documents) {
            if (doc->has_usable_rationales() && doc->token_count() > 0) {
                docs.push_back(doc);
            }
        }
        if (docs.empty()) {
            continue;
        }
        ++table.folds;
        table.documents += docs.size();

        const std::size_t configs = ns.size() * fold.scorers.size();
        // hits[d][c * max_k + (k - 1)]
        std::vector<std::vector<char>> hits(docs.size(), std::vector<char>(configs * max_k, 0));
        parallel_for(docs.size(), threads, [&](std::size_t d) {
            const auto& doc = *docs[d];
            for (std::size_t ni = 0; ni < ns.size(); ++ni) {
                for (std::size_t si = 0; si < fold.scorers.size(); ++si) {
                    const auto& [method, scorer] = fold.scorers[si];
                    char* row = &hits[d][(ni * fold.scorers.size() + si) * max_k];
                    if (refine != nullptr && method == Method::DocumentModel) {
                        for (std::size_t k = 1; k <= max_k; ++k) {
                            for (const auto& s : rationale::select_rationales(doc, ns[ni], k, scorer, refine)) {
                                row[k - 1] = row[k - 1] || rationale::match_rationale(s.span, doc.rationales, match_mode);
                            }
                        }
                        continue;
                    }
                    const auto ranked = rationale::rank_snippets(doc, ns[ni], scorer);
                    std::optional<std::size_t> first;
                    for (std::size_t r = 0; r < ranked.size(); ++r) {
                        if (rationale::match_rationale(ranked[r].span, doc.rationales, match_mode)) {
                            first = r;
                            break;
                        }
                    }
                    for (std::size_t k = 1; k <= max_k; ++k) {
                        row[k - 1] = first.has_value() && *first < k;
                    }
                }
            }
        });

        for (std::size_t ni = 0; ni < ns.size(); ++ni) {
            for (std::size_t si = 0; si < fold.scorers.size(); ++si) {
                for (std::size_t k = 1; k <= max_k; ++k) {
                    std::size_t count = 0;
                    for (const auto& row : hits) {
                        count += row[(ni * fold.scorers.size() + si) * max_k + (k - 1)] ? 1 : 0;
                    }
                    sums[{ns[ni], k, fold.scorers[si].first}] +=
                        static_cast<double>(count) / static_cast<double>(docs.size());
                }
            }
        }
    }
    for (const auto& [key, sum] : sums) {
        table.recall[key] = sum / static_cast<double>(table.folds);
    }
    return table;
}

nlohmann::json RecallAtKTable::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (auto n : ns) {
        for (std::size_t k = 1; k <= max_k; ++k) {
            nlohmann::json row = {{"n", n}, {"k", k}};
            for (auto method : methods) {
                const auto it = recall.find({n, k, method});
                row[std::string(rationale::to_string(method)) + "_model"] =
                    it == recall.end() ? nlohmann::json(nullptr) : nlohmann::json(it->second);
            }
            rows.push_back(row);
        }
    }
    return {{"match_mode", rationale::to_string(match_mode)},
            {"folds", folds},
            {"documents", documents},
            {"rows", rows}};
}

void RecallAtKTable::write_table(std::ostream& out) const {
    out << "Number of words in Snippet  Top K Snippets";
    for (auto method : methods) {
        out << (method == Method::RationaleModel ? "  Rationale Model" : "  Document Model");
    }
    out << '\n';
    for (auto n : ns) {
        for (std::size_t k = 1; k <= max_k; ++k) {
            char head[64];
            if (k == 1) {
                std::snprintf(head, sizeof head, "%-26zu  %14zu", n, k);
            } else {
                std::snprintf(head, sizeof head, "%-26s  %14zu", "", k);
            }
            out << head;
            for (auto method : methods) {
                const auto it = recall.find({n, k, method});
                const int width = method == Method::RationaleModel ? 15 : 14;
                char cell[32];
                if (it == recall.end()) {
                    std::snprintf(cell, sizeof cell, "  %*s", width, "-");
                } else {
                    std::snprintf(cell, sizeof cell, "  %*.1f%%", width - 1, 100.0 * it->second);
                }
                out << cell;
            }
            out << '\n';
        }
    }
}

WordSavingsReport word_savings(double avg_doc_words, std::size_t n, std::size_t k, std::size_t documents,
                               std::optional<double> recall, std::optional<CoverageRange> coverage_override) {
    if (!(avg_doc_words > 0.0) || n == 0 || k == 0 || documents == 0) {
        throw Error(ErrorKind::InvalidArgument, "word savings needs positive inputs");
    }
    WordSavingsReport report;
    report.avg_doc_words = avg_doc_words;
    report.n = n;
    report.k = k;
    report.documents = documents;
    report.recall = recall;
    const auto words = static_cast<double>(n);
    if (coverage_override) {
        if (coverage_override->min_words < 0.0 || coverage_override->min_words > coverage_override->max_words) {
            throw Error(ErrorKind::InvalidArgument, "coverage override needs 0 <= min <= max");
        }
        report.coverage = *coverage_override;
        report.coverage_overridden = true;
    } else {
        report.coverage = {words + static_cast<double>(k - 1) * words / 2.0, static_cast<double>(k) * words};
    }

    double fewest = avg_doc_words - report.coverage.max_words;
    double most = avg_doc_words - report.coverage.min_words;
    if (fewest < 0.0 || most < 0.0) {
        report.warnings.push_back("snippet coverage exceeds the average document length; savings floored at 0");
        fewest = std::max(fewest, 0.0);
        most = std::max(most, 0.0);
    }
    const auto d = static_cast<double>(documents);
    report.savings_per_doc = {fewest, most};
    report.total_savings = {fewest * d, most * d};
    report.document_equivalents = {std::floor(report.total_savings.min_words / avg_doc_words),
                                   std::floor(report.total_savings.max_words / avg_doc_words)};
    report.document_fraction = {report.document_equivalents.min_words / d,
                                report.document_equivalents.max_words / d};
    return report;
}

nlohmann::json WordSavingsReport::to_json() const {
    nlohmann::json j = {
        {"avg_doc_words", number(avg_doc_words)},
        {"n", n},
        {"k", k},
        {"documents", documents},
        {"coverage", range_json(coverage)},
        {"coverage_overridden", coverage_overridden},
        {"savings_per_doc", range_json(savings_per_doc)},
        {"total_savings", range_json(total_savings)},
        {"document_equivalents", range_json(document_equivalents)},
        {"document_fraction", {{"min", document_fraction.min_words}, {"max", document_fraction.max_words}}},
        {"warnings", warnings},
    };
    j["recall"] = recall ? nlohmann::json(*recall) : nlohmann::json(nullptr);
    return j;
}

void WordSavingsReport::write_summary(std::ostream& out) const {
    auto range = [](const CoverageRange& r, const char* pattern) {
        const auto lo = format(pattern, r.min_words);
        const auto hi = format(pattern, r.max_words);
        return lo == hi ? lo : lo + " to " + hi;
    };
    out << "Reviewing the top " << k << " " << n << "-word snippet" << (k == 1 ? "" : "s") << " of documents averaging "
        << format("%.0f", avg_doc_words) << " words\n";
    out << "  words read per document:     " << range(coverage, "%.0f")
        << (coverage_overridden ? " (override)" : "") << '\n';
    out << "  words saved per document:    " << range(savings_per_doc, "%.0f") << '\n';
    out << "  words saved over " << documents << " documents: " << range(total_savings, "%.0f") << '\n';
    out << "  document equivalents saved:  " << range(document_equivalents, "%.0f") << " ("
        << range({100.0 * document_fraction.min_words, 100.0 * document_fraction.max_words}, "%.1f") << "%)\n";
    if (recall) {
        out << "  rationale recall at this setting: " << format("%.1f", 100.0 * *recall) << "%\n";
    }
    for (const auto& w : warnings) {
        out << "  warning: " << w << '\n';
    }
}

} // namespace xpc::eval
