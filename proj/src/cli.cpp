#include "xpc/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "xpc/corpus.hpp"
#include "xpc/error.hpp"
#include "xpc/eval.hpp"
#include "xpc/experiment.hpp"
#include "xpc/random.hpp"
#include "xpc/rationale.hpp"

namespace xpc::cli {

namespace {

struct GlobalOptions {
    std::uint64_t seed = 7;
    std::size_t threads = 1;
};

struct FilterOptions {
    std::size_t min_words = 10;
    std::size_t max_words = 250;
};

struct TrainOptions {
    std::size_t min_df = 2;
    model::TrainConfig config;
};

void add_filter_options(CLI::App* sub, FilterOptions& f) {
    sub->add_option("--min-words", f.min_words, "Shortest usable rationale (inclusive)")->capture_default_str();
    sub->add_option("--max-words", f.max_words, "Longest usable rationale (exclusive)")->capture_default_str();
}

void add_train_options(CLI::App* sub, TrainOptions& t) {
    sub->add_option("--min-df", t.min_df, "Minimum document frequency for vocabulary terms")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--l2", t.config.l2_lambda, "L2 penalty")->check(CLI::NonNegativeNumber)->capture_default_str();
    sub->add_option("--max-iters", t.config.max_iters, "Gradient descent iteration budget")->capture_default_str();
    sub->add_option("--tolerance", t.config.tolerance, "Stop when the gradient inf-norm drops below this")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    }
    return out;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

corpus::Corpus load_filtered(const std::string& path, const FilterOptions& f) {
    return corpus::filter_rationales(corpus::load_corpus(path), f.min_words, f.max_words);
}

std::vector<std::size_t> parse_sizes(const std::vector<std::size_t>& values) {
    for (auto n : values) {
        snippets::WindowConfig{n}.validate();
    }
    return values;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Explainable predictive coding: document and rationale models, snippet extraction and evaluation",
                 "xpc"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI run configuration; command-line flags take precedence");

    GlobalOptions global;
    app.add_option("--seed", global.seed, "Global seed; every random stage derives from it")->capture_default_str();
    app.add_option("--threads", global.threads, "Worker threads for scoring and evaluation")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    // gen-corpus ------------------------------------------------------------
    auto* gen = app.add_subcommand("gen-corpus", "Generate a synthetic annotated corpus as JSONL");
    corpus::SyntheticConfig synth;
    std::string gen_out;
    gen->add_option("--out", gen_out, "Output JSONL path")->required();
    gen->add_option("--n-docs", synth.n_docs, "Number of documents")->capture_default_str();
    gen->add_option("--responsive-rate", synth.responsive_rate, "Share of responsive documents")->capture_default_str();
    gen->add_option("--doc-mean", synth.doc_length.mean, "Mean document length (words)")->capture_default_str();
    gen->add_option("--doc-std", synth.doc_length.stddev, "Document length standard deviation")->capture_default_str();
    gen->add_option("--rationale-mean", synth.rationale_length.mean, "Mean rationale length (words)")
        ->capture_default_str();
    gen->add_option("--rationale-std", synth.rationale_length.stddev, "Rationale length standard deviation")
        ->capture_default_str();
    gen->add_option("--background-vocab", synth.background_vocab_size, "Background vocabulary size")
        ->capture_default_str();
    gen->add_option("--topic-vocab", synth.topic_vocab_size, "Topic vocabulary size")->capture_default_str();
    gen->add_option("--topic-mix", synth.topic_mix, "Share of rationale tokens drawn from the topic vocabulary")
        ->capture_default_str();

    // stats -------------------------------------------------------------------
    auto* stats = app.add_subcommand("stats", "Descriptive statistics of a corpus");
    std::string stats_corpus;
    std::string stats_out;
    std::size_t stats_threshold = 250;
    bool stats_filter = false;
    FilterOptions stats_filter_opts;
    stats->add_option("--corpus", stats_corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    stats->add_option("--out", stats_out, "Write the report as JSON");
    stats->add_option("--threshold", stats_threshold, "Report the share of rationales below this length")
        ->capture_default_str();
    stats->add_flag("--filter", stats_filter, "Apply rationale length filtering first");
    add_filter_options(stats, stats_filter_opts);

    // train -------------------------------------------------------------------
    auto* train = app.add_subcommand("train", "Train the document model and the rationale model");
    std::string train_corpus;
    std::string train_dir;
    std::string train_which = "both";
    TrainOptions train_opts;
    FilterOptions train_filter;
    train->add_option("--corpus", train_corpus, "Training corpus JSONL")->required()->check(CLI::ExistingFile);
    train->add_option("--out-dir", train_dir, "Directory for vocabulary.json and model JSON files")->required();
    train->add_option("--which", train_which, "Models to train")
        ->check(CLI::IsMember({"both", "document"}))
        ->capture_default_str();
    add_train_options(train, train_opts);
    add_filter_options(train, train_filter);

    // extract -----------------------------------------------------------------
    auto* extract = app.add_subcommand("extract", "Identify responsive documents and extract their rationales");
    std::string extract_corpus;
    std::string extract_models;
    std::string extract_out;
    std::string extract_report;
    std::string extract_method = "rationale";
    std::string extract_match = "overlap";
    rationale::ExtractionConfig extraction;
    extract->add_option("--corpus", extract_corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    extract->add_option("--model-dir", extract_models, "Directory written by `train`")
        ->required()
        ->check(CLI::ExistingDirectory);
    extract->add_option("--out", extract_out, "Rationale results JSONL")->required();
    extract->add_option("--report", extract_report, "Human-readable report with excerpts");
    extract->add_option("--method", extract_method, "Snippet scoring model")
        ->check(CLI::IsMember({"rationale", "document"}))
        ->capture_default_str();
    extract->add_option("--n", extraction.window.n, "Words per snippet")->capture_default_str();
    extract->add_option("--top-k", extraction.top_k, "Rationales per document")->capture_default_str();
    extract->add_option("--threshold", extraction.responsive_threshold, "Responsive probability cutoff")
        ->capture_default_str();
    extract->add_flag("--refine", extraction.refine, "Iteratively refine selected snippets (document method)");
    extract->add_option("--min-size", extraction.refine_config.min_size, "Refinement size floor")
        ->capture_default_str();
    extract->add_option("--epsilon", extraction.refine_config.epsilon, "Required score improvement per refinement")
        ->capture_default_str();
    extract->add_option("--match-mode", extract_match, "Annotation matching")
        ->check(CLI::IsMember({"overlap", "containment"}))
        ->capture_default_str();

    // eval-snippets -----------------------------------------------------------
    auto* eval_snippets = app.add_subcommand("eval-snippets", "Cross-validated snippet classification PR curves");
    std::string es_corpus;
    std::string es_csv;
    std::string es_json;
    std::size_t es_folds = 5;
    TrainOptions es_train;
    FilterOptions es_filter;
    eval_snippets->add_option("--corpus", es_corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    eval_snippets->add_option("--out-csv", es_csv, "PR curves as CSV");
    eval_snippets->add_option("--out-json", es_json, "PR curves as JSON");
    eval_snippets->add_option("--folds", es_folds, "Cross-validation folds")->capture_default_str();
    add_train_options(eval_snippets, es_train);
    add_filter_options(eval_snippets, es_filter);

    // eval-rationales ---------------------------------------------------------
    auto* eval_rationales = app.add_subcommand("eval-rationales", "Cross-validated rationale recall@K table");
    std::string er_corpus;
    std::string er_json;
    std::string er_table;
    std::size_t er_folds = 5;
    std::vector<std::size_t> er_ns{50, 100, 200};
    std::size_t er_max_k = 5;
    std::string er_match = "overlap";
    bool er_refine = false;
    snippets::RefineConfig er_refine_config;
    TrainOptions er_train;
    FilterOptions er_filter;
    eval_rationales->add_option("--corpus", er_corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    eval_rationales->add_option("--out-json", er_json, "Recall table as JSON");
    eval_rationales->add_option("--table", er_table, "Recall table as aligned text");
    eval_rationales->add_option("--folds", er_folds, "Cross-validation folds")->capture_default_str();
    eval_rationales->add_option("--n", er_ns, "Snippet sizes")->delimiter(',')->capture_default_str();
    eval_rationales->add_option("--max-k", er_max_k, "Largest K")->check(CLI::PositiveNumber)->capture_default_str();
    eval_rationales->add_option("--match-mode", er_match, "Annotation matching")
        ->check(CLI::IsMember({"overlap", "containment"}))
        ->capture_default_str();
    eval_rationales->add_flag("--refine", er_refine, "Refine document-model selections before matching");
    eval_rationales->add_option("--min-size", er_refine_config.min_size, "Refinement size floor")
        ->capture_default_str();
    add_train_options(eval_rationales, er_train);
    add_filter_options(eval_rationales, er_filter);

    // snippet-stats -----------------------------------------------------------
    auto* snippet_stats = app.add_subcommand("snippet-stats", "Window counts over the responsive population");
    std::string ss_corpus;
    std::string ss_out;
    std::vector<std::size_t> ss_ns{50, 100, 200};
    FilterOptions ss_filter;
    snippet_stats->add_option("--corpus", ss_corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    snippet_stats->add_option("--out", ss_out, "Write the table as JSON");
    snippet_stats->add_option("--n", ss_ns, "Snippet sizes")->delimiter(',')->capture_default_str();
    add_filter_options(snippet_stats, ss_filter);

    // report-savings ----------------------------------------------------------
    auto* savings = app.add_subcommand("report-savings", "Reviewer word savings from reading top-K snippets only");
    double sv_avg = 0.0;
    std::size_t sv_n = 50;
    std::size_t sv_k = 1;
    std::size_t sv_docs = 0;
    std::optional<double> sv_recall;
    std::optional<double> sv_cov_min;
    std::optional<double> sv_cov_max;
    std::string sv_out;
    savings->add_option("--avg-doc-words", sv_avg, "Average words per responsive document")->required();
    savings->add_option("--n", sv_n, "Words per snippet")->capture_default_str();
    savings->add_option("--k", sv_k, "Snippets read per document")->capture_default_str();
    savings->add_option("--docs", sv_docs, "Responsive documents")->required();
    savings->add_option("--recall", sv_recall, "Recall achieved at this setting (reported only)");
    auto* cov_min = savings->add_option("--coverage-min", sv_cov_min, "Override: fewest words read per document");
    auto* cov_max = savings->add_option("--coverage-max", sv_cov_max, "Override: most words read per document");
    cov_min->needs(cov_max);
    cov_max->needs(cov_min);
    savings->add_option("--out", sv_out, "Write the report as JSON");

    std::vector<std::string> argv_storage(args);
    std::vector<char*> argv;
    for (auto& a : argv_storage) {
        argv.push_back(a.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*gen) {
            synth.seed = global.seed;
            const auto corpus = corpus::generate_synthetic_corpus(synth);
            corpus::save_corpus(corpus, gen_out);
            const auto s = corpus::corpus_stats(corpus);
            out << "wrote " << s.documents << " documents (" << s.responsive << " responsive) to " << gen_out << '\n';
        } else if (*stats) {
            auto corpus = corpus::load_corpus(stats_corpus);
            if (stats_filter) {
                corpus = corpus::filter_rationales(std::move(corpus), stats_filter_opts.min_words,
                                                   stats_filter_opts.max_words);
            }
            const auto report = corpus::corpus_stats(corpus, stats_threshold).to_json();
            if (!stats_out.empty()) {
                write_json(stats_out, report);
            }
            out << report.dump(2) << '\n';
        } else if (*train) {
            const auto corpus = load_filtered(train_corpus, train_filter);
            std::vector<std::size_t> labeled;
            for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
                if (corpus.documents[i].label != corpus::Label::Unlabeled) {
                    labeled.push_back(i);
                }
            }
            const auto negatives = snippets::sample_negative_snippets(corpus, eval::negative_seed(global.seed));
            train_opts.config.seed = global.seed;
            auto trained = eval::train_models(corpus, labeled, negatives, train_opts.min_df, train_opts.config,
                                              train_which == "both");
            rationale::ModelSet set{std::move(trained.vocabulary), std::move(trained.document),
                                    std::move(trained.rationale)};
            set.save(train_dir);
            out << "vocabulary: " << set.vocabulary.size() << " terms; document model on " << labeled.size()
                << " documents";
            if (set.rationale) {
                out << "; rationale model on " << trained.rationale_positives << " rationales + "
                    << trained.rationale_negatives << " negative snippets";
            }
            out << "\nwrote models to " << train_dir << '\n';
        } else if (*extract) {
            extraction.method = rationale::parse_method(extract_method);
            extraction.match_mode = rationale::parse_match_mode(extract_match);
            extraction.validate();
            const auto corpus = corpus::load_corpus(extract_corpus);
            const auto models = rationale::ModelSet::load(extract_models);
            const auto results = rationale::run_pipeline(corpus, models, extraction, global.threads);
            {
                auto jsonl = open_output(extract_out);
                rationale::write_results_jsonl(results, jsonl);
            }
            if (!extract_report.empty()) {
                auto report = open_output(extract_report);
                rationale::write_results_report(results, corpus, extraction, report);
            }
            out << results.size() << " documents identified as responsive; rationales written to " << extract_out
                << '\n';
        } else if (*eval_snippets) {
            const auto corpus = load_filtered(es_corpus, es_filter);
            eval::ExperimentConfig cfg{es_folds, global.seed, es_train.min_df, es_train.config, global.threads};
            const auto cv = eval::cross_validate(corpus, cfg);
            const auto report = eval::run_snippet_classification(corpus, cv, global.threads);
            if (!es_csv.empty()) {
                auto csv = open_output(es_csv);
                report.write_csv(csv);
            }
            if (!es_json.empty()) {
                write_json(es_json, report.to_json());
            }
            report.write_summary(out);
        } else if (*eval_rationales) {
            const auto corpus = load_filtered(er_corpus, er_filter);
            const auto ns = parse_sizes(er_ns);
            eval::ExperimentConfig cfg{er_folds, global.seed, er_train.min_df, er_train.config, global.threads};
            const auto cv = eval::cross_validate(corpus, cfg);
            const auto table = eval::run_rationale_identification(
                corpus, cv, ns, er_max_k, rationale::parse_match_mode(er_match), er_refine, er_refine_config,
                global.threads);
            if (!er_json.empty()) {
                write_json(er_json, table.to_json());
            }
            if (!er_table.empty()) {
                auto text = open_output(er_table);
                table.write_table(text);
            }
            table.write_table(out);
        } else if (*snippet_stats) {
            const auto corpus = load_filtered(ss_corpus, ss_filter);
            std::vector<const corpus::Document*> population;
            for (const auto& doc : corpus.documents) {
                if (doc.has_usable_rationales()) {
                    population.push_back(&doc);
                }
            }
            std::vector<eval::SnippetStats> rows;
            for (auto n : parse_sizes(ss_ns)) {
                rows.push_back(eval::snippet_stats(population, n));
            }
            if (!ss_out.empty()) {
                write_json(ss_out, eval::to_json(rows));
            }
            eval::write_snippet_stats_table(rows, out);
        } else if (*savings) {
            std::optional<eval::CoverageRange> override;
            if (sv_cov_min && sv_cov_max) {
                override = eval::CoverageRange{*sv_cov_min, *sv_cov_max};
            }
            const auto report = eval::word_savings(sv_avg, sv_n, sv_k, sv_docs, sv_recall, override);
            if (!sv_out.empty()) {
                write_json(sv_out, report.to_json());
            }
            report.write_summary(out);
        }
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

int run_command(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run_command(args, std::cout, std::cerr);
}

} // namespace xpc::cli
