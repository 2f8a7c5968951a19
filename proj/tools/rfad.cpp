#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rfad/dataset.hpp"
#include "rfad/eval.hpp"
#include "rfad/io.hpp"
#include "rfad/scoring.hpp"
#include "rfad/synth.hpp"

namespace {

struct RunConfig {
    std::string input;
    std::string label_col;
    std::string out = ".";
    std::vector<std::string> methods{"hybrid"};
    std::vector<double> fractions{0.1, 0.2, 0.5, 1.0};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    rfad::PipelineConfig pipeline;
};

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

void ensure_parent_dir(const std::string& file) {
    const auto parent = std::filesystem::path(file).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

rfad::FeatureMatrix load_features(const RunConfig& cfg, std::vector<int>* labels) {
    rfad::FeatureMatrix x = rfad::load_dataset(cfg.input);
    if (cfg.label_col.empty()) {
        if (labels) throw rfad::Error("--label-col is required for this command");
        return x;
    }
    auto [features, found_labels] = rfad::split_label_column(x, cfg.label_col);
    if (labels) *labels = std::move(found_labels);
    return features;
}

int run_score(const RunConfig& cfg) {
    const rfad::FeatureMatrix x = load_features(cfg, nullptr);
    const rfad::ScoreReport report = rfad::score_pipeline(x, cfg.pipeline);
    ensure_dir(cfg.out);
    rfad::write_scores_csv(join(cfg.out, "scores.csv"), report);
    rfad::write_score_summary_json(join(cfg.out, "summary.json"), report);
    std::cout << "scored " << report.n << " points, flagged " << report.flagged_count() << " of "
              << report.n << " (threshold " << rfad::format_double(report.threshold) << ")\n";
    return 0;
}

int run_benchmark(const RunConfig& cfg) {
    std::vector<int> labels;
    const rfad::FeatureMatrix x = load_features(cfg, &labels);
    const auto methods = rfad::make_method_scorers(cfg.methods, cfg.pipeline);

    std::vector<rfad::EvalRow> rows;
    std::vector<std::pair<std::string, std::vector<double>>> method_scores;
    for (const auto& method : methods) {
        std::vector<double> scores = method.scorer(x, cfg.pipeline.seed);
        rfad::EvalRow row;
        row.method = method.name;
        row.fraction = 1.0;
        row.seed = cfg.pipeline.seed;
        row.auc = rfad::auc(labels, scores);
        rows.push_back(row);
        method_scores.emplace_back(method.name, std::move(scores));
    }

    ensure_dir(cfg.out);
    rfad::write_eval_csv(join(cfg.out, "benchmark.csv"), rows);
    rfad::write_eval_summary_json(join(cfg.out, "benchmark_summary.json"), rfad::summarize(rows));
    rfad::write_method_scores_csv(join(cfg.out, "benchmark_scores.csv"), method_scores);
    for (const auto& row : rows) {
        std::cout << row.method << " auc " << rfad::format_double(*row.auc) << "\n";
    }
    return 0;
}

int run_stability(const RunConfig& cfg) {
    std::vector<int> labels;
    const rfad::FeatureMatrix x = load_features(cfg, &labels);
    const auto methods = rfad::make_method_scorers(cfg.methods, cfg.pipeline);
    const auto rows = rfad::stability_experiment(x, labels, methods, cfg.fractions, cfg.seeds);

    ensure_dir(cfg.out);
    rfad::write_eval_csv(join(cfg.out, "stability.csv"), rows);
    rfad::write_eval_summary_json(join(cfg.out, "stability_summary.json"), rfad::summarize(rows));
    std::cout << "stability: " << rows.size() << " rows over " << cfg.fractions.size()
              << " fractions x " << cfg.seeds.size() << " seeds x " << methods.size()
              << " methods\n";
    return 0;
}

struct SynthCli {
    rfad::SynthConfig cfg;
    std::string out;
};

int run_synth(const SynthCli& s) {
    const rfad::LabeledPoints points = rfad::make_synthetic_benchmark(s.cfg);
    ensure_parent_dir(s.out);
    rfad::write_labeled_csv(s.out, points.features, points.labels, "label");
    std::cout << "wrote " << points.features.rows() << " rows to " << s.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised anomaly detection: forest-distance pipeline, baselines, and "
                 "evaluation harness"};
    app.require_subcommand(1);

    const auto percentile_check = CLI::Validator(
        [](std::string& value) -> std::string {
            const double v = std::stod(value);
            return v > 0.0 && v < 100.0 ? "" : "must be strictly between 0 and 100";
        },
        "PERCENTILE");
    const auto fraction_check = CLI::Validator(
        [](std::string& value) -> std::string {
            const double v = std::stod(value);
            return v > 0.0 && v <= 1.0 ? "" : "must be in (0, 1]";
        },
        "FRACTION");
    const auto methods_check = CLI::IsMember({"hybrid", "iforest", "knn", "lof"});

    RunConfig cfg;
    const auto add_common = [&](CLI::App* cmd, bool with_methods) {
        cmd->add_option("--input", cfg.input, "Input CSV (header row, numeric or categorical)")
            ->required();
        cmd->add_option("--label-col", cfg.label_col, "Name of the 0/1 ground-truth column");
        cmd->add_option("--trees", cfg.pipeline.trees, "Trees in the forest")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--k", cfg.pipeline.k, "Neighbors in the graph (0 = ceil(ln N))")
            ->capture_default_str();
        cmd->add_option("--dc-percentile", cfg.pipeline.dc_percentile,
                        "Percentile of within-cluster distances used as d_c")
            ->check(percentile_check)
            ->capture_default_str();
        cmd->add_option("--z", cfg.pipeline.z, "Threshold z-multiplier")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--seed", cfg.pipeline.seed, "Master seed")->capture_default_str();
        cmd->add_option("--out", cfg.out, "Output directory")->capture_default_str();
        if (with_methods) {
            cmd->add_option("--methods", cfg.methods, "Methods to run (comma separated)")
                ->delimiter(',')
                ->check(methods_check)
                ->capture_default_str();
        }
    };

    CLI::App* score = app.add_subcommand("score", "Score one dataset with the hybrid pipeline");
    add_common(score, false);

    CLI::App* benchmark =
        app.add_subcommand("benchmark", "AUC of each method on a labeled dataset");
    add_common(benchmark, true);

    CLI::App* stability =
        app.add_subcommand("stability", "AUC across subsample fractions and seeds");
    add_common(stability, true);
    stability->add_option("--fractions", cfg.fractions, "Subsample fractions in (0, 1]")
        ->delimiter(',')
        ->check(fraction_check)
        ->capture_default_str();
    stability->add_option("--seeds", cfg.seeds, "Seeds, one run per seed")
        ->delimiter(',')
        ->capture_default_str();

    SynthCli synth_cli;
    CLI::App* synth = app.add_subcommand("synth", "Generate a labeled benchmark CSV");
    synth->add_option("--out", synth_cli.out, "Output CSV path")->required();
    synth->add_option("--clusters", synth_cli.cfg.clusters, "Gaussian clusters")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth->add_option("--per-cluster", synth_cli.cfg.per_cluster, "Points per cluster")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth_cli.cfg.outliers = 10;
    synth->add_option("--outliers", synth_cli.cfg.outliers, "Uniform outliers")
        ->capture_default_str();
    synth->add_option("--dims", synth_cli.cfg.dims, "Feature dimensions")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth->add_option("--seed", synth_cli.cfg.seed, "Master seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (score->parsed()) return run_score(cfg);
        if (benchmark->parsed()) return run_benchmark(cfg);
        if (stability->parsed()) return run_stability(cfg);
        if (synth->parsed()) return run_synth(synth_cli);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
