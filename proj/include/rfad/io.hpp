#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "rfad/dataset.hpp"
#include "rfad/distance_matrix.hpp"
#include "rfad/errors.hpp"
#include "rfad/eval.hpp"
#include "rfad/graph.hpp"
#include "rfad/scoring.hpp"

namespace rfad {

/// Shortest decimal string that round-trips the value.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Fixed 17 significant digits; enough to reproduce any double exactly.
inline std::string format_double_17(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("failed writing '" + path + "'");
}

/// Dense N x N matrix, no header row.
inline void write_distance_csv(const std::string& path, const DistanceMatrix& d) {
    std::string body;
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) {
            if (j > 0) body += ',';
            body += format_double_17(d(i, j));
        }
        body += '\n';
    }
    write_text_file(path, body);
}

inline void write_clustering_csv(const std::string& path, const Clustering& clustering) {
    std::string body = "node,cluster,is_center\n";
    for (std::size_t i = 0; i < clustering.labels.size(); ++i) {
        const std::size_t c = clustering.labels[i];
        const bool center = clustering.clusters[c].center == i;
        body += std::to_string(i) + ',' + std::to_string(c) + ',' + (center ? '1' : '0') + '\n';
    }
    write_text_file(path, body);
}

inline void write_scores_csv(const std::string& path, const ScoreReport& report) {
    std::string body = "index,alpha,beta,score,score_norm,flag\n";
    for (std::size_t i = 0; i < report.n; ++i) {
        body += std::to_string(i) + ',' + std::to_string(report.alpha[i]) + ',' +
                format_double(report.beta[i]) + ',' + format_double(report.score[i]) + ',' +
                format_double(report.score_norm[i]) + ',' + (report.flags[i] ? '1' : '0') + '\n';
    }
    write_text_file(path, body);
}

inline void write_score_summary_json(const std::string& path, const ScoreReport& report) {
    nlohmann::ordered_json j;
    j["n"] = report.n;
    j["k"] = report.k;
    j["K"] = report.community_count();
    j["d_c"] = report.cluster_dc;
    j["threshold"] = report.threshold;
    j["z"] = report.z;
    j["seed"] = report.seed;
    j["flagged_count"] = report.flagged_count();
    write_text_file(path, j.dump(2) + "\n");
}

/// Per-method score table in the per-point CSV shape, with min-max normalized
/// scores alongside the raw values.
inline void write_method_scores_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<double>>>& method_scores) {
    std::string body = "method,index,score,score_norm\n";
    for (const auto& [method, scores] : method_scores) {
        const std::vector<double> norm = min_max_normalize(scores);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            body += method + ',' + std::to_string(i) + ',' + format_double(scores[i]) + ',' +
                    format_double(norm[i]) + '\n';
        }
    }
    write_text_file(path, body);
}

/// Long-form evaluation rows. Optional cells (auc for pure timing rows,
/// wall_time_s for pure accuracy rows) stay empty.
inline void write_eval_csv(const std::string& path, const std::vector<EvalRow>& rows) {
    std::string body = "method,fraction,seed,auc,wall_time_s\n";
    for (const auto& row : rows) {
        body += row.method + ',' + format_double(row.fraction) + ',' + std::to_string(row.seed) +
                ',';
        if (row.auc) body += format_double(*row.auc);
        body += ',';
        if (row.wall_time_s) body += format_double(*row.wall_time_s);
        body += '\n';
    }
    write_text_file(path, body);
}

inline void write_eval_summary_json(const std::string& path,
                                    const std::vector<EvalSummary>& summaries) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& s : summaries) {
        nlohmann::ordered_json entry;
        entry["method"] = s.method;
        entry["fraction"] = s.fraction;
        entry["runs"] = s.runs;
        entry["mean_auc"] = s.mean_auc;
        entry["std_auc"] = s.std_auc;
        j.push_back(entry);
    }
    write_text_file(path, j.dump(2) + "\n");
}

/// Feature columns in schema order plus a trailing 0/1 label column.
inline void write_labeled_csv(const std::string& path, const FeatureMatrix& x,
                              const std::vector<int>& labels, const std::string& label_name) {
    if (labels.size() != x.rows()) throw InvalidArgumentError("labels length mismatch");
    std::string body;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        body += x.schema().columns[c].name + ',';
    }
    body += label_name + '\n';
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            if (x.schema().columns[c].kind == ColumnKind::kNumeric) {
                body += format_double(x.numeric(r, c));
            } else {
                body += x.category(r, c);
            }
            body += ',';
        }
        body += std::to_string(labels[r]) + '\n';
    }
    write_text_file(path, body);
}

}  // namespace rfad
