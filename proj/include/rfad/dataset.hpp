#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfad/errors.hpp"
#include "rfad/rng.hpp"

namespace rfad {

enum class ColumnKind { kNumeric, kCategorical };

/// Ordered list of typed columns. Names must be unique and non-empty.
struct FeatureSchema {
    struct Column {
        std::string name;
        ColumnKind kind;
        bool operator==(const Column&) const = default;
    };
    std::vector<Column> columns;

    std::size_t size() const { return columns.size(); }
    bool operator==(const FeatureSchema&) const = default;

    void validate() const {
        if (columns.empty()) throw InvalidArgumentError("schema has no columns");
        std::set<std::string_view> seen;
        for (const auto& c : columns) {
            if (c.name.empty()) throw InvalidArgumentError("schema has an empty column name");
            if (!seen.insert(c.name).second) {
                throw InvalidArgumentError("duplicate column name '" + c.name + "'");
            }
        }
    }
};

/// N records by m typed features, stored column-wise. Numeric cells are
/// finite doubles, categorical cells are symbols from the column's observed
/// alphabet.
class FeatureMatrix {
public:
    FeatureMatrix() = default;

    FeatureMatrix(FeatureSchema schema, std::size_t n_rows)
        : schema_(std::move(schema)), n_rows_(n_rows), cols_(schema_.size()) {
        for (std::size_t c = 0; c < schema_.size(); ++c) {
            if (schema_.columns[c].kind == ColumnKind::kNumeric) {
                cols_[c].num.resize(n_rows);
            } else {
                cols_[c].cat.resize(n_rows);
            }
        }
    }

    std::size_t rows() const { return n_rows_; }
    std::size_t cols() const { return schema_.size(); }
    const FeatureSchema& schema() const { return schema_; }
    ColumnKind kind(std::size_t col) const { return schema_.columns[col].kind; }

    double numeric(std::size_t row, std::size_t col) const { return cols_[col].num[row]; }
    const std::string& category(std::size_t row, std::size_t col) const { return cols_[col].cat[row]; }

    void set_numeric(std::size_t row, std::size_t col, double v) { cols_[col].num[row] = v; }
    void set_category(std::size_t row, std::size_t col, std::string v) {
        cols_[col].cat[row] = std::move(v);
    }

    /// Distinct category symbols of a column, sorted.
    std::vector<std::string> alphabet(std::size_t col) const {
        std::set<std::string> s(cols_[col].cat.begin(), cols_[col].cat.end());
        return {s.begin(), s.end()};
    }

    bool operator==(const FeatureMatrix&) const = default;

private:
    struct Column {
        std::vector<double> num;
        std::vector<std::string> cat;
        bool operator==(const Column&) const = default;
    };

    FeatureSchema schema_;
    std::size_t n_rows_ = 0;
    std::vector<Column> cols_;
};

enum class RowClass : std::uint8_t { kReal = 0, kSynthetic = 1 };

/// Concatenation of the original matrix and its synthetic contrast, with the
/// original rows first so row index i < real_count identifies original point i.
struct LabeledDataset {
    FeatureMatrix matrix;
    std::vector<RowClass> labels;
    std::size_t real_count = 0;
};

namespace detail {

/// Strict finite-real parse of a whole cell; rejects inf/nan and partial
/// consumes like "1.5x".
inline std::optional<double> parse_finite(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    if (line.find('"') != std::string::npos) {
        throw CsvFormatError("line " + std::to_string(line_no) +
                             ": quoted cells are not supported");
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        std::string_view cell(line.data() + start,
                              (pos == std::string::npos ? line.size() : pos) - start);
        cells.emplace_back(trim(cell));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return cells;
}

}  // namespace detail

/// Reads a schema file: one `name,NUMERIC|CATEGORICAL` line per column.
inline FeatureSchema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFileError("cannot open schema file '" + path + "'");
    FeatureSchema schema;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line, line_no);
        if (cells.size() != 2) {
            throw CsvFormatError("schema file '" + path + "' line " + std::to_string(line_no) +
                                 ": expected `name,NUMERIC|CATEGORICAL`");
        }
        ColumnKind kind;
        if (cells[1] == "NUMERIC") {
            kind = ColumnKind::kNumeric;
        } else if (cells[1] == "CATEGORICAL") {
            kind = ColumnKind::kCategorical;
        } else {
            throw CsvFormatError("schema file '" + path + "' line " + std::to_string(line_no) +
                                 ": unknown kind '" + cells[1] + "'");
        }
        schema.columns.push_back({cells[0], kind});
    }
    schema.validate();
    return schema;
}

/// Loads a CSV with a header row into a typed matrix.
///
/// Without a schema hint, a column is NUMERIC iff every cell parses as a
/// finite real, otherwise CATEGORICAL. Empty cells are rejected outright; no
/// imputation is performed.
inline FeatureMatrix load_dataset(const std::string& path,
                                  const std::optional<FeatureSchema>& schema_hint = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw MissingFileError("cannot open input file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw CsvFormatError("'" + path + "' is empty");
    auto header = detail::split_csv_line(line, 1);
    const std::size_t m = header.size();

    std::vector<std::vector<std::string>> raw_rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty() && in.peek() == EOF) break;  // trailing newline
        auto cells = detail::split_csv_line(line, line_no);
        if (cells.size() != m) {
            throw RaggedRowError("'" + path + "' line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(m) + " cells, got " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < m; ++c) {
            if (cells[c].empty()) {
                throw EmptyCellError("'" + path + "' line " + std::to_string(line_no) +
                                     ", column '" + header[c] + "': empty cell");
            }
        }
        raw_rows.push_back(std::move(cells));
    }
    const std::size_t n = raw_rows.size();
    if (n < 2) throw CsvFormatError("'" + path + "' has " + std::to_string(n) +
                                    " data rows; at least 2 are required");

    FeatureSchema schema;
    if (schema_hint) {
        if (schema_hint->size() != m) {
            throw SchemaMismatchError("schema hint has " + std::to_string(schema_hint->size()) +
                                      " columns, file has " + std::to_string(m));
        }
        for (std::size_t c = 0; c < m; ++c) {
            if (schema_hint->columns[c].name != header[c]) {
                throw SchemaMismatchError("schema hint column " + std::to_string(c) + " is '" +
                                          schema_hint->columns[c].name + "', file header says '" +
                                          header[c] + "'");
            }
        }
        schema = *schema_hint;
    } else {
        for (std::size_t c = 0; c < m; ++c) {
            bool all_numeric = true;
            for (const auto& row : raw_rows) {
                if (!detail::parse_finite(row[c])) {
                    all_numeric = false;
                    break;
                }
            }
            schema.columns.push_back(
                {header[c], all_numeric ? ColumnKind::kNumeric : ColumnKind::kCategorical});
        }
    }
    schema.validate();

    FeatureMatrix matrix(schema, n);
    for (std::size_t c = 0; c < m; ++c) {
        if (schema.columns[c].kind == ColumnKind::kNumeric) {
            for (std::size_t r = 0; r < n; ++r) {
                auto v = detail::parse_finite(raw_rows[r][c]);
                if (!v) {
                    throw NonFiniteValueError("'" + path + "' row " + std::to_string(r + 1) +
                                              ", column '" + header[c] + "': '" + raw_rows[r][c] +
                                              "' is not a finite number");
                }
                matrix.set_numeric(r, c, *v);
            }
        } else {
            for (std::size_t r = 0; r < n; ++r) {
                matrix.set_category(r, c, std::move(raw_rows[r][c]));
            }
        }
    }
    return matrix;
}

/// Builds the synthetic contrast matrix: every column of the result is
/// sampled independently and uniformly with replacement from the same column
/// of the source, so the joint distribution is the product of the marginals.
inline FeatureMatrix generate_synthetic(const FeatureMatrix& x, std::uint64_t seed) {
    if (x.rows() == 0) throw InvalidArgumentError("cannot generate from an empty matrix");
    const std::size_t n = x.rows();
    FeatureMatrix y(x.schema(), n);
    for (std::size_t c = 0; c < x.cols(); ++c) {
        Rng rng(derive_seed(seed, c));
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t j = rng.index(n);
            if (x.kind(c) == ColumnKind::kNumeric) {
                y.set_numeric(r, c, x.numeric(j, c));
            } else {
                y.set_category(r, c, x.category(j, c));
            }
        }
    }
    return y;
}

/// Concatenates original rows (class REAL) with synthetic rows (class
/// SYNTHETIC), original first.
inline LabeledDataset label_real_vs_synthetic(const FeatureMatrix& x, const FeatureMatrix& y) {
    if (x.schema() != y.schema()) {
        throw SchemaMismatchError("original and synthetic matrices have different schemas");
    }
    LabeledDataset out;
    out.real_count = x.rows();
    out.matrix = FeatureMatrix(x.schema(), x.rows() + y.rows());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        if (x.kind(c) == ColumnKind::kNumeric) {
            for (std::size_t r = 0; r < x.rows(); ++r) out.matrix.set_numeric(r, c, x.numeric(r, c));
            for (std::size_t r = 0; r < y.rows(); ++r) {
                out.matrix.set_numeric(x.rows() + r, c, y.numeric(r, c));
            }
        } else {
            for (std::size_t r = 0; r < x.rows(); ++r) {
                out.matrix.set_category(r, c, x.category(r, c));
            }
            for (std::size_t r = 0; r < y.rows(); ++r) {
                out.matrix.set_category(x.rows() + r, c, y.category(r, c));
            }
        }
    }
    out.labels.assign(x.rows(), RowClass::kReal);
    out.labels.resize(x.rows() + y.rows(), RowClass::kSynthetic);
    return out;
}

/// Copies the given rows of a matrix, preserving order.
inline FeatureMatrix take_rows(const FeatureMatrix& x, const std::vector<std::size_t>& rows) {
    FeatureMatrix out(x.schema(), rows.size());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        if (x.kind(c) == ColumnKind::kNumeric) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                out.set_numeric(i, c, x.numeric(rows[i], c));
            }
        } else {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                out.set_category(i, c, x.category(rows[i], c));
            }
        }
    }
    return out;
}

struct Subsample {
    FeatureMatrix matrix;
    std::vector<int> labels;
};

/// Uniform sample without replacement of ceil(fraction * N) rows, labels kept
/// aligned. fraction = 1 returns the input unchanged.
inline Subsample subsample(const FeatureMatrix& x, const std::vector<int>& labels, double fraction,
                           std::uint64_t seed) {
    if (!(fraction > 0.0) || fraction > 1.0) {
        throw InvalidArgumentError("fraction must be in (0, 1]");
    }
    if (labels.size() != x.rows()) {
        throw InvalidArgumentError("labels length does not match row count");
    }
    if (fraction == 1.0) return {x, labels};
    // Snap products that should be integers before taking the ceiling.
    const auto take =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(x.rows()) - 1e-9));
    if (take < 2) {
        throw EmptySampleError("subsample of " + std::to_string(take) +
                               " rows is too small (need at least 2)");
    }
    Rng rng(seed);
    const auto picked = rng.sample_without_replacement(x.rows(), take);
    Subsample out;
    out.matrix = take_rows(x, picked);
    out.labels.reserve(take);
    for (auto i : picked) out.labels.push_back(labels[i]);
    return out;
}

/// Splits off a ground-truth column with values in {0, 1}, returning the
/// remaining feature matrix and the labels.
inline std::pair<FeatureMatrix, std::vector<int>> split_label_column(const FeatureMatrix& x,
                                                                     const std::string& name) {
    std::size_t label_col = x.cols();
    for (std::size_t c = 0; c < x.cols(); ++c) {
        if (x.schema().columns[c].name == name) {
            label_col = c;
            break;
        }
    }
    if (label_col == x.cols()) throw Error("label column '" + name + "' not found");
    if (x.cols() < 2) throw Error("no feature columns besides the label column");

    std::vector<int> labels(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        int v;
        if (x.kind(label_col) == ColumnKind::kNumeric) {
            const double d = x.numeric(r, label_col);
            if (d != 0.0 && d != 1.0) {
                throw Error("label column '" + name + "' row " + std::to_string(r + 1) +
                            " is not 0 or 1");
            }
            v = static_cast<int>(d);
        } else {
            const std::string& s = x.category(r, label_col);
            if (s != "0" && s != "1") {
                throw Error("label column '" + name + "' row " + std::to_string(r + 1) +
                            " is not 0 or 1");
            }
            v = s == "1" ? 1 : 0;
        }
        labels[r] = v;
    }

    FeatureSchema rest;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        if (c != label_col) rest.columns.push_back(x.schema().columns[c]);
    }
    FeatureMatrix features(rest, x.rows());
    std::size_t out_c = 0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        if (c == label_col) continue;
        if (x.kind(c) == ColumnKind::kNumeric) {
            for (std::size_t r = 0; r < x.rows(); ++r) features.set_numeric(r, out_c, x.numeric(r, c));
        } else {
            for (std::size_t r = 0; r < x.rows(); ++r) {
                features.set_category(r, out_c, x.category(r, c));
            }
        }
        ++out_c;
    }
    return {std::move(features), std::move(labels)};
}

}  // namespace rfad
