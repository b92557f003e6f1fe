#pragma once
#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace taei::tab {

using Eigen::MatrixXd;
using Eigen::MatrixXi;
using Eigen::VectorXi;

enum class ColumnKind { Continuous, Categorical };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Continuous;
    std::vector<std::string> categories;  // ordered vocabulary, categorical only
};

struct TabularSchema {
    std::vector<Column> columns;  // feature columns, target excluded
    std::string target;
    std::string minority_label;

    std::vector<int> continuous_indices() const;
    std::vector<int> categorical_indices() const;
    int n_continuous() const;
    int n_categorical() const;
    void validate() const;

    std::string to_json() const;
    static TabularSchema from_json(const std::string& text);
    static TabularSchema load(const std::string& path);
    void save(const std::string& path) const;
    // Stable content hash, used to guard model checkpoints.
    std::uint64_t hash() const;
};

// Row-major table of encoded samples. Labels: 1 = minority, 0 = majority.
struct MixedDataset {
    TabularSchema schema;
    MatrixXd continuous;   // N x |C|
    MatrixXi categorical;  // N x |D| of codes; vocab size = reserved unseen code
    VectorXi labels;       // N
    std::string majority_label = "other";  // original target string for label 0

    Eigen::Index size() const { return labels.size(); }
    int minority_count() const;
    MixedDataset select(const std::vector<int>& rows) const;
    MixedDataset minority_rows() const;
};

struct PreprocessState {
    std::vector<double> mean;   // per continuous column
    std::vector<double> scale;  // sample std; 1 for constant columns
};

struct LoadStats {
    int unseen_categories = 0;
};

MixedDataset load_csv(const std::string& path, const TabularSchema& schema,
                      LoadStats* stats = nullptr);
void write_csv(const MixedDataset& data, const std::string& path);

// Shortest round-trip decimal for doubles, also used by report writers.
std::string format_double(double v);

std::pair<MixedDataset, PreprocessState> fit_transform(const MixedDataset& data);
MixedDataset transform(const MixedDataset& data, const PreprocessState& state);
MixedDataset inverse_transform(const MixedDataset& data, const PreprocessState& state);

struct SplitResult {
    MixedDataset train, val, test;
};

SplitResult stratified_split(const MixedDataset& data,
                             std::array<double, 3> ratios,
                             std::uint64_t seed);

}  // namespace taei::tab
