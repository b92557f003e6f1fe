#include "taei/tabular.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "taei/rng.hpp"

namespace taei::tab {

using nlohmann::json;

std::vector<int> TabularSchema::continuous_indices() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(columns.size()); ++i)
        if (columns[i].kind == ColumnKind::Continuous) out.push_back(i);
    return out;
}

std::vector<int> TabularSchema::categorical_indices() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(columns.size()); ++i)
        if (columns[i].kind == ColumnKind::Categorical) out.push_back(i);
    return out;
}

int TabularSchema::n_continuous() const {
    return static_cast<int>(continuous_indices().size());
}

int TabularSchema::n_categorical() const {
    return static_cast<int>(categorical_indices().size());
}

void TabularSchema::validate() const {
    std::set<std::string> names;
    for (const auto& c : columns) {
        if (!names.insert(c.name).second)
            throw std::invalid_argument("schema: duplicate column name " + c.name);
        if (c.kind == ColumnKind::Categorical) {
            if (c.categories.empty())
                throw std::invalid_argument("schema: empty vocabulary for " + c.name);
            std::set<std::string> vocab(c.categories.begin(), c.categories.end());
            if (vocab.size() != c.categories.size())
                throw std::invalid_argument("schema: duplicate category in " + c.name);
        }
    }
    if (names.count(target))
        throw std::invalid_argument("schema: target must not be a feature column");
}

std::string TabularSchema::to_json() const {
    json j;
    j["columns"] = json::array();
    for (const auto& c : columns) {
        json jc;
        jc["name"] = c.name;
        jc["kind"] = c.kind == ColumnKind::Continuous ? "continuous" : "categorical";
        if (c.kind == ColumnKind::Categorical) jc["categories"] = c.categories;
        j["columns"].push_back(jc);
    }
    j["target"] = target;
    j["minority_label"] = minority_label;
    return j.dump(2);
}

TabularSchema TabularSchema::from_json(const std::string& text) {
    json j = json::parse(text);
    TabularSchema s;
    for (const auto& jc : j.at("columns")) {
        Column c;
        c.name = jc.at("name").get<std::string>();
        const std::string kind = jc.at("kind").get<std::string>();
        if (kind == "continuous") {
            c.kind = ColumnKind::Continuous;
        } else if (kind == "categorical") {
            c.kind = ColumnKind::Categorical;
            c.categories = jc.at("categories").get<std::vector<std::string>>();
        } else {
            throw std::invalid_argument("schema: unknown column kind " + kind);
        }
        s.columns.push_back(std::move(c));
    }
    s.target = j.at("target").get<std::string>();
    s.minority_label = j.at("minority_label").get<std::string>();
    s.validate();
    return s;
}

TabularSchema TabularSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schema file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void TabularSchema::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write schema file " + path);
    out << to_json() << "\n";
}

std::uint64_t TabularSchema::hash() const { return hash_str(to_json()); }

int MixedDataset::minority_count() const {
    int n = 0;
    for (Eigen::Index i = 0; i < labels.size(); ++i) n += labels(i);
    return n;
}

MixedDataset MixedDataset::select(const std::vector<int>& rows) const {
    MixedDataset out;
    out.schema = schema;
    out.majority_label = majority_label;
    out.continuous.resize(rows.size(), continuous.cols());
    out.categorical.resize(rows.size(), categorical.cols());
    out.labels.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.continuous.row(i) = continuous.row(rows[i]);
        out.categorical.row(i) = categorical.row(rows[i]);
        out.labels(i) = labels(rows[i]);
    }
    return out;
}

MixedDataset MixedDataset::minority_rows() const {
    std::vector<int> rows;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        if (labels(i) == 1) rows.push_back(static_cast<int>(i));
    return select(rows);
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& col, int row) {
    double v;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error("unparseable continuous value '" + s + "' in column " +
                                 col + " row " + std::to_string(row));
    return v;
}

}  // namespace

MixedDataset load_csv(const std::string& path, const TabularSchema& schema,
                      LoadStats* stats) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file " + path);
    const auto header = split_line(line);

    std::unordered_map<std::string, int> pos;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) pos[header[i]] = i;
    std::vector<int> col_pos;
    for (const auto& c : schema.columns) {
        auto it = pos.find(c.name);
        if (it == pos.end()) throw std::runtime_error("missing column " + c.name);
        col_pos.push_back(it->second);
    }
    auto t_it = pos.find(schema.target);
    if (t_it == pos.end()) throw std::runtime_error("missing target column " + schema.target);
    const int target_pos = t_it->second;

    std::vector<std::unordered_map<std::string, int>> code_maps(schema.columns.size());
    for (std::size_t c = 0; c < schema.columns.size(); ++c)
        for (int k = 0; k < static_cast<int>(schema.columns[c].categories.size()); ++k)
            code_maps[c][schema.columns[c].categories[k]] = k;

    std::vector<std::vector<double>> cont_rows;
    std::vector<std::vector<int>> cat_rows;
    std::vector<int> labels;
    std::set<std::string> target_values;
    std::string majority_value = "other";
    int unseen = 0;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error("row " + std::to_string(row) + ": wrong field count");
        std::vector<double> cont;
        std::vector<int> cat;
        for (std::size_t c = 0; c < schema.columns.size(); ++c) {
            const std::string& raw = fields[col_pos[c]];
            if (schema.columns[c].kind == ColumnKind::Continuous) {
                cont.push_back(parse_double(raw, schema.columns[c].name, row));
            } else {
                auto it = code_maps[c].find(raw);
                if (it == code_maps[c].end()) {
                    cat.push_back(static_cast<int>(schema.columns[c].categories.size()));
                    ++unseen;
                } else {
                    cat.push_back(it->second);
                }
            }
        }
        const std::string& t = fields[target_pos];
        target_values.insert(t);
        labels.push_back(t == schema.minority_label ? 1 : 0);
        if (t != schema.minority_label) majority_value = t;
        cont_rows.push_back(std::move(cont));
        cat_rows.push_back(std::move(cat));
    }
    if (target_values.size() > 2)
        throw std::runtime_error("target column is not binary (" +
                                 std::to_string(target_values.size()) + " values)");

    MixedDataset d;
    d.schema = schema;
    d.majority_label = majority_value;
    const Eigen::Index n = static_cast<Eigen::Index>(labels.size());
    d.continuous.resize(n, schema.n_continuous());
    d.categorical.resize(n, schema.n_categorical());
    d.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int c = 0; c < schema.n_continuous(); ++c) d.continuous(i, c) = cont_rows[i][c];
        for (int c = 0; c < schema.n_categorical(); ++c) d.categorical(i, c) = cat_rows[i][c];
        d.labels(i) = labels[i];
    }
    if (stats) stats->unseen_categories = unseen;
    return d;
}

void write_csv(const MixedDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    bool first = true;
    for (const auto& c : data.schema.columns) {
        if (!first) out << ",";
        out << c.name;
        first = false;
    }
    out << "," << data.schema.target << "\n";
    const auto cat_cols = data.schema.categorical_indices();
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        int ci = 0, di = 0;
        first = true;
        for (const auto& c : data.schema.columns) {
            if (!first) out << ",";
            first = false;
            if (c.kind == ColumnKind::Continuous) {
                out << format_double(data.continuous(i, ci++));
            } else {
                const int code = data.categorical(i, di++);
                if (code < static_cast<int>(c.categories.size()))
                    out << c.categories[code];
                else
                    out << "<unseen>";
            }
        }
        out << "," << (data.labels(i) == 1 ? data.schema.minority_label : data.majority_label);
        out << "\n";
    }
}

std::pair<MixedDataset, PreprocessState> fit_transform(const MixedDataset& data) {
    if (data.size() < 2) throw std::invalid_argument("fit_transform: need N >= 2");
    PreprocessState st;
    const Eigen::Index n = data.size();
    for (Eigen::Index c = 0; c < data.continuous.cols(); ++c) {
        const double mean = data.continuous.col(c).mean();
        const double ss = (data.continuous.col(c).array() - mean).square().sum();
        double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd <= 0.0) {
            // constant column: pass through
            st.mean.push_back(0.0);
            st.scale.push_back(1.0);
        } else {
            st.mean.push_back(mean);
            st.scale.push_back(sd);
        }
    }
    return {transform(data, st), st};
}

MixedDataset transform(const MixedDataset& data, const PreprocessState& state) {
    if (static_cast<Eigen::Index>(state.mean.size()) != data.continuous.cols())
        throw std::invalid_argument("transform: state/schema mismatch");
    MixedDataset out = data;
    for (Eigen::Index c = 0; c < out.continuous.cols(); ++c)
        out.continuous.col(c) = (out.continuous.col(c).array() - state.mean[c]) / state.scale[c];
    return out;
}

MixedDataset inverse_transform(const MixedDataset& data, const PreprocessState& state) {
    if (static_cast<Eigen::Index>(state.mean.size()) != data.continuous.cols())
        throw std::invalid_argument("inverse_transform: state/schema mismatch");
    MixedDataset out = data;
    for (Eigen::Index c = 0; c < out.continuous.cols(); ++c)
        out.continuous.col(c) = out.continuous.col(c).array() * state.scale[c] + state.mean[c];
    return out;
}

SplitResult stratified_split(const MixedDataset& data,
                             std::array<double, 3> ratios, std::uint64_t seed) {
    const double rsum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(rsum - 1.0) > 1e-9)
        throw std::invalid_argument("stratified_split: ratios must sum to 1");
    Rng rng(seed);
    std::vector<int> fold_of(data.size(), -1);
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<int> rows;
        for (Eigen::Index i = 0; i < data.size(); ++i)
            if (data.labels(i) == cls) rows.push_back(static_cast<int>(i));
        const int n = static_cast<int>(rows.size());
        if (n < 3)
            throw std::invalid_argument("stratified_split: class " + std::to_string(cls) +
                                        " has fewer than 3 samples");
        // largest-remainder apportionment of n across the three folds
        std::array<int, 3> counts{};
        std::array<double, 3> rem{};
        int assigned = 0;
        for (int f = 0; f < 3; ++f) {
            const double exact = ratios[f] * n;
            counts[f] = static_cast<int>(std::floor(exact));
            rem[f] = exact - counts[f];
            assigned += counts[f];
        }
        while (assigned < n) {
            int best = 0;
            for (int f = 1; f < 3; ++f)
                if (rem[f] > rem[best]) best = f;
            counts[best] += 1;
            rem[best] = -1.0;
            ++assigned;
        }
        rng.shuffle(rows);
        int idx = 0;
        for (int f = 0; f < 3; ++f)
            for (int k = 0; k < counts[f]; ++k) fold_of[rows[idx++]] = f;
    }
    std::array<std::vector<int>, 3> folds;
    for (Eigen::Index i = 0; i < data.size(); ++i) folds[fold_of[i]].push_back(static_cast<int>(i));
    return {data.select(folds[0]), data.select(folds[1]), data.select(folds[2])};
}

}  // namespace taei::tab
