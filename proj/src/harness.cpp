#include "taei/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <unistd.h>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "taei/metrics.hpp"
#include "taei/tabular.hpp"

namespace taei::harness {

namespace {

os::OversamplerSpec spec_from_json(const json& j) {
    os::OversamplerSpec spec;
    if (j.contains("ratio")) spec.ratio = j["ratio"].get<double>();
    if (j.contains("n_syn")) spec.n_syn = j["n_syn"].get<int>();
    if (j.contains("k")) spec.k = j["k"].get<int>();
    if (j.contains("latent_dim")) spec.latent_dim = j["latent_dim"].get<int>();
    if (j.contains("hidden_widths"))
        spec.hidden_widths = j["hidden_widths"].get<std::vector<int>>();
    if (j.contains("max_epochs")) spec.train.max_epochs = j["max_epochs"].get<int>();
    if (j.contains("batch_size")) spec.train.batch_size = j["batch_size"].get<int>();
    if (j.contains("patience")) spec.train.patience = j["patience"].get<int>();
    if (j.contains("lr")) spec.train.lr = j["lr"].get<double>();
    return spec;
}

json spec_to_json(const os::OversamplerSpec& spec) {
    json j;
    if (spec.ratio) j["ratio"] = *spec.ratio;
    if (spec.n_syn) j["n_syn"] = *spec.n_syn;
    j["k"] = spec.k;
    j["latent_dim"] = spec.latent_dim;
    j["hidden_widths"] = spec.hidden_widths;
    j["max_epochs"] = spec.train.max_epochs;
    j["batch_size"] = spec.train.batch_size;
    j["patience"] = spec.train.patience;
    j["lr"] = spec.train.lr;
    return j;
}

std::vector<OversamplerEntry> parse_oversamplers(const json& j,
                                                 const json& defaults_grid) {
    std::vector<OversamplerEntry> out;
    if (!j.is_array()) throw std::invalid_argument("config: oversamplers must be an array");
    for (const auto& je : j) {
        OversamplerEntry e;
        e.method = os::method_from_name(je.at("method").get<std::string>());
        const json& grid = je.contains("grid") ? je["grid"] : defaults_grid;
        for (const auto& jg : grid) {
            json merged = je;
            merged.erase("grid");
            merged.erase("method");
            merged.update(jg);
            e.grid.push_back(spec_from_json(merged));
        }
        if (e.grid.empty()) e.grid.push_back(spec_from_json(je));
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<OversamplerEntry> default_all_methods(bool with_ratio_grid) {
    std::vector<OversamplerEntry> out;
    for (os::Method m : os::all_methods()) {
        OversamplerEntry e;
        e.method = m;
        if (with_ratio_grid && m != os::Method::NoOS) {
            for (double r : {0.1, 0.2, 0.3}) {
                os::OversamplerSpec s;
                s.ratio = r;
                e.grid.push_back(s);
            }
        } else {
            e.grid.push_back({});
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

ArtificialConfig ArtificialConfig::from_json(const json& j) {
    ArtificialConfig c;
    if (j.contains("dims")) c.suite.dims = j["dims"].get<std::vector<int>>();
    if (j.contains("sizes")) c.suite.sizes = j["sizes"].get<std::vector<int>>();
    if (j.contains("modalities"))
        c.suite.modalities = j["modalities"].get<std::vector<std::string>>();
    if (j.contains("repeats")) c.suite.repeats = j["repeats"].get<int>();
    if (j.contains("mu")) c.suite.mu = j["mu"].get<double>();
    if (j.contains("bins")) c.suite.bins = j["bins"].get<int>();
    if (j.contains("n_synthetic")) c.n_synthetic = j["n_synthetic"].get<int>();
    if (j.contains("n_reference")) c.n_reference = j["n_reference"].get<int>();
    if (j.contains("base_seed")) c.base_seed = j["base_seed"].get<std::uint64_t>();
    if (j.contains("timing")) c.timing = j["timing"].get<bool>();
    c.suite.base_seed = c.base_seed;
    if (j.contains("oversamplers"))
        c.oversamplers = parse_oversamplers(j["oversamplers"], json::array());
    else
        c.oversamplers = default_all_methods(false);
    return c;
}

RealConfig RealConfig::from_json(const json& j) {
    RealConfig c;
    for (const auto& jd : j.at("datasets")) {
        DatasetSource s;
        s.id = jd.at("id").get<std::string>();
        s.data_path = jd.at("data").get<std::string>();
        s.schema_path = jd.at("schema").get<std::string>();
        c.datasets.push_back(std::move(s));
    }
    if (j.contains("repeats")) c.repeats = j["repeats"].get<int>();
    if (j.contains("base_seed")) c.base_seed = j["base_seed"].get<std::uint64_t>();
    if (j.contains("timing")) c.timing = j["timing"].get<bool>();
    if (j.contains("classifier")) {
        const auto& jc = j["classifier"];
        if (jc.contains("type")) c.classifier.type = jc["type"].get<std::string>();
        if (jc.contains("k")) c.classifier.k = jc["k"].get<int>();
        if (jc.contains("command")) c.classifier.command = jc["command"].get<std::string>();
    }
    json default_grid = json::array({{{"ratio", 0.1}}, {{"ratio", 0.2}}, {{"ratio", 0.3}}});
    if (j.contains("oversamplers"))
        c.oversamplers = parse_oversamplers(j["oversamplers"], default_grid);
    else
        c.oversamplers = default_all_methods(true);
    return c;
}

std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& dataset_id,
                        const std::string& method, int hp_index, int repeat) {
    std::uint64_t s = mix_seed(base_seed, hash_str(dataset_id));
    s = mix_seed(s, hash_str(method));
    s = mix_seed(s, static_cast<std::uint64_t>(hp_index));
    return mix_seed(s, static_cast<std::uint64_t>(repeat));
}

namespace {

// Reference samples go through the same bin-center snapping as the
// discretized data so distances live in one geometry.
Eigen::MatrixXd snap_to_bins(const Eigen::MatrixXd& points,
                             const std::vector<bench::BinMap>& bin_maps) {
    Eigen::MatrixXd out = points;
    for (const auto& bm : bin_maps) {
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            int bin = static_cast<int>(std::floor((out(i, bm.column) + 1.0) * bm.bins / 2.0));
            bin = std::clamp(bin, 0, bm.bins - 1);
            out(i, bm.column) = -1.0 + (2.0 * bin + 1.0) / bm.bins;
        }
    }
    return out;
}

Eigen::MatrixXd synthetic_geometry(const bench::BenchmarkDataset& ds,
                                   const interp::SyntheticBatch& batch) {
    tab::MixedDataset tmp;
    tmp.schema = ds.data.schema;
    tmp.continuous = batch.continuous;
    tmp.categorical = batch.categorical;
    tmp.labels = Eigen::VectorXi::Ones(batch.size());
    return bench::to_geometric(tmp, ds.bin_maps);
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

json run_artificial(const ArtificialConfig& config) {
    const auto suite = bench::make_benchmark_suite(config.suite);
    json records = json::array();
    // method -> (covers, errors) across all successful cells
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_method;
    std::map<std::string, int> failures;

    for (const auto& ds : suite) {
        for (const auto& entry : config.oversamplers) {
            const std::string mname = os::method_name(entry.method);
            for (int hp = 0; hp < static_cast<int>(entry.grid.size()); ++hp) {
                const std::uint64_t seed =
                    cell_seed(config.base_seed, ds.klass + "#" + std::to_string(ds.repeat),
                              mname, hp, 0);
                json rec;
                rec["dataset"] = ds.klass;
                rec["repeat"] = ds.repeat;
                rec["method"] = mname;
                rec["hp_index"] = hp;
                rec["seed"] = seed;
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    auto folds = tab::stratified_split(ds.data, {0.6, 0.2, 0.2},
                                                       mix_seed(seed, 0x53706cULL));
                    Eigen::MatrixXd synth_geo;
                    if (entry.method == os::Method::NoOS) {
                        synth_geo = bench::to_geometric(folds.train.minority_rows(),
                                                        ds.bin_maps);
                    } else {
                        os::OversamplerSpec spec = entry.grid[hp];
                        spec.method = entry.method;
                        spec.ratio.reset();
                        spec.n_syn = config.n_synthetic;
                        spec.seed = seed;
                        auto aug = os::oversample(folds.train, folds.val, spec);
                        synth_geo = synthetic_geometry(ds, aug.synthetic);
                    }
                    Rng ref_rng(mix_seed(seed, 0x526566ULL));
                    Eigen::MatrixXd ref_min =
                        bench::sample_region(ds.spec, true, config.n_reference, ref_rng);
                    Eigen::MatrixXd ref_maj =
                        bench::sample_region(ds.spec, false, config.n_reference, ref_rng);
                    ref_min = snap_to_bins(ref_min, ds.bin_maps);
                    ref_maj = snap_to_bins(ref_maj, ds.bin_maps);
                    const double cov = bench::cover(synth_geo, ref_min);
                    const double err = bench::error_metric(synth_geo, ref_min, ref_maj);
                    rec["cover"] = cov;
                    rec["error"] = err;
                    by_method[mname].first.push_back(cov);
                    by_method[mname].second.push_back(err);
                } catch (const std::exception& e) {
                    rec["failed"] = true;
                    rec["what"] = e.what();
                    failures[mname] += 1;
                }
                if (config.timing)
                    rec["wall_time"] = std::chrono::duration<double>(
                                           std::chrono::steady_clock::now() - t0)
                                           .count();
                records.push_back(std::move(rec));
            }
        }
    }

    json aggregates = json::array();
    std::vector<std::pair<double, double>> points;
    std::vector<std::string> methods;
    for (const auto& entry : config.oversamplers) {
        const std::string mname = os::method_name(entry.method);
        json a;
        a["method"] = mname;
        a["n_cells"] = static_cast<int>(by_method[mname].first.size());
        a["n_failed"] = failures.count(mname) ? failures[mname] : 0;
        if (!by_method[mname].first.empty()) {
            a["cover"] = mean_of(by_method[mname].first);
            a["error"] = mean_of(by_method[mname].second);
            points.emplace_back(a["cover"].get<double>(), a["error"].get<double>());
            methods.push_back(mname);
        }
        aggregates.push_back(std::move(a));
    }
    json front = json::array();
    if (!points.empty())
        for (int idx : bench::pareto_front(points)) front.push_back(methods[idx]);

    json report;
    report["task"] = "artificial";
    report["n_synthetic"] = config.n_synthetic;
    report["n_reference"] = config.n_reference;
    report["base_seed"] = config.base_seed;
    report["records"] = std::move(records);
    report["aggregates"] = std::move(aggregates);
    report["pareto_front"] = std::move(front);
    return report;
}

namespace {

std::vector<double> classify(const ClassifierConfig& cfg,
                             const tab::MixedDataset& train,
                             const tab::MixedDataset& query) {
    if (cfg.type == "knn")
        return metrics::knn_classifier_scores(
            train, query, std::min(cfg.k, static_cast<int>(train.size())));
    if (cfg.type != "command")
        throw std::invalid_argument("unknown classifier type " + cfg.type);
    namespace fs = std::filesystem;
    const fs::path dir =
        fs::temp_directory_path() / ("taei_clf_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string train_csv = (dir / "train.csv").string();
    const std::string schema_json = (dir / "schema.json").string();
    const std::string query_csv = (dir / "query.csv").string();
    const std::string scores_txt = (dir / "scores.txt").string();
    tab::write_csv(train, train_csv);
    train.schema.save(schema_json);
    tab::write_csv(query, query_csv);
    const std::string cmd = cfg.command + " " + train_csv + " " + schema_json + " " +
                            query_csv + " " + scores_txt;
    if (std::system(cmd.c_str()) != 0)
        throw std::runtime_error("external classifier failed: " + cmd);
    std::ifstream in(scores_txt);
    std::vector<double> scores;
    double v;
    while (in >> v) scores.push_back(v);
    fs::remove_all(dir);
    if (static_cast<Eigen::Index>(scores.size()) != query.size())
        throw std::runtime_error("external classifier returned wrong score count");
    return scores;
}

std::vector<int> label_vector(const tab::MixedDataset& d) {
    std::vector<int> out(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) out[i] = d.labels(i);
    return out;
}

}  // namespace

json run_real(const RealConfig& config) {
    json records = json::array();
    // (dataset, method, hp) -> per-repeat aucs
    struct CellAgg {
        std::vector<double> val, test;
    };
    std::map<std::string, std::map<std::string, std::map<int, CellAgg>>> agg;
    std::map<std::string, int> failures;

    for (const auto& src : config.datasets) {
        const tab::TabularSchema schema = tab::TabularSchema::load(src.schema_path);
        const tab::MixedDataset data = tab::load_csv(src.data_path, schema);
        for (const auto& entry : config.oversamplers) {
            const std::string mname = os::method_name(entry.method);
            for (int hp = 0; hp < static_cast<int>(entry.grid.size()); ++hp) {
                for (int rep = 0; rep < config.repeats; ++rep) {
                    const std::uint64_t seed =
                        cell_seed(config.base_seed, src.id, mname, hp, rep);
                    json rec;
                    rec["dataset"] = src.id;
                    rec["method"] = mname;
                    rec["hp_index"] = hp;
                    rec["hp"] = spec_to_json(entry.grid[hp]);
                    rec["repeat"] = rep;
                    rec["seed"] = seed;
                    const auto t0 = std::chrono::steady_clock::now();
                    try {
                        auto folds = tab::stratified_split(data, {0.6, 0.2, 0.2},
                                                           mix_seed(seed, 0x53706cULL));
                        os::OversamplerSpec spec = entry.grid[hp];
                        spec.method = entry.method;
                        if (!spec.ratio && !spec.n_syn) spec.ratio = 0.2;
                        spec.seed = seed;
                        auto aug = os::oversample(folds.train, folds.val, spec);
                        const tab::MixedDataset combined = aug.combined();
                        const double auc_val = metrics::roc_auc(
                            classify(config.classifier, combined, folds.val),
                            label_vector(folds.val));
                        const double auc_test = metrics::roc_auc(
                            classify(config.classifier, combined, folds.test),
                            label_vector(folds.test));
                        rec["roc_auc_val"] = auc_val;
                        rec["roc_auc_test"] = auc_test;
                        rec["n_syn"] = aug.n_syn();
                        auto& cell = agg[src.id][mname][hp];
                        cell.val.push_back(auc_val);
                        cell.test.push_back(auc_test);
                    } catch (const std::exception& e) {
                        rec["failed"] = true;
                        rec["what"] = e.what();
                        failures[mname] += 1;
                    }
                    if (config.timing)
                        rec["wall_time"] = std::chrono::duration<double>(
                                               std::chrono::steady_clock::now() - t0)
                                               .count();
                    records.push_back(std::move(rec));
                }
            }
        }
    }

    // HP selection per (dataset, method) under both modes
    auto aggregate_mode = [&](bool best_validation) {
        json rows = json::array();
        std::map<std::string, std::vector<double>> per_method;
        for (const auto& entry : config.oversamplers) {
            const std::string mname = os::method_name(entry.method);
            for (const auto& src : config.datasets) {
                auto dit = agg.find(src.id);
                if (dit == agg.end()) continue;
                auto mit = dit->second.find(mname);
                if (mit == dit->second.end() || mit->second.empty()) continue;
                double best_key = -1.0, best_test = 0.0;
                for (const auto& [hp, cell] : mit->second) {
                    if (cell.test.empty()) continue;
                    const double mv = mean_of(cell.val);
                    const double mt = mean_of(cell.test);
                    const double key = best_validation ? mv : mt;
                    if (key > best_key) {
                        best_key = key;
                        best_test = mt;
                    }
                }
                if (best_key >= 0.0) per_method[mname].push_back(best_test);
            }
        }
        double baseline = 0.0;
        if (per_method.count("no_os")) baseline = mean_of(per_method["no_os"]);
        for (const auto& entry : config.oversamplers) {
            const std::string mname = os::method_name(entry.method);
            if (!per_method.count(mname)) continue;
            json row;
            row["method"] = mname;
            row["roc_auc"] = mean_of(per_method[mname]);
            row["vs_baseline"] = mean_of(per_method[mname]) - baseline;
            row["n_datasets"] = static_cast<int>(per_method[mname].size());
            rows.push_back(std::move(row));
        }
        return rows;
    };

    json report;
    report["task"] = "real";
    report["repeats"] = config.repeats;
    report["base_seed"] = config.base_seed;
    report["records"] = std::move(records);
    report["aggregates"]["best_test"] = aggregate_mode(false);
    report["aggregates"]["best_validation"] = aggregate_mode(true);
    json fail = json::object();
    for (const auto& [m, n] : failures) fail[m] = n;
    report["failures"] = std::move(fail);
    return report;
}

std::string artificial_table_csv(const json& report) {
    std::ostringstream out;
    out << "method,cover,error,n_cells,n_failed,pareto_optimal\n";
    std::vector<std::string> front =
        report.at("pareto_front").get<std::vector<std::string>>();
    for (const auto& a : report.at("aggregates")) {
        const std::string m = a.at("method").get<std::string>();
        out << m << ",";
        if (a.contains("cover"))
            out << tab::format_double(a["cover"].get<double>()) << ","
                << tab::format_double(a["error"].get<double>());
        else
            out << ",";
        out << "," << a.at("n_cells").get<int>() << "," << a.at("n_failed").get<int>()
            << ","
            << (std::find(front.begin(), front.end(), m) != front.end() ? "yes" : "no")
            << "\n";
    }
    return out.str();
}

std::string real_table_csv(const json& report) {
    std::ostringstream out;
    out << "mode,method,roc_auc,vs_baseline,n_datasets\n";
    for (const char* mode : {"best_test", "best_validation"}) {
        for (const auto& row : report.at("aggregates").at(mode)) {
            out << mode << "," << row.at("method").get<std::string>() << ","
                << tab::format_double(row.at("roc_auc").get<double>()) << ","
                << tab::format_double(row.at("vs_baseline").get<double>()) << ","
                << row.at("n_datasets").get<int>() << "\n";
        }
    }
    return out.str();
}

std::string pareto_csv(const json& report) {
    std::vector<std::pair<double, double>> points;
    std::vector<std::string> methods;
    for (const auto& a : report.at("aggregates")) {
        if (!a.contains("cover")) continue;
        points.emplace_back(a["cover"].get<double>(), a["error"].get<double>());
        methods.push_back(a["method"].get<std::string>());
    }
    std::ostringstream out;
    out << "method,cover,error\n";
    if (!points.empty())
        for (int idx : bench::pareto_front(points))
            out << methods[idx] << "," << tab::format_double(points[idx].first) << ","
                << tab::format_double(points[idx].second) << "\n";
    return out.str();
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace taei::harness
