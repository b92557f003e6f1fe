#pragma once
#include <string>
#include <vector>

#include <json.hpp>

#include "taei/oversample.hpp"
#include "taei/sphere_bench.hpp"

namespace taei::harness {

using nlohmann::json;

// One oversampler entry of an experiment: a method plus its HP grid.
struct OversamplerEntry {
    os::Method method = os::Method::NoOS;
    std::vector<os::OversamplerSpec> grid;  // seed filled per cell
};

struct ArtificialConfig {
    bench::SuiteConfig suite;
    int n_synthetic = 1000;
    int n_reference = 20000;
    std::vector<OversamplerEntry> oversamplers;
    std::uint64_t base_seed = 1;
    bool timing = false;  // wall times break byte-identical reports

    static ArtificialConfig from_json(const json& j);
};

struct DatasetSource {
    std::string id;
    std::string data_path;
    std::string schema_path;
};

struct ClassifierConfig {
    std::string type = "knn";  // "knn" or "command"
    int k = 5;
    std::string command;  // invoked as: command <train.csv> <schema.json> <query.csv> <scores.txt>
};

struct RealConfig {
    std::vector<DatasetSource> datasets;
    std::vector<OversamplerEntry> oversamplers;
    int repeats = 7;
    ClassifierConfig classifier;
    std::uint64_t base_seed = 1;
    bool timing = false;

    static RealConfig from_json(const json& j);
};

std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& dataset_id,
                        const std::string& method, int hp_index, int repeat);

json run_artificial(const ArtificialConfig& config);
json run_real(const RealConfig& config);

// Aggregate table as CSV text (header included).
std::string artificial_table_csv(const json& report);
std::string real_table_csv(const json& report);
// Pareto front of an artificial report's aggregate rows.
std::string pareto_csv(const json& report);

json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace taei::harness
