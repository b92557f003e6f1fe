#include <CLI11.hpp>
#include <iostream>

#include "taei/harness.hpp"

// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
namespace {

int guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Latent-space minority oversampling and evaluation toolkit"};
    app.require_subcommand(1);

    // gen-artificial
    auto* gen = app.add_subcommand("gen-artificial",
                                   "Generate a sphere-manifold benchmark dataset");
    int dims = 6, n = 1000, bins = 7, discretize_k = 0;
    double minority_frac = 0.05;
    std::uint64_t seed = 0;
    std::string out_data, out_schema, out_sidecar;
    gen->add_option("--dims", dims, "feature dimensions (>= 3)");
    gen->add_option("--n", n, "number of samples");
    gen->add_option("--minority-frac", minority_frac, "minority fraction mu");
    gen->add_option("--bins", bins, "bins per discretized feature");
    gen->add_option("--discretize", discretize_k, "number of leading features to discretize");
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--out-data", out_data, "output CSV path")->required();
    gen->add_option("--out-schema", out_schema, "output schema JSON path")->required();
    gen->add_option("--out-sidecar", out_sidecar, "output sidecar JSON path")->required();
    gen->callback([&] {
        std::exit(guarded([&] {
            taei::bench::BenchmarkDataset ds;
            ds.klass = "cli";
            ds.spec = taei::bench::make_sphere_spec(dims, n, minority_frac, seed);
            taei::tab::MixedDataset cont = taei::bench::sample_sphere_dataset(ds.spec);
            if (discretize_k > 0) {
                std::vector<int> features;
                for (int f = 0; f < discretize_k; ++f) features.push_back(f);
                auto dr = taei::bench::discretize(cont, features, bins, seed);
                ds.data = std::move(dr.data);
                ds.bin_maps = std::move(dr.bin_maps);
            } else {
                ds.data = std::move(cont);
            }
            taei::tab::write_csv(ds.data, out_data);
            ds.data.schema.save(out_schema);
            taei::harness::write_text_file(out_sidecar, taei::bench::sidecar_json(ds) + "\n");
        }));
    });

    // oversample
    auto* ov = app.add_subcommand("oversample", "Augment a dataset with synthetic minority rows");
    std::string data_path, schema_path, method = "smote_ae", out_path;
    double ratio = 0.0;
    int n_syn = 0, k = 5, latent_dim = 0;
    ov->add_option("--data", data_path, "input CSV")->required();
    ov->add_option("--schema", schema_path, "schema JSON")->required();
    ov->add_option("--method", method, "oversampler method name");
    ov->add_option("--ratio", ratio, "fraction of the class gap to close, (0, 1]");
    ov->add_option("--n-syn", n_syn, "absolute number of synthetic rows");
    ov->add_option("--k", k, "neighbor count for SMOTE-family methods");
    ov->add_option("--latent-dim", latent_dim, "latent width (0 = auto)");
    ov->add_option("--seed", seed, "random seed");
    ov->add_option("--out", out_path, "output CSV (original + synthetic rows)")->required();
    ov->callback([&] {
        std::exit(guarded([&] {
            auto schema = taei::tab::TabularSchema::load(schema_path);
            auto data = taei::tab::load_csv(data_path, schema);
            taei::os::OversamplerSpec spec;
            spec.method = taei::os::method_from_name(method);
            if (n_syn > 0)
                spec.n_syn = n_syn;
            else if (ratio > 0.0)
                spec.ratio = ratio;
            else if (spec.method != taei::os::Method::NoOS)
                throw std::invalid_argument("set --ratio or --n-syn");
            spec.k = k;
            spec.latent_dim = latent_dim;
            spec.seed = seed;
            // the full file is the training fold; a carved-out stratified
            // slice serves as the autoencoder's early-stopping fold
            auto folds = taei::tab::stratified_split(data, {0.8, 0.1, 0.1},
                                                     taei::mix_seed(seed, 0x56616cULL));
            auto aug = taei::os::oversample(data, folds.val, spec);
            taei::tab::write_csv(aug.combined(), out_path);
        }));
    });

    // eval-artificial / eval-real / pareto
    std::string config_path, out_report, out_table, report_path, pareto_out;
    auto* ea = app.add_subcommand("eval-artificial", "Cover/error benchmark over sphere datasets");
    ea->add_option("--config", config_path, "config JSON")->required();
    ea->add_option("--out-report", out_report, "report JSON path")->required();
    ea->add_option("--out-table", out_table, "aggregate table CSV path");
    ea->callback([&] {
        std::exit(guarded([&] {
            auto cfg = taei::harness::ArtificialConfig::from_json(
                taei::harness::load_json_file(config_path));
            auto report = taei::harness::run_artificial(cfg);
            taei::harness::write_text_file(out_report, report.dump(2) + "\n");
            if (!out_table.empty())
                taei::harness::write_text_file(out_table,
                                               taei::harness::artificial_table_csv(report));
        }));
    });

    auto* er = app.add_subcommand("eval-real", "ROC-AUC evaluation on real datasets");
    er->add_option("--config", config_path, "config JSON")->required();
    er->add_option("--out-report", out_report, "report JSON path")->required();
    er->add_option("--out-table", out_table, "aggregate table CSV path");
    er->callback([&] {
        std::exit(guarded([&] {
            auto cfg = taei::harness::RealConfig::from_json(
                taei::harness::load_json_file(config_path));
            auto report = taei::harness::run_real(cfg);
            taei::harness::write_text_file(out_report, report.dump(2) + "\n");
            if (!out_table.empty())
                taei::harness::write_text_file(out_table,
                                               taei::harness::real_table_csv(report));
        }));
    });

    auto* pa = app.add_subcommand("pareto", "Extract the Pareto front of an artificial report");
    pa->add_option("--report", report_path, "report JSON from eval-artificial")->required();
    pa->add_option("--out", pareto_out, "output CSV path")->required();
    pa->callback([&] {
        std::exit(guarded([&] {
            auto report = taei::harness::load_json_file(report_path);
            taei::harness::write_text_file(pareto_out, taei::harness::pareto_csv(report));
        }));
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
