// shapeclust command line: ingest -> train -> encode -> cluster -> report,
// runnable as one pipeline or stage by stage over a shared output directory.
//
// Exit codes: 0 success, 1 stage failure, 2 configuration/usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shapeclust/shapeclust.hpp"

namespace fs = std::filesystem;
using namespace shapeclust;

namespace {

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<Method> out;
    for (const auto& n : names) out.push_back(method_from_name(n));
    return out;
}

std::vector<Metric> parse_metrics(const std::vector<std::string>& names, double minkowski_p) {
    std::vector<Metric> out;
    for (const auto& n : names) out.push_back(metric_from_name(n, minkowski_p));
    return out;
}

std::vector<std::string> ok_labels(const fs::path& manifest_path) {
    std::vector<std::string> labels;
    for (const auto& row : read_manifest_csv(manifest_path))
        if (row.status == "ok") labels.push_back(row.path);
    return labels;
}

std::vector<std::string> index_labels(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return labels;
}

struct GridChoice {
    Method method = Method::Single;
    Metric metric;
    double cophenet = 0.0;
};

// re-derive the winning pair from grid.csv rows (written method-major, so the
// first strict improvement preserves the selection tie-break)
GridChoice choice_from_grid(const fs::path& grid_path, double minkowski_p) {
    std::ifstream is(grid_path);
    if (!is) throw IoError("cannot open " + grid_path.string());
    std::string line;
    if (!std::getline(is, line) || line != "method,metric,cophenet,status")
        throw DecodeError("bad grid header in " + grid_path.string());
    GridChoice best;
    bool any = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = csv_split(line);
        if (f.size() != 4) throw DecodeError("bad grid row: " + line);
        if (f[3] == "skipped" || f[2].empty()) continue;
        const double v = std::stod(f[2]);
        if (!any || v > best.cophenet) {
            best.method = method_from_name(f[0]);
            best.metric = metric_from_name(f[1], minkowski_p);
            best.cophenet = v;
            any = true;
        }
    }
    if (!any) throw AllPairsSkipped("grid has no scored cells: " + grid_path.string());
    return best;
}

int run_command(const fs::path& config_path, bool seed_set, std::uint64_t seed) {
    ExperimentConfig cfg = load_config(config_path);
    if (seed_set) cfg.seed = seed;
    const RunArtifacts art = run_experiment(cfg);
    std::cout << "run complete: " << art.summary.string() << '\n';
    return 0;
}

int ingest_command(const fs::path& input, const fs::path& out_dir, const std::string& name,
                   double threshold, bool rebinarize) {
    fs::create_directories(out_dir);
    std::vector<ManifestRow> manifest;
    Dataset ds = load_dataset(input, name, threshold, &manifest, rebinarize);
    write_manifest_csv(out_dir / "manifest.csv", manifest);
    write_matrix_file(out_dir / "pixels.bin", ds.pixel_matrix());
    std::cout << "ingested " << ds.records.size() << " of " << manifest.size() << " files\n";
    return 0;
}

int train_command(const fs::path& pixels_path, const fs::path& out_dir,
                  const std::vector<std::size_t>& hidden, double beta, double lambda, double rho,
                  std::size_t epochs, double lr, double momentum, std::uint64_t seed) {
    fs::create_directories(out_dir);
    const Matrix pixels = read_matrix_file(pixels_path);
    std::vector<LayerConfig> cfgs;
    for (std::size_t l = 0; l < hidden.size(); ++l) {
        LayerConfig lc;
        lc.hidden_units = hidden[l];
        lc.beta = beta;
        lc.lambda = lambda;
        lc.rho = rho;
        lc.max_epochs = epochs;
        lc.learning_rate = lr;
        lc.momentum = momentum;
        lc.seed = seed + l;
        cfgs.push_back(lc);
    }
    auto [model, reports] = train_stack(pixels, cfgs);
    save_model(out_dir / "model.ssae", model, cfgs);
    for (std::size_t l = 0; l < reports.size(); ++l)
        write_training_log(out_dir / ("train_layer" + std::to_string(l + 1) + ".csv"),
                           reports[l]);
    std::cout << "trained " << model.layers.size() << " layers, final loss "
              << format_double("%.6g", reports.back().loss_total.back()) << '\n';
    return 0;
}

int encode_command(const fs::path& model_path, const fs::path& pixels_path,
                   const fs::path& out_file) {
    const StackedModel model = load_model(model_path);
    const Matrix pixels = read_matrix_file(pixels_path);
    write_matrix_file(out_file, encode_matrix(model, pixels));
    std::cout << "encoded " << pixels.rows << " profiles\n";
    return 0;
}

int cluster_command(const fs::path& features_path, const fs::path& out_dir,
                    const std::vector<std::string>& methods,
                    const std::vector<std::string>& metrics, double minkowski_p,
                    bool strict_geometry, const fs::path& manifest_path,
                    const std::string& name) {
    fs::create_directories(out_dir);
    const Matrix features = read_matrix_file(features_path);
    SelectOptions opts;
    opts.dataset_name = name;
    opts.strict_geometry = strict_geometry;
    const ClusterRun run =
        select_best(features, parse_methods(methods), parse_metrics(metrics, minkowski_p), opts);
    write_grid_csv(out_dir / "grid.csv", run);
    const std::vector<std::string> labels = manifest_path.empty()
                                                ? index_labels(features.rows)
                                                : ok_labels(manifest_path);
    export_dendrogram(run.tree, labels, out_dir / "tree.csv", out_dir / "tree.nwk");
    write_seeds_csv(out_dir / "seeds.csv", run.seeds, labels);
    std::cout << "selected " << method_name(run.chosen_method) << '/'
              << metric_name(run.chosen_metric.id) << " cophenet "
              << format_double("%.4f", run.chosen_cophenet) << '\n';
    return 0;
}

int report_command(const fs::path& dir, const std::string& name, double clip_lo, double clip_hi,
                   double minkowski_p) {
    const Matrix features = read_matrix_file(dir / "features.bin");
    const GridChoice choice = choice_from_grid(dir / "grid.csv", minkowski_p);
    const LinkageTree tree = read_tree_csv(dir / "tree.csv");
    if (tree.n_leaves != features.rows)
        throw SizeMismatch("tree and features disagree on n");
    std::size_t seed_count = extract_seeds(tree).size();

    const DistanceMatrix dist = pairwise_distance(features, choice.metric);
    const auto order = leaf_order(tree);
    write_pgm(dir / "matrix.pgm", render_distance_matrix(dist, order, clip_lo, clip_hi));
    write_summary_csv(dir / "summary.csv", name, features.rows, choice.method, choice.metric,
                      choice.cophenet, tree.merges.size(), seed_count);
    std::cout << "report written to " << (dir / "summary.csv").string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"unsupervised clustering of binary shape profiles"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "execute the full pipeline from a JSON config");
    std::string run_config;
    std::uint64_t run_seed = 0;
    run->add_option("--config", run_config, "experiment config file")->required();
    auto* seed_opt = run->add_option("--seed", run_seed, "override the config seed");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "normalize a directory of .png profiles");
    std::string in_dir, out_dir = "out", ds_name = "experiment";
    double threshold = 0.5;
    bool rebinarize = false;
    ingest->add_option("--input", in_dir, "directory of .png files")->required();
    ingest->add_option("--out", out_dir, "output directory");
    ingest->add_option("--name", ds_name, "dataset label");
    ingest->add_option("--threshold", threshold, "ink threshold in (0,1)");
    ingest->add_flag("--rebinarize", rebinarize, "snap resampled coverage back to {0,1}");

    // train
    auto* train = app.add_subcommand("train", "train the stacked autoencoder on pixels.bin");
    std::string pixels_file, train_out = "out";
    std::vector<std::size_t> hidden{625, 400, 256};
    double beta = 4.0, lambda = 0.004, rho = 0.15, lr = 0.001, momentum = 0.9;
    std::size_t epochs = 500;
    std::uint64_t train_seed = 1;
    train->add_option("--pixels", pixels_file, "pixel matrix file")->required();
    train->add_option("--out", train_out, "output directory");
    train->add_option("--hidden", hidden, "hidden units per layer")->delimiter(',');
    train->add_option("--beta", beta, "sparsity weight");
    train->add_option("--lambda", lambda, "weight decay");
    train->add_option("--rho", rho, "target mean activation");
    train->add_option("--epochs", epochs, "training epochs per layer");
    train->add_option("--learning-rate", lr, "gradient step size");
    train->add_option("--momentum", momentum, "momentum in [0,1)");
    train->add_option("--seed", train_seed, "weight init seed");

    // encode
    auto* encode = app.add_subcommand("encode", "project pixels through a trained model");
    std::string model_file, enc_pixels, enc_out = "features.bin";
    encode->add_option("--model", model_file, "model.ssae file")->required();
    encode->add_option("--pixels", enc_pixels, "pixel matrix file")->required();
    encode->add_option("--out", enc_out, "features output file");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "grid-search linkage over a features file");
    std::string features_file, cluster_out = "out", manifest_file, cluster_name = "experiment";
    std::vector<std::string> method_names{"single", "complete", "average", "weighted",
                                          "centroid", "median", "ward"};
    std::vector<std::string> metric_names{"euclidean", "squaredeuclidean", "seuclidean",
                                          "cityblock", "minkowski", "chebychev", "cosine"};
    double minkowski_p = 2.0;
    bool strict_geometry = false;
    cluster->add_option("--features", features_file, "features file")->required();
    cluster->add_option("--out", cluster_out, "output directory");
    cluster->add_option("--methods", method_names, "linkage methods")->delimiter(',');
    cluster->add_option("--metrics", metric_names, "distance metrics")->delimiter(',');
    cluster->add_option("--minkowski-p", minkowski_p, "minkowski exponent");
    cluster->add_flag("--strict-geometry", strict_geometry,
                      "skip centroid/median/ward on non-euclidean metrics");
    cluster->add_option("--manifest", manifest_file, "manifest.csv for leaf labels");
    cluster->add_option("--name", cluster_name, "dataset label");

    // report
    auto* report = app.add_subcommand("report", "matrix image + summary from run artifacts");
    std::string report_dir;
    std::string report_name = "experiment";
    double clip_lo = 3.0, clip_hi = 97.0;
    double report_minkowski_p = 2.0;
    report->add_option("--dir", report_dir, "run directory with prior artifacts")->required();
    report->add_option("--name", report_name, "dataset label");
    report->add_option("--clip-lo", clip_lo, "low clip percentile");
    report->add_option("--clip-hi", clip_hi, "high clip percentile");
    report->add_option("--minkowski-p", report_minkowski_p, "minkowski exponent");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return run_command(run_config, seed_opt->count() > 0, run_seed);
        if (ingest->parsed())
            return ingest_command(in_dir, out_dir, ds_name, threshold, rebinarize);
        if (train->parsed())
            return train_command(pixels_file, train_out, hidden, beta, lambda, rho, epochs, lr,
                                 momentum, train_seed);
        if (encode->parsed()) return encode_command(model_file, enc_pixels, enc_out);
        if (cluster->parsed())
            return cluster_command(features_file, cluster_out, method_names, metric_names,
                                   minkowski_p, strict_geometry, manifest_file, cluster_name);
        if (report->parsed())
            return report_command(report_dir, report_name, clip_lo, clip_hi, report_minkowski_p);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
