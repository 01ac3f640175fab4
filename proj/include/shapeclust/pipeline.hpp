#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "shapeclust/cluster.hpp"
#include "shapeclust/common.hpp"
#include "shapeclust/dataset.hpp"
#include "shapeclust/dendrogram.hpp"
#include "shapeclust/png.hpp"
#include "shapeclust/render.hpp"
#include "shapeclust/stack.hpp"

namespace shapeclust {

inline std::vector<Method> all_methods() {
    return {Method::Single,   Method::Complete, Method::Average, Method::Weighted,
            Method::Centroid, Method::Median,   Method::Ward};
}

inline std::vector<Metric> all_metrics(double minkowski_p = 2.0) {
    return {MetricId::Euclidean, MetricId::SquaredEuclidean,       MetricId::SEuclidean,
            MetricId::CityBlock, Metric::minkowski(minkowski_p),   MetricId::Chebychev,
            MetricId::Cosine};
}

/// One experiment = one input directory run end to end. Defaults reproduce
/// the reference network: hidden 625/400/256, beta 4, lambda 0.004, rho 0.15,
/// 500 epochs, logsig encoder and decoder, full 7x7 method/metric grid.
struct ExperimentConfig {
    std::string name = "experiment";
    std::filesystem::path input_dir;
    std::filesystem::path output_dir = "out";
    double threshold = 0.5;
    bool rebinarize = false;
    std::vector<std::size_t> hidden_units{625, 400, 256};
    double beta = 4.0;
    double lambda = 0.004;
    double rho = 0.15;
    std::size_t epochs = 500;
    // plain descent needs a far smaller step at 16384-dim image scale than
    // the library default that suits toy dimensionalities
    double learning_rate = 0.001;
    double momentum = 0.9;
    TransferKind encoder_transfer = TransferKind::Logsig;
    TransferKind decoder_transfer = TransferKind::Logsig;
    std::uint64_t seed = 1;
    std::vector<Method> methods = all_methods();
    std::vector<Metric> metrics = all_metrics();
    double minkowski_p = 2.0;
    bool strict_geometry = false;
    double clip_lo = 3.0;
    double clip_hi = 97.0;
};

inline void validate_config(const ExperimentConfig& cfg) {
    if (cfg.name.empty()) throw ConfigError("name must not be empty");
    if (cfg.input_dir.empty()) throw ConfigError("input_dir is required");
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0))
        throw ConfigError("threshold must lie in (0,1)");
    if (cfg.hidden_units.empty()) throw ConfigError("hidden_units must not be empty");
    std::size_t prev = kPixelCount;
    for (std::size_t h : cfg.hidden_units) {
        if (h == 0 || h >= prev)
            throw ConfigError("hidden_units must be strictly decreasing and below " +
                              std::to_string(kPixelCount));
        prev = h;
    }
    if (cfg.beta < 0.0 || cfg.lambda < 0.0) throw ConfigError("beta and lambda must be >= 0");
    if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) throw ConfigError("rho must lie in (0,1)");
    if (cfg.epochs == 0) throw ConfigError("epochs must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) throw ConfigError("momentum must lie in [0,1)");
    if (!(cfg.minkowski_p >= 1.0)) throw ConfigError("minkowski_p must be >= 1");
    if (cfg.methods.empty() || cfg.metrics.empty())
        throw ConfigError("methods and metrics must not be empty");
    if (!(cfg.clip_lo >= 0.0 && cfg.clip_lo <= cfg.clip_hi && cfg.clip_hi <= 100.0))
        throw ConfigError("clip percentiles must satisfy 0 <= lo <= hi <= 100");
}

/// Strict JSON loader: unknown keys are errors so hyperparameter typos fail
/// fast instead of silently using a default.
inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    static const std::set<std::string> known = {
        "name",          "input_dir",     "output_dir",       "threshold",
        "rebinarize",    "hidden_units",  "beta",             "lambda",
        "rho",           "epochs",        "learning_rate",    "momentum",
        "encoder_transfer", "decoder_transfer", "seed",       "methods",
        "metrics",       "minkowski_p",   "strict_geometry",  "clip_lo",
        "clip_hi"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("unknown config key: " + key);

    ExperimentConfig cfg;
    try {
        if (j.contains("name")) cfg.name = j["name"].get<std::string>();
        if (j.contains("input_dir")) cfg.input_dir = j["input_dir"].get<std::string>();
        if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("threshold")) cfg.threshold = j["threshold"].get<double>();
        if (j.contains("rebinarize")) cfg.rebinarize = j["rebinarize"].get<bool>();
        if (j.contains("hidden_units"))
            cfg.hidden_units = j["hidden_units"].get<std::vector<std::size_t>>();
        if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
        if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
        if (j.contains("rho")) cfg.rho = j["rho"].get<double>();
        if (j.contains("epochs")) cfg.epochs = j["epochs"].get<std::size_t>();
        if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
        if (j.contains("momentum")) cfg.momentum = j["momentum"].get<double>();
        if (j.contains("encoder_transfer"))
            cfg.encoder_transfer = transfer_from_name(j["encoder_transfer"].get<std::string>());
        if (j.contains("decoder_transfer"))
            cfg.decoder_transfer = transfer_from_name(j["decoder_transfer"].get<std::string>());
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("minkowski_p")) cfg.minkowski_p = j["minkowski_p"].get<double>();
        if (j.contains("methods")) {
            cfg.methods.clear();
            for (const auto& m : j["methods"])
                cfg.methods.push_back(method_from_name(m.get<std::string>()));
        }
        if (j.contains("metrics")) {
            cfg.metrics.clear();
            for (const auto& m : j["metrics"])
                cfg.metrics.push_back(metric_from_name(m.get<std::string>(), cfg.minkowski_p));
        }
        if (j.contains("strict_geometry")) cfg.strict_geometry = j["strict_geometry"].get<bool>();
        if (j.contains("clip_lo")) cfg.clip_lo = j["clip_lo"].get<double>();
        if (j.contains("clip_hi")) cfg.clip_hi = j["clip_hi"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad config value in " + path.string() + ": " + e.what());
    }
    // metrics given before minkowski_p in the file still pick up the exponent
    for (auto& m : cfg.metrics)
        if (m.id == MetricId::Minkowski) m = Metric::minkowski(cfg.minkowski_p);
    validate_config(cfg);
    return cfg;
}

inline LayerConfig layer_config_for(const ExperimentConfig& cfg, std::size_t layer_index) {
    LayerConfig lc;
    lc.hidden_units = cfg.hidden_units[layer_index];
    lc.beta = cfg.beta;
    lc.lambda = cfg.lambda;
    lc.rho = cfg.rho;
    lc.max_epochs = cfg.epochs;
    lc.learning_rate = cfg.learning_rate;
    lc.momentum = cfg.momentum;
    lc.seed = cfg.seed + layer_index;
    lc.encoder_transfer = cfg.encoder_transfer;
    lc.decoder_transfer = cfg.decoder_transfer;
    return lc;
}

struct RunArtifacts {
    std::filesystem::path manifest;
    std::filesystem::path model;
    std::filesystem::path features;
    std::filesystem::path grid;
    std::filesystem::path tree;
    std::filesystem::path newick;
    std::filesystem::path seeds;
    std::filesystem::path matrix_image;
    std::filesystem::path summary;
};

inline RunArtifacts artifact_paths(const std::filesystem::path& out_dir) {
    RunArtifacts a;
    a.manifest = out_dir / "manifest.csv";
    a.model = out_dir / "model.ssae";
    a.features = out_dir / "features.bin";
    a.grid = out_dir / "grid.csv";
    a.tree = out_dir / "tree.csv";
    a.newick = out_dir / "tree.nwk";
    a.seeds = out_dir / "seeds.csv";
    a.matrix_image = out_dir / "matrix.pgm";
    a.summary = out_dir / "summary.csv";
    return a;
}

inline void write_summary_csv(const std::filesystem::path& path, const std::string& name,
                              std::size_t n, Method method, const Metric& metric, double cophenet,
                              std::size_t classes, std::size_t seed_count) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "name,n,method,metric,cophenet,classes,seeds\n";
    os << csv_field(name) << ',' << n << ',' << method_name(method) << ','
       << metric_name(metric.id) << ',' << format_double("%.4f", cophenet) << ',' << classes
       << ',' << seed_count << '\n';
}

/// Execute ingest -> train -> encode -> cluster -> report. A stage failure
/// leaves partial artifacts plus a FAILED marker naming the stage.
inline RunArtifacts run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    validate_config(cfg);
    fs::create_directories(cfg.output_dir);
    const fs::path failed_marker = cfg.output_dir / "FAILED";
    std::error_code ec;
    fs::remove(failed_marker, ec);
    const RunArtifacts art = artifact_paths(cfg.output_dir);

    const char* stage = "ingest";
    try {
        std::vector<ManifestRow> manifest;
        Dataset dataset = load_dataset(cfg.input_dir, cfg.name, cfg.threshold, &manifest,
                                       cfg.rebinarize);
        write_manifest_csv(art.manifest, manifest);
        const Matrix pixels = dataset.pixel_matrix();
        write_matrix_file(cfg.output_dir / "pixels.bin", pixels);
        if (dataset.records.size() < 2)
            throw EmptyData("fewer than 2 usable profiles after ingest");

        stage = "train";
        std::vector<LayerConfig> layer_cfgs;
        for (std::size_t l = 0; l < cfg.hidden_units.size(); ++l)
            layer_cfgs.push_back(layer_config_for(cfg, l));
        auto [model, reports] = train_stack(pixels, layer_cfgs);
        save_model(art.model, model, layer_cfgs);
        for (std::size_t l = 0; l < reports.size(); ++l)
            write_training_log(cfg.output_dir / ("train_layer" + std::to_string(l + 1) + ".csv"),
                               reports[l]);

        stage = "encode";
        const Matrix features = encode_matrix(model, pixels);
        write_matrix_file(art.features, features);

        stage = "cluster";
        SelectOptions opts;
        opts.dataset_name = cfg.name;
        opts.strict_geometry = cfg.strict_geometry;
        const ClusterRun run = select_best(features, cfg.methods, cfg.metrics, opts);
        write_grid_csv(art.grid, run);
        const std::vector<std::string> labels = dataset.filenames();
        export_dendrogram(run.tree, labels, art.tree, art.newick);
        write_seeds_csv(art.seeds, run.seeds, labels);

        stage = "report";
        const DistanceMatrix dist = pairwise_distance(features, run.chosen_metric);
        const GrayBitmap img =
            render_distance_matrix(dist, run.leaf_order, cfg.clip_lo, cfg.clip_hi);
        write_pgm(art.matrix_image, img);
        write_png_gray8(cfg.output_dir / "matrix.png", img.pixels.data(), img.width, img.height);
        write_summary_csv(art.summary, cfg.name, dataset.records.size(), run.chosen_method,
                          run.chosen_metric, run.chosen_cophenet, run.tree.merges.size(),
                          run.seeds.size());
    } catch (const std::exception& e) {
        std::ofstream marker(failed_marker);
        marker << stage << ": " << e.what() << '\n';
        throw StageError(stage, e.what());
    }

    for (const fs::path* p : {&art.manifest, &art.model, &art.features, &art.grid, &art.tree,
                              &art.newick, &art.seeds, &art.matrix_image, &art.summary})
        if (!fs::exists(*p) || fs::file_size(*p) == 0)
            throw StageError("report", "missing or empty artifact " + p->string());
    return art;
}

} // namespace shapeclust
