#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "shapeclust/common.hpp"
#include "shapeclust/sae.hpp"

namespace shapeclust {

/// Greedy layer-wise stack; layer l trains on layer l-1 encodings.
struct StackedModel {
    std::size_t input_dim = 0;
    std::vector<SAELayer> layers;
};

inline Matrix encode_matrix(const SAELayer& layer, const Matrix& data) {
    Matrix out(data.rows, layer.hidden);
    for (std::size_t n = 0; n < data.rows; ++n) {
        const auto v = encode_layer(layer, data.row(n));
        std::copy(v.begin(), v.end(), out.row(n).begin());
    }
    return out;
}

inline std::pair<StackedModel, std::vector<TrainReport>> train_stack(
    const Matrix& data, std::span<const LayerConfig> configs) {
    if (configs.empty()) throw ConfigError("train_stack: no layer configs");
    std::size_t prev = data.cols;
    for (const auto& cfg : configs) {
        if (cfg.hidden_units == 0 || cfg.hidden_units >= prev)
            throw ConfigError("train_stack: hidden units must be strictly decreasing, got " +
                              std::to_string(cfg.hidden_units) + " after " + std::to_string(prev));
        prev = cfg.hidden_units;
    }

    StackedModel model;
    model.input_dim = data.cols;
    std::vector<TrainReport> reports;
    Matrix current;
    for (std::size_t l = 0; l < configs.size(); ++l) {
        const Matrix& in = l == 0 ? data : current;
        auto [layer, report] = train_layer(in, configs[l]);
        current = encode_matrix(layer, in);
        model.layers.push_back(std::move(layer));
        reports.push_back(std::move(report));
    }
    return {std::move(model), std::move(reports)};
}

/// Latent signature: composition of all encoder maps.
inline std::vector<double> encode(const StackedModel& model, std::span<const double> u) {
    if (u.size() != model.input_dim)
        throw DimensionMismatch("encode: input dim " + std::to_string(u.size()) + " != " +
                                std::to_string(model.input_dim));
    std::vector<double> v(u.begin(), u.end());
    for (const auto& layer : model.layers) v = encode_layer(layer, v);
    return v;
}

inline Matrix encode_matrix(const StackedModel& model, const Matrix& data) {
    if (data.cols != model.input_dim)
        throw DimensionMismatch("encode_matrix: data width != model input dim");
    const std::size_t k_latent = model.layers.empty() ? model.input_dim
                                                      : model.layers.back().hidden;
    Matrix out(data.rows, k_latent);
    for (std::size_t n = 0; n < data.rows; ++n) {
        const auto v = encode(model, data.row(n));
        std::copy(v.begin(), v.end(), out.row(n).begin());
    }
    return out;
}

/// Encode through every layer, then decode back in reverse order.
inline std::vector<double> reconstruct(const StackedModel& model, std::span<const double> u) {
    auto v = encode(model, u);
    for (auto it = model.layers.rbegin(); it != model.layers.rend(); ++it)
        v = decode_layer(*it, v);
    return v;
}

struct ReconstructionStats {
    std::vector<double> per_sample_mse;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

inline ReconstructionStats reconstruction_stats(const StackedModel& model, const Matrix& data) {
    if (data.rows == 0) throw EmptyData("reconstruction_stats: no samples");
    ReconstructionStats stats;
    stats.per_sample_mse.reserve(data.rows);
    for (std::size_t n = 0; n < data.rows; ++n) {
        const auto u = data.row(n);
        const auto uh = reconstruct(model, u);
        double s = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            const double d = u[j] - uh[j];
            s += d * d;
        }
        stats.per_sample_mse.push_back(s / static_cast<double>(u.size()));
    }
    std::vector<double> sorted = stats.per_sample_mse;
    std::sort(sorted.begin(), sorted.end());
    stats.min = sorted.front();
    stats.q1 = quantile_sorted(sorted, 0.25);
    stats.median = quantile_sorted(sorted, 0.50);
    stats.q3 = quantile_sorted(sorted, 0.75);
    stats.max = sorted.back();
    double sum = 0.0;
    for (double v : sorted) sum += v;
    stats.mean = sum / static_cast<double>(sorted.size());
    return stats;
}

// Model file ("ssae-v1"): a text header with layer count, per-layer dims,
// transfer kinds and the training config, then a "binary" marker line and the
// raw W / b_e / b_d arrays per layer as float64 little-endian, row-major.

inline void save_model(const std::filesystem::path& path, const StackedModel& model,
                       std::span<const LayerConfig> configs = {}) {
    if (!configs.empty() && configs.size() != model.layers.size())
        throw SizeMismatch("save_model: config count != layer count");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "ssae-v1\n";
    os << "input_dim " << model.input_dim << '\n';
    os << "layers " << model.layers.size() << '\n';
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& layer = model.layers[l];
        os << "layer " << layer.hidden << ' ' << layer.input << ' '
           << transfer_name(layer.encoder_transfer) << ' '
           << transfer_name(layer.decoder_transfer);
        if (!configs.empty()) {
            const auto& c = configs[l];
            os << " beta " << format_double("%.17g", c.beta) << " lambda "
               << format_double("%.17g", c.lambda) << " rho " << format_double("%.17g", c.rho)
               << " epochs " << c.max_epochs << " learning_rate "
               << format_double("%.17g", c.learning_rate) << " momentum "
               << format_double("%.17g", c.momentum) << " seed " << c.seed;
        }
        os << '\n';
    }
    os << "binary\n";
    for (const auto& layer : model.layers) {
        detail::write_f64le(os, layer.weights);
        detail::write_f64le(os, layer.encode_bias);
        detail::write_f64le(os, layer.decode_bias);
    }
    if (!os) throw IoError("short write to " + path.string());
}

inline StackedModel load_model(const std::filesystem::path& path,
                               std::vector<LayerConfig>* configs_out = nullptr) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line) || line != "ssae-v1")
        throw DecodeError("bad model magic in " + path.string());

    StackedModel model;
    std::size_t n_layers = 0;
    std::vector<LayerConfig> configs;
    {
        std::string key;
        if (!std::getline(is, line)) throw DecodeError("truncated model header");
        std::istringstream ls(line);
        ls >> key >> model.input_dim;
        if (key != "input_dim" || ls.fail()) throw DecodeError("bad input_dim line");
        if (!std::getline(is, line)) throw DecodeError("truncated model header");
        std::istringstream ls2(line);
        ls2 >> key >> n_layers;
        if (key != "layers" || ls2.fail()) throw DecodeError("bad layers line");
    }
    std::size_t prev = model.input_dim;
    for (std::size_t l = 0; l < n_layers; ++l) {
        if (!std::getline(is, line)) throw DecodeError("truncated layer header");
        std::istringstream ls(line);
        std::string key, enc, dec;
        SAELayer layer;
        ls >> key >> layer.hidden >> layer.input >> enc >> dec;
        if (key != "layer" || ls.fail()) throw DecodeError("bad layer line: " + line);
        if (layer.input != prev) throw DecodeError("layer dims do not chain");
        layer.encoder_transfer = transfer_from_name(enc);
        layer.decoder_transfer = transfer_from_name(dec);
        LayerConfig cfg;
        cfg.hidden_units = layer.hidden;
        cfg.encoder_transfer = layer.encoder_transfer;
        cfg.decoder_transfer = layer.decoder_transfer;
        std::string field;
        while (ls >> field) {
            if (field == "beta") ls >> cfg.beta;
            else if (field == "lambda") ls >> cfg.lambda;
            else if (field == "rho") ls >> cfg.rho;
            else if (field == "epochs") ls >> cfg.max_epochs;
            else if (field == "learning_rate") ls >> cfg.learning_rate;
            else if (field == "momentum") ls >> cfg.momentum;
            else if (field == "seed") ls >> cfg.seed;
            else throw DecodeError("unknown layer field: " + field);
        }
        configs.push_back(cfg);
        prev = layer.hidden;
        model.layers.push_back(std::move(layer));
    }
    if (!std::getline(is, line) || line != "binary")
        throw DecodeError("missing binary marker in " + path.string());
    for (auto& layer : model.layers) {
        layer.weights.resize(layer.hidden * layer.input);
        layer.encode_bias.resize(layer.hidden);
        layer.decode_bias.resize(layer.input);
        detail::read_f64le(is, layer.weights);
        detail::read_f64le(is, layer.encode_bias);
        detail::read_f64le(is, layer.decode_bias);
    }
    if (configs_out) *configs_out = std::move(configs);
    return model;
}

/// Per-epoch loss trajectory CSV for one layer.
inline void write_training_log(const std::filesystem::path& path, const TrainReport& report) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "epoch,loss_total,loss_mse,loss_sparsity,loss_weights\n";
    for (std::size_t e = 0; e < report.loss_total.size(); ++e)
        os << (e + 1) << ',' << format_double("%.9g", report.loss_total[e]) << ','
           << format_double("%.9g", report.loss_mse[e]) << ','
           << format_double("%.9g", report.loss_sparsity[e]) << ','
           << format_double("%.9g", report.loss_weights[e]) << '\n';
}

} // namespace shapeclust
