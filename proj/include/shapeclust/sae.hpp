#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shapeclust/common.hpp"
#include "shapeclust/transfer.hpp"

namespace shapeclust {

namespace detail {

// Fixed-order reduction: four interleaved partial sums combined in a fixed
// sequence, so a given input order always yields the same bits.
inline double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

inline void axpy(double c, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

} // namespace detail

/// One autoencoder layer. The decoder weight matrix is the transpose of
/// `weights` and is never stored separately.
struct SAELayer {
    std::size_t hidden = 0; // rows of W
    std::size_t input = 0;  // columns of W
    std::vector<double> weights;     // hidden x input, row-major
    std::vector<double> encode_bias; // hidden
    std::vector<double> decode_bias; // input
    TransferKind encoder_transfer = TransferKind::Logsig;
    TransferKind decoder_transfer = TransferKind::Logsig;

    std::span<const double> weight_row(std::size_t i) const {
        return {weights.data() + i * input, input};
    }
    std::span<double> weight_row(std::size_t i) {
        return {weights.data() + i * input, input};
    }
};

struct LayerConfig {
    std::size_t hidden_units = 0;
    double beta = 4.0;
    double lambda = 0.004;
    double rho = 0.15;
    std::size_t max_epochs = 500;
    double learning_rate = 0.1;
    double momentum = 0.9;
    std::uint64_t seed = 0;
    TransferKind encoder_transfer = TransferKind::Logsig;
    TransferKind decoder_transfer = TransferKind::Logsig;
};

struct TrainReport {
    std::vector<double> loss_total;
    std::vector<double> loss_mse;
    std::vector<double> loss_sparsity;
    std::vector<double> loss_weights;
    std::vector<double> final_mean_activation;
};

inline std::vector<double> encode_preactivation(const SAELayer& layer, std::span<const double> u) {
    if (u.size() != layer.input)
        throw DimensionMismatch("encode: got " + std::to_string(u.size()) + " inputs, expected " +
                                std::to_string(layer.input));
    std::vector<double> z(layer.hidden);
    for (std::size_t i = 0; i < layer.hidden; ++i)
        z[i] = detail::dot(layer.weight_row(i), u) + layer.encode_bias[i];
    return z;
}

/// v = f(W u + b_e)
inline std::vector<double> encode_layer(const SAELayer& layer, std::span<const double> u) {
    auto z = encode_preactivation(layer, u);
    for (auto& v : z) v = transfer_scalar(layer.encoder_transfer, v);
    return z;
}

inline std::vector<double> decode_preactivation(const SAELayer& layer, std::span<const double> v) {
    if (v.size() != layer.hidden)
        throw DimensionMismatch("decode: got " + std::to_string(v.size()) + " inputs, expected " +
                                std::to_string(layer.hidden));
    std::vector<double> z(layer.decode_bias.begin(), layer.decode_bias.end());
    for (std::size_t i = 0; i < layer.hidden; ++i)
        detail::axpy(v[i], layer.weight_row(i), z); // z += v_i * W row i, i.e. W^T v
    return z;
}

/// u_hat = g(W^T v + b_d)
inline std::vector<double> decode_layer(const SAELayer& layer, std::span<const double> v) {
    auto z = decode_preactivation(layer, v);
    for (auto& x : z) x = transfer_scalar(layer.decoder_transfer, x);
    return z;
}

/// rho_hat: mean encoder activation per hidden unit over the batch.
inline std::vector<double> average_activation(const SAELayer& layer, const Matrix& data) {
    if (data.rows == 0) throw EmptyData("average_activation: no samples");
    std::vector<double> mean(layer.hidden, 0.0);
    for (std::size_t n = 0; n < data.rows; ++n) {
        const auto a = encode_layer(layer, data.row(n));
        for (std::size_t i = 0; i < layer.hidden; ++i) mean[i] += a[i];
    }
    const double inv = 1.0 / static_cast<double>(data.rows);
    for (auto& v : mean) v *= inv;
    return mean;
}

/// Kullback-Leibler sparsity penalty, summed over hidden units.
inline double loss_sparsity(double rho, std::span<const double> rho_hat) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("loss_sparsity: rho must lie in (0,1)");
    double s = 0.0;
    for (double r : rho_hat) {
        if (!(r > 0.0 && r < 1.0))
            throw DomainError("loss_sparsity: rho_hat component outside (0,1)");
        s += rho * std::log(rho / r) + (1.0 - rho) * std::log((1.0 - rho) / (1.0 - r));
    }
    return s;
}

/// Sum of squared weight entries of the layer in training scope.
inline double loss_weights(const SAELayer& layer) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    const auto& w = layer.weights;
    std::size_t i = 0;
    for (; i + 4 <= w.size(); i += 4) {
        s0 += w[i] * w[i];
        s1 += w[i + 1] * w[i + 1];
        s2 += w[i + 2] * w[i + 2];
        s3 += w[i + 3] * w[i + 3];
    }
    for (; i < w.size(); ++i) s0 += w[i] * w[i];
    return (s0 + s1) + (s2 + s3);
}

/// Mean squared reconstruction error, normalized by N*k.
inline double loss_mse(const Matrix& data, const Matrix& reconstructions) {
    if (data.rows != reconstructions.rows || data.cols != reconstructions.cols)
        throw DimensionMismatch("loss_mse: shape mismatch");
    if (data.rows == 0) throw EmptyData("loss_mse: no samples");
    double s = 0.0;
    for (std::size_t i = 0; i < data.values.size(); ++i) {
        const double d = data.values[i] - reconstructions.values[i];
        s += d * d;
    }
    return s / (static_cast<double>(data.rows) * static_cast<double>(data.cols));
}

inline double loss_total(double beta, double lambda, double sparsity, double weights, double mse) {
    return beta * sparsity + lambda * weights + mse;
}

inline double loss_total(const LayerConfig& cfg, double sparsity, double weights, double mse) {
    return loss_total(cfg.beta, cfg.lambda, sparsity, weights, mse);
}

struct LayerGradients {
    std::vector<double> weights;     // same shape as SAELayer::weights
    std::vector<double> encode_bias;
    std::vector<double> decode_bias;
};

struct LayerEvaluation {
    LayerGradients gradients;
    double total = 0.0;
    double mse = 0.0;
    double sparsity = 0.0;
    double weight_penalty = 0.0;
    std::vector<double> rho_hat;
};

/// Loss and exact gradient of the composite objective in one pass over the
/// batch. Gradients accumulate sample-by-sample in row order (the ordered
/// reduction the reproducibility contract relies on). The sparsity term
/// evaluates to +inf when rho_hat leaves (0,1), which train_layer reports as
/// divergence; with beta == 0 the term is not evaluated at all.
inline LayerEvaluation evaluate_layer(const SAELayer& layer, const LayerConfig& cfg,
                                      const Matrix& data) {
    const std::size_t N = data.rows;
    const std::size_t kin = layer.input;
    const std::size_t kh = layer.hidden;
    if (N == 0) throw EmptyData("evaluate_layer: no samples");
    if (data.cols != kin) throw DimensionMismatch("evaluate_layer: data width != layer input");

    LayerEvaluation ev;
    ev.gradients.weights.assign(kh * kin, 0.0);
    ev.gradients.encode_bias.assign(kh, 0.0);
    ev.gradients.decode_bias.assign(kin, 0.0);
    ev.rho_hat.assign(kh, 0.0);

    Matrix acts(N, kh);  // a_n
    Matrix back(N, kh);  // W . delta2_n, the decoder-to-encoder backprop term
    std::vector<double> z2(kin), delta2(kin);
    const double mse_scale = 2.0 / (static_cast<double>(N) * static_cast<double>(kin));
    double sq_sum = 0.0;

    for (std::size_t n = 0; n < N; ++n) {
        const auto u = data.row(n);
        auto a = acts.row(n);
        for (std::size_t i = 0; i < kh; ++i)
            a[i] = transfer_scalar(layer.encoder_transfer,
                                   detail::dot(layer.weight_row(i), u) + layer.encode_bias[i]);

        std::copy(layer.decode_bias.begin(), layer.decode_bias.end(), z2.begin());
        for (std::size_t i = 0; i < kh; ++i) detail::axpy(a[i], layer.weight_row(i), z2);

        for (std::size_t j = 0; j < kin; ++j) {
            const double uh = transfer_scalar(layer.decoder_transfer, z2[j]);
            const double diff = uh - u[j];
            sq_sum += diff * diff;
            delta2[j] = mse_scale * diff *
                        transfer_derivative_from_activation(layer.decoder_transfer, uh);
            ev.gradients.decode_bias[j] += delta2[j];
        }

        auto ha = back.row(n);
        for (std::size_t i = 0; i < kh; ++i) {
            const auto wrow = layer.weight_row(i);
            detail::axpy(a[i], delta2, {ev.gradients.weights.data() + i * kin, kin});
            ha[i] = detail::dot(wrow, delta2);
            ev.rho_hat[i] += a[i];
        }
    }

    const double invN = 1.0 / static_cast<double>(N);
    for (auto& r : ev.rho_hat) r *= invN;
    ev.mse = sq_sum / (static_cast<double>(N) * static_cast<double>(kin));
    ev.weight_penalty = loss_weights(layer);

    std::vector<double> kl_grad(kh, 0.0);
    if (cfg.beta != 0.0) {
        ev.sparsity = 0.0;
        for (std::size_t i = 0; i < kh; ++i) {
            const double r = ev.rho_hat[i];
            if (!(r > 0.0 && r < 1.0)) {
                ev.sparsity = std::numeric_limits<double>::infinity();
                break;
            }
            ev.sparsity += cfg.rho * std::log(cfg.rho / r) +
                           (1.0 - cfg.rho) * std::log((1.0 - cfg.rho) / (1.0 - r));
            kl_grad[i] = cfg.beta * invN * (-cfg.rho / r + (1.0 - cfg.rho) / (1.0 - r));
        }
    }
    ev.total = loss_total(cfg.beta, cfg.lambda, ev.sparsity, ev.weight_penalty, ev.mse);

    if (std::isfinite(ev.total)) {
        for (std::size_t n = 0; n < N; ++n) {
            const auto u = data.row(n);
            const auto a = acts.row(n);
            const auto ha = back.row(n);
            for (std::size_t i = 0; i < kh; ++i) {
                const double delta1 =
                    (ha[i] + kl_grad[i]) *
                    transfer_derivative_from_activation(layer.encoder_transfer, a[i]);
                if (delta1 != 0.0)
                    detail::axpy(delta1, u, {ev.gradients.weights.data() + i * kin, kin});
                ev.gradients.encode_bias[i] += delta1;
            }
        }
        const double two_lambda = 2.0 * cfg.lambda;
        for (std::size_t i = 0; i < ev.gradients.weights.size(); ++i)
            ev.gradients.weights[i] += two_lambda * layer.weights[i];
    }
    return ev;
}

/// Analytic gradients of loss_total w.r.t. W, b_e, b_d; W collects both the
/// encoder and the tied transposed decoder contributions plus the decay term.
inline LayerGradients layer_gradients(const SAELayer& layer, const LayerConfig& cfg,
                                      const Matrix& batch) {
    return evaluate_layer(layer, cfg, batch).gradients;
}

inline SAELayer init_layer(std::size_t input_dim, const LayerConfig& cfg) {
    if (cfg.hidden_units == 0 || cfg.hidden_units >= input_dim)
        throw ConfigError("layer needs 0 < hidden units < input dim, got " +
                          std::to_string(cfg.hidden_units) + " for input " +
                          std::to_string(input_dim));
    SAELayer layer;
    layer.hidden = cfg.hidden_units;
    layer.input = input_dim;
    layer.encoder_transfer = cfg.encoder_transfer;
    layer.decoder_transfer = cfg.decoder_transfer;
    layer.weights.resize(layer.hidden * layer.input);
    layer.encode_bias.assign(layer.hidden, 0.0);
    layer.decode_bias.assign(layer.input, 0.0);
    std::mt19937_64 rng(cfg.seed);
    const double r = std::sqrt(6.0 / static_cast<double>(input_dim + cfg.hidden_units));
    for (auto& w : layer.weights) w = uniform_range(rng, -r, r);
    return layer;
}

/// Full-batch gradient descent with momentum, deterministic under the seed.
inline std::pair<SAELayer, TrainReport> train_layer(const Matrix& data, const LayerConfig& cfg) {
    if (data.rows < 2) throw EmptyData("train_layer: need at least 2 samples");
    SAELayer layer = init_layer(data.cols, cfg);

    std::vector<double> vel_w(layer.weights.size(), 0.0);
    std::vector<double> vel_be(layer.hidden, 0.0);
    std::vector<double> vel_bd(layer.input, 0.0);

    TrainReport report;
    report.loss_total.reserve(cfg.max_epochs);
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        LayerEvaluation ev = evaluate_layer(layer, cfg, data);
        if (!std::isfinite(ev.total))
            throw DivergenceError("loss became non-finite at epoch " + std::to_string(epoch));
        report.loss_total.push_back(ev.total);
        report.loss_mse.push_back(ev.mse);
        report.loss_sparsity.push_back(ev.sparsity);
        report.loss_weights.push_back(ev.weight_penalty);

        auto step = [&](std::vector<double>& param, std::vector<double>& vel,
                        const std::vector<double>& grad) {
            for (std::size_t i = 0; i < param.size(); ++i) {
                vel[i] = cfg.momentum * vel[i] - cfg.learning_rate * grad[i];
                param[i] += vel[i];
            }
        };
        step(layer.weights, vel_w, ev.gradients.weights);
        step(layer.encode_bias, vel_be, ev.gradients.encode_bias);
        step(layer.decode_bias, vel_bd, ev.gradients.decode_bias);
    }
    for (double w : layer.weights)
        if (!std::isfinite(w)) throw DivergenceError("non-finite weight after training");
    report.final_mean_activation = average_activation(layer, data);
    return {std::move(layer), std::move(report)};
}

} // namespace shapeclust
