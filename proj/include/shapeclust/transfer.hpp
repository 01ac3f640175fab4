#pragma once

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "shapeclust/common.hpp"

namespace shapeclust {

enum class TransferKind { Logsig, Satlin, Purelin };

inline double transfer_scalar(TransferKind kind, double z) {
    switch (kind) {
    case TransferKind::Logsig:
        return 1.0 / (1.0 + std::exp(-z));
    case TransferKind::Satlin:
        return z <= 0.0 ? 0.0 : (z >= 1.0 ? 1.0 : z);
    case TransferKind::Purelin:
        return z;
    }
    return z;
}

// Satlin's derivative at the kinks z = 0 and z = 1 is taken as 0.
inline double transfer_derivative_scalar(TransferKind kind, double z) {
    switch (kind) {
    case TransferKind::Logsig: {
        const double s = 1.0 / (1.0 + std::exp(-z));
        return s * (1.0 - s);
    }
    case TransferKind::Satlin:
        return z > 0.0 && z < 1.0 ? 1.0 : 0.0;
    case TransferKind::Purelin:
        return 1.0;
    }
    return 1.0;
}

/// Derivative expressed through the activation value a = h(z); valid for all
/// three kinds and what the backward pass uses.
inline double transfer_derivative_from_activation(TransferKind kind, double a) {
    switch (kind) {
    case TransferKind::Logsig:
        return a * (1.0 - a);
    case TransferKind::Satlin:
        return a > 0.0 && a < 1.0 ? 1.0 : 0.0;
    case TransferKind::Purelin:
        return 1.0;
    }
    return 1.0;
}

inline std::vector<double> transfer_apply(TransferKind kind, std::span<const double> z) {
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = transfer_scalar(kind, z[i]);
    return out;
}

inline std::vector<double> transfer_derivative(TransferKind kind, std::span<const double> z) {
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = transfer_derivative_scalar(kind, z[i]);
    return out;
}

inline const char* transfer_name(TransferKind kind) {
    switch (kind) {
    case TransferKind::Logsig: return "logsig";
    case TransferKind::Satlin: return "satlin";
    case TransferKind::Purelin: return "purelin";
    }
    return "logsig";
}

inline TransferKind transfer_from_name(std::string_view name) {
    if (name == "logsig") return TransferKind::Logsig;
    if (name == "satlin") return TransferKind::Satlin;
    if (name == "purelin") return TransferKind::Purelin;
    throw ConfigError("unknown transfer function: " + std::string(name));
}

} // namespace shapeclust
