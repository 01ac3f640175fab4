#include <doctest.h>

#include <vector>

#include "shapeclust/transfer.hpp"

using namespace shapeclust;

TEST_CASE("logsig is the logistic sigmoid") {
    CHECK(transfer_scalar(TransferKind::Logsig, 0.0) == doctest::Approx(0.5));
    CHECK(transfer_scalar(TransferKind::Logsig, 100.0) == doctest::Approx(1.0));
    CHECK(transfer_scalar(TransferKind::Logsig, -100.0) == doctest::Approx(0.0));
}

TEST_CASE("satlin clamps to [0,1]") {
    const std::vector<double> z{-1.0, 0.3, 2.0};
    const auto out = transfer_apply(TransferKind::Satlin, z);
    CHECK(out == std::vector<double>{0.0, 0.3, 1.0});
}

TEST_CASE("purelin is the identity") {
    const std::vector<double> z{4.0, -4.0};
    CHECK(transfer_apply(TransferKind::Purelin, z) == z);
}

TEST_CASE("derivatives") {
    CHECK(transfer_derivative_scalar(TransferKind::Logsig, 0.0) == doctest::Approx(0.25));
    CHECK(transfer_derivative_scalar(TransferKind::Satlin, 0.5) == 1.0);
    CHECK(transfer_derivative_scalar(TransferKind::Satlin, 2.0) == 0.0);
    CHECK(transfer_derivative_scalar(TransferKind::Satlin, -0.1) == 0.0);
    // kinks use the zero subgradient
    CHECK(transfer_derivative_scalar(TransferKind::Satlin, 0.0) == 0.0);
    CHECK(transfer_derivative_scalar(TransferKind::Satlin, 1.0) == 0.0);
    CHECK(transfer_derivative_scalar(TransferKind::Purelin, 123.0) == 1.0);
}

TEST_CASE("derivative-from-activation agrees with the z form") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        const double z = uniform_range(rng, -6.0, 6.0);
        for (auto kind : {TransferKind::Logsig, TransferKind::Satlin, TransferKind::Purelin}) {
            const double a = transfer_scalar(kind, z);
            CHECK(transfer_derivative_from_activation(kind, a) ==
                  doctest::Approx(transfer_derivative_scalar(kind, z)).epsilon(1e-12));
        }
    }
}

TEST_CASE("transfer names round-trip") {
    for (auto kind : {TransferKind::Logsig, TransferKind::Satlin, TransferKind::Purelin})
        CHECK(transfer_from_name(transfer_name(kind)) == kind);
    CHECK_THROWS_AS(transfer_from_name("tanh"), ConfigError);
}
