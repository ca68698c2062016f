// SPDX-License-Identifier: Apache-2.0
//
// otfs-rc: delay-Doppler link simulation and reservoir-computing detectors
// Copyright (C) 2026 The otfs-rc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "catch_amalgamated.hpp"

#include "otfs/equalizers.hpp"

#include <random>

using namespace otfs;

namespace
{
ComplexMatrix randn(Eigen::Index r, Eigen::Index c, std::mt19937_64 &rng, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    ComplexMatrix A(r, c);
    for (Eigen::Index i = 0; i < A.size(); ++i)
        A(i) = cd(g(rng), g(rng));
    return A;
}

OtfsConfig make_cfg(int M, int N, Variant v = Variant::RCP)
{
    OtfsConfig c;
    c.M = M;
    c.N = N;
    c.n_cp = 4;
    c.variant = v;
    return c;
}

std::vector<IntegerTap> random_taps(int count, std::mt19937_64 &rng)
{
    std::uniform_int_distribution<int> dl(0, 3), dk(-2, 2);
    std::normal_distribution<double> g;
    std::vector<IntegerTap> taps;
    for (int i = 0; i < count; ++i)
        taps.push_back({cd(g(rng), g(rng)), dl(rng), dk(rng)});
    return taps;
}
} // namespace

TEST_CASE("flattened channel matrix reproduces apply_dd", "[equalizers]")
{
    std::mt19937_64 rng(61);
    for (Variant v : {Variant::RCP, Variant::CP})
    {
        const auto cfg = make_cfg(8, 4, v);
        const auto chan = random_channel(ChannelSpec{3, 3.0, 1.5}, rng);
        const auto H = effective_channel(chan, cfg);
        const ComplexMatrix X = randn(8, 4, rng);
        CHECK((vec_inv(dd_channel_matrix(H) * vec(X), 8, 4) - apply_dd(X, H)).norm() < 1e-12 * X.norm());
    }
}

TEST_CASE("LMMSE equalization", "[equalizers]")
{
    std::mt19937_64 rng(62);
    const auto cfg = make_cfg(16, 8);

    SECTION("identity channel returns the input")
    {
        const auto H = integer_kernel_rcp({IntegerTap{}}, 16, 8);
        const ComplexMatrix Y = randn(16, 8, rng);
        CHECK((lmmse_dd(Y, H, 0.0) - Y).norm() < 1e-10 * Y.norm());
    }
    SECTION("noiseless invertible channels are reconstructed")
    {
        int tested = 0;
        for (int t = 0; t < 10; ++t)
        {
            const auto H = integer_kernel_rcp(random_taps(3, rng), 16, 8);
            const ComplexMatrix G = dd_channel_matrix(H);
            Eigen::JacobiSVD<ComplexMatrix> svd(G);
            const double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
            if (cond > 1e3)
                continue;
            ++tested;
            const ComplexMatrix X = randn(16, 8, rng);
            const ComplexMatrix Y = apply_dd(X, H);
            CHECK((lmmse_dd(Y, H, 0.0, LmmseSolver::Dense) - X).norm() / X.norm() < 1e-8);
            CHECK((lmmse_dd(Y, H, 0.0, LmmseSolver::Sparse) - X).norm() / X.norm() < 1e-8);
        }
        CHECK(tested > 0);
    }
    SECTION("dense and sparse paths agree")
    {
        const auto chan = random_channel(ChannelSpec{3, 2.0, 0.5}, rng);
        const auto H = effective_channel(chan, cfg);
        const ComplexMatrix Y = randn(16, 8, rng);
        CHECK((lmmse_dd(Y, H, 0.1, LmmseSolver::Dense) - lmmse_dd(Y, H, 0.1, LmmseSolver::Sparse)).norm() <
              1e-10 * Y.norm());
    }
    SECTION("normal equations hold")
    {
        const auto H = effective_channel(random_channel(ChannelSpec{3, 2.0, 0.5}, rng), cfg);
        const ComplexMatrix Y = randn(16, 8, rng);
        const ComplexMatrix G = dd_channel_matrix(H);
        const ComplexVector x = vec(lmmse_dd(Y, H, 0.05));
        const ComplexVector rhs = G.adjoint() * vec(Y);
        const ComplexVector lhs = G.adjoint() * G * x + 0.05 * x;
        CHECK((lhs - rhs).norm() / rhs.norm() < 1e-8);
    }
    SECTION("very large noise shrinks to zero")
    {
        const auto H = integer_kernel_rcp(random_taps(2, rng), 16, 8);
        const ComplexMatrix Y = randn(16, 8, rng);
        CHECK(lmmse_dd(Y, H, 1e12).norm() < 1e-8 * Y.norm());
    }
    SECTION("shape errors")
    {
        const auto H = integer_kernel_rcp({IntegerTap{}}, 16, 8);
        CHECK_THROWS_AS(lmmse_dd(ComplexMatrix::Zero(8, 8), H, 0.1), std::invalid_argument);
    }
}

TEST_CASE("LMMSE beats zero forcing on average", "[equalizers]")
{
    std::mt19937_64 rng(63);
    const int M = 8, N = 4;
    const double s2 = 0.1;
    double mse_l = 0.0, mse_zf = 0.0;
    for (int t = 0; t < 50; ++t)
    {
        const auto H = integer_kernel_rcp(random_taps(3, rng), M, N);
        const ComplexMatrix G = dd_channel_matrix(H);
        Eigen::JacobiSVD<ComplexMatrix> svd(G);
        if (svd.singularValues().tail(1)(0) < 1e-6)
            continue;
        ComplexMatrix X(M, N);
        const auto pts = constellation(Modulation::QPSK);
        std::uniform_int_distribution<int> pick(0, 3);
        for (Eigen::Index i = 0; i < X.size(); ++i)
            X(i) = pts[pick(rng)];
        const ComplexMatrix Y = apply_dd(X, H) + randn(M, N, rng, std::sqrt(s2 / 2));
        mse_l += (lmmse_dd(Y, H, s2) - X).squaredNorm();
        mse_zf += (vec_inv(G.partialPivLu().solve(vec(Y)), M, N) - X).squaredNorm();
    }
    CHECK(mse_l <= mse_zf);
}

TEST_CASE("spike channel estimation", "[equalizers]")
{
    std::mt19937_64 rng(64);
    for (Variant v : {Variant::RCP, Variant::CP})
    {
        const auto cfg = make_cfg(32, 8, v);
        const auto pattern = spike_mask(cfg, 8, 20.0);
        const auto plan = assemble_frame(random_bits(pattern, cfg.modulation, rng), pattern, cfg, 0);

        SECTION("noiseless single integer path, " + to_string(v))
        {
            for (int d = 0; d < 4; ++d)
                for (int kappa = -2; kappa <= 2; ++kappa)
                {
                    const cd h(0.6, -0.7);
                    const std::vector<IntegerTap> truth{{h, d, kappa}};
                    const EffectiveChannel H = v == Variant::RCP ? integer_kernel_rcp(truth, 32, 8)
                                                                 : integer_kernel_cp(truth, 32, 8, 4);
                    const ComplexMatrix Y = apply_dd(plan.X, H);
                    const auto csi = estimate_csi_spike(Y, pattern, 3.0, cfg);
                    REQUIRE(csi.taps.size() == 1);
                    CHECK(csi.taps[0].delay == d);
                    CHECK(csi.taps[0].doppler == kappa);
                    CHECK(std::abs(csi.taps[0].gain - h) < 1e-10);
                    CHECK_FALSE(csi.fallback);
                }
        }
        SECTION("perfect estimate reproduces LMMSE with the true kernel, " + to_string(v))
        {
            const auto truth = random_taps(3, rng);
            const EffectiveChannel H = v == Variant::RCP ? integer_kernel_rcp(truth, 32, 8)
                                                         : integer_kernel_cp(truth, 32, 8, 4);
            const ComplexMatrix Y = apply_dd(plan.X, H) + randn(32, 8, rng, 0.05);
            const CsiEstimate csi{truth, 0.005, false};
            CHECK((lmmse_estimated(Y, csi, cfg) - lmmse_dd(Y, H, 0.005)).cwiseAbs().maxCoeff() < 1e-10);
            // pilot cancellation keeps the known symbols and leaves data estimates close
            const ComplexMatrix Xc = lmmse_estimated(Y, csi, cfg, &plan);
            CHECK(Xc(pattern.spike_row, pattern.spike_col) == plan.X(pattern.spike_row, pattern.spike_col));
            CHECK(data_nmse(Xc, plan) < 0.1);
        }
    }
}

TEST_CASE("spike estimator noise level and fallback", "[equalizers]")
{
    std::mt19937_64 rng(65);
    const auto cfg = make_cfg(64, 14);
    const auto pattern = spike_mask(cfg, 12, 20.0);
    int within = 0;
    std::size_t taps = 0;
    const double sigma = 0.1;
    for (int t = 0; t < 100; ++t)
    {
        // no channel energy inside the guard region: noise only
        const ComplexMatrix Y = randn(64, 14, rng, sigma / std::sqrt(2.0));
        const auto csi = estimate_csi_spike(Y, pattern, 3.0, cfg);
        within += std::abs(std::sqrt(csi.noise_var) - sigma) < 0.2 * sigma;
        taps += csi.fallback ? 0 : csi.taps.size();
    }
    CHECK(within == 100);
    CHECK(taps < 100);

    const ComplexMatrix Y = randn(64, 14, rng);
    const auto fb = estimate_csi_spike(Y, pattern, std::numeric_limits<double>::infinity(), cfg);
    CHECK(fb.fallback);
    REQUIRE(fb.taps.size() == 1);
    CHECK(fb.taps[0].delay == 0);
    CHECK(fb.taps[0].doppler == 0);
    CHECK(lmmse_estimated(Y, fb, cfg).allFinite());
    CHECK(to_text(fb).find("fallback 1") != std::string::npos);

    CHECK_THROWS_AS(estimate_csi_spike(Y, blockwise_mask(cfg, 12), 3.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(estimate_csi_spike(ComplexMatrix::Zero(8, 8), pattern, 3.0, cfg), std::invalid_argument);
}

TEST_CASE("fractional channel with an integer estimate still detects", "[equalizers]")
{
    std::mt19937_64 rng(66);
    const auto cfg = make_cfg(64, 14);
    const auto pattern = spike_mask(cfg, 6, 20.0);
    const auto plan = assemble_frame(random_bits(pattern, cfg.modulation, rng), pattern, cfg, 0);
    const auto chan = random_channel(ChannelSpec{3, 2.0, 0.5}, rng);
    const ComplexMatrix Y = demodulate(add_awgn(apply_time(modulate(plan.X, cfg), chan, cfg), 20.0, rng), cfg);
    const auto csi = estimate_csi_spike(Y, pattern, 3.0, cfg);
    const auto det = finish_detection(lmmse_estimated(Y, csi, cfg, &plan), plan, cfg.modulation);
    const double ber = static_cast<double>(count_bit_errors(det.bits, plan.bits)) / plan.bits.size();
    CHECK(ber < 0.3);
    CHECK(std::isfinite(data_nmse(det.X_raw, plan)));
}
