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

#include "otfs/channel.hpp"
#include "otfs/rc1d.hpp"

#include <random>

using namespace otfs;

namespace
{
ComplexMatrix randn(Eigen::Index r, Eigen::Index c, std::mt19937_64 &rng)
{
    std::normal_distribution<double> g;
    ComplexMatrix A(r, c);
    for (Eigen::Index i = 0; i < A.size(); ++i)
        A(i) = cd(g(rng), g(rng));
    return A;
}

OtfsConfig make_cfg(int M, int N)
{
    OtfsConfig c;
    c.M = M;
    c.N = N;
    c.n_cp = 2;
    return c;
}
} // namespace

TEST_CASE("1D windowing", "[rc1d]")
{
    ComplexMatrix y(1, 3);
    y << 1, 2, 3;
    ComplexMatrix want(2, 3);
    want << 1, 2, 3, 0, 1, 2;
    CHECK(window_1d(y, 2) == want);
    CHECK(window_1d(y, 1) == y);
    std::mt19937_64 rng(51);
    const ComplexMatrix Y = randn(2, 7, rng);
    CHECK(window_1d(Y, 4).topRows(2) == Y);
    CHECK(window_1d(Y, 4).rows() == 8);
    CHECK_THROWS_AS(window_1d(Y, 0), std::invalid_argument);
}

TEST_CASE("zero padding", "[rc1d]")
{
    std::mt19937_64 rng(52);
    const ComplexMatrix Y = randn(3, 5, rng);
    CHECK(pad_zeros(Y, 0) == Y);
    const ComplexMatrix P = pad_zeros(Y, 4);
    CHECK(P.cols() == 9);
    CHECK(P.leftCols(5) == Y);
    CHECK(P.rightCols(4).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(pad_zeros(Y, -1), std::invalid_argument);
}

TEST_CASE("1D state recursion", "[rc1d]")
{
    std::mt19937_64 rng(53);
    Rc1dParams p;
    p.n_neurons = 5;

    SECTION("memoryless linear degenerate case")
    {
        Rc1dReservoir r{randn(5, 3, rng), ComplexMatrix::Zero(5, 5), Activation::Identity};
        const ComplexMatrix Y = randn(3, 10, rng);
        const ComplexMatrix ext = r.states(Y);
        CHECK(ext.topRows(3) == Y);
        CHECK((ext.bottomRows(5) - r.W_i * Y).norm() < 1e-12);
    }
    SECTION("zero input gives zero states")
    {
        const auto r = Rc1dReservoir::draw(5, 3, p, rng);
        CHECK(r.states(ComplexMatrix::Zero(3, 10)).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("echo state property")
    {
        const auto r = Rc1dReservoir::draw(5, 3, p, rng);
        CHECK(spectral_radius(r.W_res) == Catch::Approx(0.9));
        const ComplexVector a = randn(5, 1, rng), b = randn(5, 1, rng);
        const ComplexMatrix zero = ComplexMatrix::Zero(3, 200);
        const ComplexMatrix ea = r.states(zero, &a), eb = r.states(zero, &b);
        CHECK((ea.col(199).tail(5) - eb.col(199).tail(5)).norm() < 1e-6);
    }
    SECTION("direct evaluation")
    {
        const auto r = Rc1dReservoir::draw(5, 3, p, rng);
        const ComplexMatrix Y = randn(3, 6, rng);
        const ComplexMatrix ext = r.states(Y);
        ComplexVector u = ComplexVector::Zero(5);
        for (int n = 0; n < 6; ++n)
        {
            ComplexVector a = r.W_i * Y.col(n) + r.W_res * u;
            for (auto &x : a)
                x = cd(std::tanh(x.real()), std::tanh(x.imag()));
            u = a;
            CHECK((ext.col(n).tail(5) - u).norm() < 1e-12);
        }
    }
    SECTION("shape errors")
    {
        const auto r = Rc1dReservoir::draw(5, 3, p, rng);
        CHECK_THROWS_AS(r.states(ComplexMatrix::Zero(4, 2)), std::invalid_argument);
    }
}

TEST_CASE("1D readout training", "[rc1d]")
{
    std::mt19937_64 rng(54);
    Rc1dParams p;
    p.n_neurons = 6;
    const auto r = Rc1dReservoir::draw(6, 4, p, rng);
    const int Lt = 40, Lf = 6;
    const ComplexMatrix ext = r.states(pad_zeros(window_1d(randn(1, Lt, rng), 4), Lf));

    SECTION("planted solution")
    {
        const ComplexMatrix W_star = randn(1, 10, rng);
        const ComplexMatrix target = W_star * ext.middleCols(4, Lt);
        const auto fit = rc1d_train(ext, target, {0, 2, 4, 6});
        CHECK(fit.residual < 1e-8);
        CHECK(fit.l_f == 4);
        CHECK(fit.visited.size() == 4);
        CHECK((rc1d_predict(ext, fit, Lt) - target).norm() < 1e-8);
    }
    SECTION("optimality against perturbations")
    {
        const ComplexMatrix target = randn(1, Lt, rng);
        const auto fit = rc1d_train(ext, target, {0});
        CHECK(fit.visited.size() == 1);
        CHECK(fit.residual <= target.squaredNorm());
        for (int t = 0; t < 100; ++t)
        {
            const ComplexMatrix W = fit.W_o + 1e-3 * randn(1, 10, rng);
            CHECK((W * ext.leftCols(Lt) - target).squaredNorm() >= fit.residual);
        }
    }
    SECTION("known steps only")
    {
        const ComplexMatrix W_star = randn(1, 10, rng);
        ComplexMatrix target = W_star * ext.middleCols(2, Lt);
        const std::vector<int> steps{1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25};
        const auto fit = rc1d_train(ext, target, {2}, steps);
        CHECK(fit.residual < 1e-8);
        CHECK((rc1d_predict(ext, fit, Lt) - target).norm() < 1e-6);
    }
    SECTION("errors")
    {
        CHECK_THROWS_AS(rc1d_train(ext, randn(1, Lt, rng), {}), std::invalid_argument);
        CHECK_THROWS_AS(rc1d_train(ext, randn(1, Lt, rng), {7}), std::invalid_argument);
    }
}

TEST_CASE("known time samples come from the pilot rows", "[rc1d]")
{
    std::mt19937_64 rng(55);
    const auto cfg = make_cfg(16, 8);
    const auto pattern = blockwise_mask(cfg, 4);
    const auto plan = assemble_frame(random_bits(pattern, cfg.modulation, rng), pattern, cfg, 3);
    const auto known = known_time_samples(plan, cfg);
    CHECK(known.size() == 4 * 8);
    const ComplexVector s = remove_cp(modulate(plan.X, cfg), cfg);
    for (const auto &[t, v] : known)
        CHECK(std::abs(s(t) - v) < 1e-12);
    for (std::size_t i = 1; i < known.size(); ++i)
        CHECK(known[i - 1].first < known[i].first);
}

TEST_CASE("1D-RC detection", "[rc1d]")
{
    std::mt19937_64 rng(56);
    const auto cfg = make_cfg(16, 8);
    const auto pattern = blockwise_mask(cfg, 4);
    Rc1dParams p;
    p.n_neurons = 4;
    p.window = 2;
    p.forget_set = {0, 2};
    p.n_reservoirs = 1;

    SECTION("identity channel, noiseless, V = 1")
    {
        for (int t = 0; t < 3; ++t)
        {
            const auto plan = assemble_frame(random_bits(pattern, cfg.modulation, rng), pattern, cfg, 10 + t);
            const auto det = rc1d_detect(modulate(plan.X, cfg), plan, p, cfg);
            CHECK(count_bit_errors(det.detection.bits, plan.bits) == 0);
            CHECK(det.reservoirs.size() == 1);
            CHECK(rc1d_detect(modulate(plan.X, cfg), plan, p, cfg).detection.X_raw == det.detection.X_raw);
        }
    }
    SECTION("all-pilot frame reports a training residual and has no data")
    {
        const auto full = blockwise_mask(cfg, 16);
        const auto plan = assemble_frame(BitVector{}, full, cfg, 4);
        const auto det = rc1d_detect(modulate(plan.X, cfg), plan, p, cfg);
        CHECK(det.detection.bits.empty());
        CHECK(det.detection.train_nmse >= 0.0);
    }
    SECTION("segments without pilots are rejected")
    {
        p.n_reservoirs = 8; // segments of one column; pilot rows cover 4 of 16 samples each
        const auto plan = assemble_frame(random_bits(pattern, cfg.modulation, rng), pattern, cfg, 5);
        CHECK_NOTHROW(rc1d_detect(modulate(plan.X, cfg), plan, p, cfg));
        p.n_reservoirs = 32; // segments of four samples; some miss the pilot rows
        CHECK_THROWS_AS(rc1d_detect(modulate(plan.X, cfg), plan, p, cfg), std::runtime_error);
    }
    SECTION("validation")
    {
        Rc1dParams defaults; // N_n 12, N_w 10, V 7, forget 0..22 step 2
        CHECK_NOTHROW(defaults.validate(64, 14));
        CHECK(defaults.max_forget() == 22);
        p.n_reservoirs = 3;
        CHECK_THROWS_AS(p.validate(16, 8), std::invalid_argument);
        p.n_reservoirs = 1;
        p.forget_set = {-1};
        CHECK_THROWS_AS(p.validate(16, 8), std::invalid_argument);
    }
}
