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
#include "otfs/verification.hpp"

#include <random>

using namespace otfs;

namespace
{
ComplexMatrix random_grid(int M, int N, std::mt19937_64 &rng)
{
    std::normal_distribution<double> g;
    ComplexMatrix X(M, N);
    for (Eigen::Index i = 0; i < X.size(); ++i)
        X(i) = cd(g(rng), g(rng));
    return X;
}

OtfsConfig make_cfg(int M, int N, Variant v, int n_cp)
{
    OtfsConfig c;
    c.M = M;
    c.N = N;
    c.variant = v;
    c.n_cp = n_cp;
    return c;
}

double rel(const ComplexMatrix &a, const ComplexMatrix &b) { return (a - b).norm() / b.norm(); }
} // namespace

TEST_CASE("delay and Doppler operators", "[channel]")
{
    const int MN = 12;
    // integer delay is a cyclic shift
    const ComplexMatrix P = delay_operator(3.0, MN);
    for (int t = 0; t < MN; ++t)
        for (int c = 0; c < MN; ++c)
            CHECK(std::abs(P(t, c) - (mod(t - c, MN) == 3 ? cd(1.0) : cd(0.0))) < 1e-12);
    CHECK((delay_operator(0.0, MN) - ComplexMatrix::Identity(MN, MN)).cwiseAbs().maxCoeff() < 1e-12);
    // fractional delays compose
    CHECK((delay_operator(0.3, MN) * delay_operator(1.2, MN) - delay_operator(1.5, MN)).cwiseAbs().maxCoeff() < 1e-12);
    const ComplexMatrix D = doppler_operator(0.5, MN);
    CHECK(std::abs(D(2, 2) - cis2pi(0.5 * 2 / MN)) < 1e-15);
    CHECK((D.adjoint() * D - ComplexMatrix::Identity(MN, MN)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fractional RCP kernel matches the matrix oracle", "[channel]")
{
    std::mt19937_64 rng(11);
    for (auto [M, N] : {std::pair{8, 8}, {16, 14}, {8, 4}})
    {
        const auto cfg = make_cfg(M, N, Variant::RCP, 4);
        for (int t = 0; t < 5; ++t)
        {
            const auto chan = random_channel(ChannelSpec{4, 4.0, 2.0}, rng);
            const ComplexMatrix X = random_grid(M, N, rng);
            const auto oracle = oracle_rcp(chan, cfg);
            CHECK(rel(apply_dd(X, effective_channel(chan, cfg)), oracle_apply_dd(oracle, X, cfg)) < 1e-9);
            CHECK(rel(apply_dd(X, effective_channel(chan, cfg, KernelStorage::Lazy)), oracle_apply_dd(oracle, X, cfg)) < 1e-9);
            // the sample-level channel agrees with the oracle
            const ComplexMatrix Y = demodulate(apply_time(modulate(X, cfg), chan, cfg), cfg);
            CHECK(rel(Y, oracle_apply_dd(oracle, X, cfg)) < 1e-9);
        }
    }
}

TEST_CASE("dense oracle map equals the fast oracle application", "[channel]")
{
    std::mt19937_64 rng(12);
    const auto cfg = make_cfg(4, 4, Variant::RCP, 2);
    const auto chan = random_channel(ChannelSpec{2, 2.0, 1.0}, rng);
    const auto oracle = oracle_rcp(chan, cfg);
    const ComplexMatrix X = random_grid(4, 4, rng);
    const ComplexMatrix G = oracle_dd_matrix(oracle, cfg);
    CHECK(rel(vec_inv(G * vec(X), 4, 4), oracle_apply_dd(oracle, X, cfg)) < 1e-12);
    CHECK_THROWS_AS(oracle_rcp(chan, make_cfg(128, 64, Variant::RCP, 2)), std::invalid_argument);
}

TEST_CASE("CP kernel matches the sample-level channel", "[channel]")
{
    std::mt19937_64 rng(13);
    for (auto [M, N] : {std::pair{8, 8}, {16, 14}, {32, 8}})
    {
        const auto cfg = make_cfg(M, N, Variant::CP, 4);
        for (int t = 0; t < 5; ++t)
        {
            const auto chan = random_channel(ChannelSpec{3, 4.0, 2.0}, rng);
            const ComplexMatrix X = random_grid(M, N, rng);
            const ComplexMatrix Y = demodulate(apply_time(modulate(X, cfg), chan, cfg), cfg);
            CHECK(rel(apply_dd(X, effective_channel(chan, cfg)), Y) < 1e-7);
        }
    }
}

TEST_CASE("integer taps reduce to the integer relations", "[channel]")
{
    std::mt19937_64 rng(14);
    const int M = 8, N = 4;
    std::uniform_int_distribution<int> dl(0, 4), dk(-2, 2);
    std::normal_distribution<double> g;
    for (int t = 0; t < 20; ++t)
    {
        std::vector<IntegerTap> taps;
        PathChannel chan;
        for (int i = 0; i < 3; ++i)
        {
            IntegerTap tap{cd(g(rng), g(rng)), dl(rng), dk(rng)};
            taps.push_back(tap);
            chan.paths.push_back({tap.gain, double(tap.delay), double(tap.doppler)});
        }
        const ComplexMatrix X = random_grid(M, N, rng);
        const auto rcp = make_cfg(M, N, Variant::RCP, 4);
        CHECK(rel(apply_dd(X, integer_kernel_rcp(taps, M, N)), apply_dd(X, effective_channel(chan, rcp))) < 1e-12);
        const auto cp = make_cfg(M, N, Variant::CP, 4);
        CHECK(rel(apply_dd(X, integer_kernel_cp(taps, M, N, 4)), apply_dd(X, effective_channel(chan, cp))) < 1e-12);
    }
}

TEST_CASE("trivial channels", "[channel]")
{
    std::mt19937_64 rng(15);
    const ComplexMatrix X = random_grid(8, 4, rng);
    PathChannel unit{{Path{cd(1.0), 0.0, 0.0}}};
    for (Variant v : {Variant::RCP, Variant::CP})
    {
        const auto cfg = make_cfg(8, 4, v, 2);
        CHECK((apply_dd(X, effective_channel(unit, cfg)) - X).cwiseAbs().maxCoeff() < 1e-12);
    }
    // a single integer tap is a phase-rotated cyclic shift
    const auto cfg = make_cfg(8, 4, Variant::RCP, 2);
    PathChannel shift{{Path{cd(1.0), 2.0, 1.0}}};
    const ComplexMatrix Y = apply_dd(X, effective_channel(shift, cfg));
    for (int l = 0; l < 8; ++l)
        for (int k = 0; k < 4; ++k)
            CHECK(std::abs(std::abs(Y(l, k)) - std::abs(X(mod(l - 2, 8), mod(k - 1, 4)))) < 1e-12);
    // the zero grid stays zero
    CHECK(apply_dd(ComplexMatrix::Zero(8, 4), effective_channel(shift, cfg)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("channel validation", "[channel]")
{
    const auto cfg = make_cfg(8, 4, Variant::RCP, 2);
    CHECK_THROWS_AS(effective_channel(PathChannel{}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(effective_channel(PathChannel{{Path{cd(1.0), 8.0, 0.0}}}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(effective_channel(PathChannel{{Path{cd(1.0), -1.0, 0.0}}}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(apply_dd(ComplexMatrix::Zero(4, 4), effective_channel(PathChannel{{Path{}}}, cfg)),
                    std::invalid_argument);
    ChannelSpec bad;
    bad.paths = 0;
    CHECK_THROWS_AS(bad.validate(8), std::invalid_argument);
    // delay beyond the per-column CP is reported
    const auto cp = make_cfg(8, 4, Variant::CP, 1);
    CHECK(cp_violations(PathChannel{{Path{cd(1.0), 2.5, 0.0}, Path{cd(1.0), 0.5, 0.0}}}, cp) ==
          std::vector<std::size_t>{0});
}

TEST_CASE("random channel statistics and text round trip", "[channel]")
{
    std::mt19937_64 rng(16);
    ChannelSpec spec{5, 2.0, 0.5};
    for (int t = 0; t < 200; ++t)
    {
        const auto chan = random_channel(spec, rng);
        double power = 0.0;
        for (const auto &p : chan.paths)
        {
            power += std::norm(p.gain);
            REQUIRE(p.delay >= 0.0);
            REQUIRE(p.delay <= 2.0);
            REQUIRE(std::abs(p.doppler) <= 0.5);
        }
        REQUIRE(std::abs(power - 1.0) < 1e-12);
    }
    spec.integer_delay = spec.integer_doppler = true;
    spec.max_doppler = 2.0;
    const auto ic = random_channel(spec, rng);
    for (const auto &p : ic.paths)
    {
        CHECK(p.delay == std::floor(p.delay));
        CHECK(p.doppler == std::floor(p.doppler));
    }
    const auto back = path_channel_from_text(to_text(ic));
    REQUIRE(back.size() == ic.size());
    for (std::size_t i = 0; i < ic.size(); ++i)
    {
        CHECK(back.paths[i].gain == ic.paths[i].gain);
        CHECK(back.paths[i].delay == ic.paths[i].delay);
        CHECK(back.paths[i].doppler == ic.paths[i].doppler);
    }
    CHECK_THROWS_AS(path_channel_from_text("garbage\n"), std::invalid_argument);
    CHECK_THROWS_AS(path_channel_from_text("# otfs path channel v1\n2\n1 0 0 0\n"), std::invalid_argument);
}

TEST_CASE("150 km/h at 4 GHz is about half a Doppler bin", "[channel]")
{
    OtfsConfig cfg;
    CHECK(doppler_bins_from_speed(150.0, cfg) == Catch::Approx(0.519).epsilon(0.01));
}

TEST_CASE("noise draws have the requested variance", "[channel]")
{
    const ComplexVector s = ComplexVector::Zero(200000);
    const ComplexVector r = add_awgn(s, 10.0, std::uint64_t{7});
    CHECK(r.squaredNorm() / r.size() == Catch::Approx(0.1).epsilon(0.02));
    CHECK(add_awgn(s, std::numeric_limits<double>::infinity(), std::uint64_t{7}) == s);
    CHECK(add_awgn(s, 10.0, std::uint64_t{7}) == r);
    CHECK(noise_variance(0.0) == 1.0);
}

TEST_CASE("verification battery passes on a reduced grid", "[channel]")
{
    VerifyParams p;
    p.trials = 3;
    p.delay_sizes = {8, 16};
    p.doppler_sizes = {8};
    const auto summary = verify_channel(p);
    CHECK(summary.all_passed());
    CHECK(summary.worst("rcp_oracle") < 1e-9);
    p.trials = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
