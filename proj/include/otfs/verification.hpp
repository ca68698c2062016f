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

#pragma once

// Equivalence battery: the closed-form delay-Doppler kernels against independent references
// (dense time-domain operator for RCP, sample-level simulation for CP, integer relations).

#include "channel.hpp"
#include "reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace otfs
{

struct VerifyParams
{
    int trials = 50;                    // random channels per (M, N) pair
    std::vector<int> delay_sizes{8, 16, 32};
    std::vector<int> doppler_sizes{8, 14};
    int max_paths = 5;
    double max_delay = 4.0;   // delays uniform on [0, max_delay]
    double max_doppler = 2.0; // Dopplers uniform on [-max_doppler, max_doppler]
    std::uint64_t seed = 2026;
    double rcp_tolerance = 1e-9;
    double cp_tolerance = 1e-7;
    double integer_tolerance = 1e-12;
    int integer_M = 8, integer_N = 4;

    void validate() const
    {
        if (trials < 1 || max_paths < 1 || delay_sizes.empty() || doppler_sizes.empty())
            throw std::invalid_argument("VerifyParams: trials, max_paths and the size lists must be non-empty.");
        if (!(max_delay >= 0.0) || !(max_doppler >= 0.0))
            throw std::invalid_argument("VerifyParams: delay and Doppler ranges must be non-negative.");
        for (int m : delay_sizes)
            if (m < 2)
                throw std::invalid_argument("VerifyParams: delay sizes must be at least 2.");
        for (int n : doppler_sizes)
            if (n < 1)
                throw std::invalid_argument("VerifyParams: Doppler sizes must be positive.");
    }
};

struct VerifyCase
{
    std::string check; // rcp_oracle, cp_sample, rcp_integer, cp_integer
    int M = 0, N = 0, trial = 0;
    double error = 0.0;
    double tolerance = 0.0;
    bool passed() const { return error < tolerance; }
};

struct VerifySummary
{
    std::vector<VerifyCase> cases;

    double worst(const std::string &check) const
    {
        double w = 0.0;
        for (const auto &c : cases)
            if (c.check == check)
                w = std::max(w, c.error);
        return w;
    }
    bool passed(const std::string &check) const
    {
        bool any = false;
        for (const auto &c : cases)
            if (c.check == check)
            {
                any = true;
                if (!c.passed())
                    return false;
            }
        return any;
    }
    bool all_passed() const
    {
        return std::all_of(cases.begin(), cases.end(), [](const VerifyCase &c) { return c.passed(); });
    }
};

inline double relative_error(const ComplexMatrix &a, const ComplexMatrix &ref)
{
    const double n = ref.norm();
    return n > 0.0 ? (a - ref).norm() / n : (a - ref).norm();
}

template <class Rng>
ComplexMatrix random_grid(int M, int N, Rng &rng)
{
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    ComplexMatrix X(M, N);
    for (Eigen::Index i = 0; i < X.size(); ++i)
        X(i) = cd(g(rng), g(rng));
    return X;
}

/// Kernel application against the dense oracle H = sum h Pi_l Delta_k (RCP).
inline void verify_rcp_oracle(const VerifyParams &p, VerifySummary &out)
{
    for (int M : p.delay_sizes)
        for (int N : p.doppler_sizes)
        {
            std::mt19937_64 rng(mix_seed(p.seed, static_cast<std::uint64_t>(M * 1000 + N)));
            std::uniform_int_distribution<int> npaths(1, p.max_paths);
            OtfsConfig cfg;
            cfg.M = M;
            cfg.N = N;
            cfg.variant = Variant::RCP;
            for (int t = 0; t < p.trials; ++t)
            {
                ChannelSpec spec{npaths(rng), std::min(p.max_delay, M - 1.0), p.max_doppler};
                const PathChannel chan = random_channel(spec, rng);
                const ComplexMatrix X = random_grid(M, N, rng);
                const ComplexMatrix Y = apply_dd(X, effective_channel(chan, cfg));
                const ComplexMatrix Yo = oracle_apply_dd(oracle_rcp(chan, cfg), X, cfg);
                out.cases.push_back({"rcp_oracle", M, N, t, relative_error(Y, Yo), p.rcp_tolerance});
            }
        }
}

/// Kernel application against the sample-level CP simulation.
inline void verify_cp_sample(const VerifyParams &p, VerifySummary &out)
{
    for (int M : p.delay_sizes)
        for (int N : p.doppler_sizes)
        {
            std::mt19937_64 rng(mix_seed(p.seed ^ 0x5cu, static_cast<std::uint64_t>(M * 1000 + N)));
            std::uniform_int_distribution<int> npaths(1, p.max_paths);
            OtfsConfig cfg;
            cfg.M = M;
            cfg.N = N;
            cfg.variant = Variant::CP;
            cfg.n_cp = static_cast<int>(std::ceil(std::min(p.max_delay, M - 1.0)));
            for (int t = 0; t < p.trials; ++t)
            {
                ChannelSpec spec{npaths(rng), std::min(p.max_delay, M - 1.0), p.max_doppler};
                const PathChannel chan = random_channel(spec, rng);
                const ComplexMatrix X = random_grid(M, N, rng);
                const ComplexMatrix Y = apply_dd(X, effective_channel(chan, cfg));
                const ComplexMatrix Ys = demodulate(apply_time(modulate(X, cfg), chan, cfg), cfg);
                out.cases.push_back({"cp_sample", M, N, t, relative_error(Y, Ys), p.cp_tolerance});
            }
        }
}

/// Fractional kernels evaluated at integer (delay, Doppler) against the integer relations.
inline void verify_integer_reductions(const VerifyParams &p, VerifySummary &out)
{
    const int M = p.integer_M, N = p.integer_N;
    for (Variant v : {Variant::RCP, Variant::CP})
    {
        OtfsConfig cfg;
        cfg.M = M;
        cfg.N = N;
        cfg.variant = v;
        cfg.n_cp = M - 1;
        const int max_delay = v == Variant::RCP ? M - 1 : cfg.n_cp;
        int idx = 0;
        for (int ell = 0; ell <= max_delay; ++ell)
            for (int kappa = -N; kappa < N; ++kappa, ++idx)
            {
                const cd h = cis2pi(0.1 * idx);
                const PathChannel chan{{{h, static_cast<double>(ell), static_cast<double>(kappa)}}};
                const std::vector<IntegerTap> taps{{h, ell, kappa}};
                const EffectiveChannel Hf = effective_channel(chan, cfg, KernelStorage::Dense);
                const EffectiveChannel Hi = v == Variant::RCP ? integer_kernel_rcp(taps, M, N)
                                                              : integer_kernel_cp(taps, M, N, cfg.n_cp);
                double err = 0.0;
                for (int l = 0; l < M; ++l)
                    for (int k = 0; k < N; ++k)
                        for (int lp = 0; lp < M; ++lp)
                            for (int kp = 0; kp < N; ++kp)
                                err = std::max(err, std::abs(Hf.at(l, k, lp, kp) - Hi.at(l, k, lp, kp)));
                out.cases.push_back({v == Variant::RCP ? "rcp_integer" : "cp_integer", M, N, idx, err,
                                     p.integer_tolerance});
            }
    }
}

inline VerifySummary verify_channel(const VerifyParams &p)
{
    p.validate();
    VerifySummary out;
    verify_rcp_oracle(p, out);
    verify_cp_sample(p, out);
    verify_integer_reductions(p, out);
    return out;
}

} // namespace otfs
