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

// Model-based baselines: linear MMSE equalization of the delay-Doppler relation and a
// threshold channel estimator driven by an embedded spike pilot.

#include "channel.hpp"
#include "pilots.hpp"
#include "reservoir.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace otfs
{

/// Flattened delay-Doppler map G: vec(Y) = G vec(X), row kM + l, column <k-k'>M + <l-l'>.
inline ComplexMatrix dd_channel_matrix(const EffectiveChannel &H)
{
    const int M = H.M(), N = H.N();
    const Eigen::Index MN = static_cast<Eigen::Index>(M) * N;
    ComplexMatrix G = ComplexMatrix::Zero(MN, MN);
    std::vector<cd> row(static_cast<std::size_t>(M) * N);
    for (int l = 0; l < M; ++l)
        for (int k = 0; k < N; ++k)
        {
            H.row(l, k, row.data());
            const Eigen::Index r = static_cast<Eigen::Index>(k) * M + l;
            for (int lp = 0; lp < M; ++lp)
                for (int kp = 0; kp < N; ++kp)
                    G(r, static_cast<Eigen::Index>(mod(k - kp, N)) * M + mod(l - lp, M)) +=
                        row[static_cast<std::size_t>(lp) * N + kp];
        }
    return G;
}

enum class LmmseSolver
{
    Auto,  // sparse when G has at most 10% non-zeros
    Dense,
    Sparse
};

inline constexpr double lmmse_regularization_floor = 1e-12;

/// x = (G^H G + s2 I)^-1 G^H vec(Y), reshaped to M x N.
inline ComplexMatrix lmmse_dd(const ComplexMatrix &Y, const EffectiveChannel &H, double noise_var,
                              LmmseSolver solver = LmmseSolver::Auto)
{
    const int M = H.M(), N = H.N();
    if (Y.rows() != M || Y.cols() != N)
        throw std::invalid_argument("lmmse_dd: grid shape does not match the kernel.");
    const double s2 = std::max(noise_var, lmmse_regularization_floor);
    const ComplexMatrix G = dd_channel_matrix(H);
    const ComplexVector y = vec(Y);
    const Eigen::Index MN = G.rows();

    if (solver == LmmseSolver::Auto)
    {
        const auto nnz = (G.array() != cd(0.0)).count();
        solver = nnz * 10 <= MN * MN ? LmmseSolver::Sparse : LmmseSolver::Dense;
    }
    ComplexVector x;
    if (solver == LmmseSolver::Dense)
    {
        ComplexMatrix A = G.adjoint() * G;
        A.diagonal().array() += s2;
        x = A.llt().solve(G.adjoint() * y);
    }
    else
    {
        Eigen::SparseMatrix<cd> Gs = G.sparseView();
        Eigen::SparseMatrix<cd> A = Eigen::SparseMatrix<cd>(Gs.adjoint()) * Gs;
        Eigen::SparseMatrix<cd> I(MN, MN);
        I.setIdentity();
        A += s2 * I;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<cd>> ldlt(A);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("lmmse_dd: sparse factorization failed.");
        x = ldlt.solve(Gs.adjoint() * y);
    }
    return vec_inv(x, M, N);
}

struct CsiEstimate
{
    std::vector<IntegerTap> taps;
    double noise_var = 0.0;
    bool fallback = false; // no tap cleared the threshold
};

inline std::string to_text(const CsiEstimate &csi)
{
    std::ostringstream os;
    os << std::setprecision(17) << "noise_var " << csi.noise_var << "\nfallback " << csi.fallback << "\ntaps "
       << csi.taps.size() << '\n';
    for (const auto &t : csi.taps)
        os << t.gain.real() << ' ' << t.gain.imag() << ' ' << t.delay << ' ' << t.doppler << '\n';
    return os.str();
}

namespace detail
{
/// Phase the integer relation applies to a spike at (l_p, k_p) seen through tap (d, kappa).
inline cd spike_phase(const OtfsConfig &cfg, int l_p, int kappa)
{
    if (cfg.variant == Variant::RCP)
        return cis2pi(static_cast<double>(kappa) * l_p / (static_cast<double>(cfg.M) * cfg.N));
    return cis2pi(static_cast<double>(kappa) * (cfg.n_cp + l_p) / (static_cast<double>(cfg.N) * (cfg.M + cfg.n_cp)));
}

inline int signed_doppler(int d, int N)
{
    d = mod(d, N);
    return d >= (N + 1) / 2 ? d - N : d;
}
} // namespace detail

/// Threshold estimator for the spike-and-guard pattern. The noise level comes from the median
/// guard magnitude (|w| of a circular Gaussian has median sigma sqrt(ln 2)); cells at or below the
/// spike row whose magnitude exceeds threshold_factor * sigma become integer taps, with delay and
/// Doppler read off the offset from the spike.
inline CsiEstimate estimate_csi_spike(const ComplexMatrix &Y, const PilotPattern &pattern, double threshold_factor,
                                      const OtfsConfig &cfg)
{
    if (pattern.kind != PilotKind::SpikeGuard || pattern.spike_row < 0)
        throw std::invalid_argument("estimate_csi_spike: pattern has no spike pilot.");
    if (Y.rows() != cfg.M || Y.cols() != cfg.N)
        throw std::invalid_argument("estimate_csi_spike: grid shape does not match the config.");
    const int lp = pattern.spike_row, kp = pattern.spike_col;
    const double amp = pattern.spike_amplitude();

    std::vector<double> mags;
    double peak = 0.0;
    for (int k = 0; k < cfg.N; ++k)
        for (int l = 0; l < cfg.M; ++l)
            if (pattern.mask(l, k))
            {
                mags.push_back(std::abs(Y(l, k)));
                peak = std::max(peak, mags.back());
            }
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2), mags.end());
    const double sigma = mags[mags.size() / 2] / std::sqrt(std::log(2.0));

    CsiEstimate csi;
    csi.noise_var = sigma * sigma;
    const double thr = std::max(threshold_factor * sigma, 1e-8 * peak);
    const int last_row = pattern.block_start_row + pattern.rows;
    for (int l = lp; l < last_row; ++l)
        for (int k = 0; k < cfg.N; ++k)
            if (std::abs(Y(l, k)) > thr)
            {
                const int d = l - lp;
                const int kappa = detail::signed_doppler(k - kp, cfg.N);
                csi.taps.push_back({Y(l, k) / (amp * detail::spike_phase(cfg, lp, kappa)), d, kappa});
            }
    if (csi.taps.empty())
    {
        csi.fallback = true;
        csi.taps.push_back({Y(lp, kp) / (amp * detail::spike_phase(cfg, lp, 0)), 0, 0});
    }
    return csi;
}

/// Integer-tap kernel for the configured variant.
inline EffectiveChannel kernel_from_csi(const CsiEstimate &csi, const OtfsConfig &cfg)
{
    return cfg.variant == Variant::RCP ? integer_kernel_rcp(csi.taps, cfg.M, cfg.N)
                                       : integer_kernel_cp(csi.taps, cfg.M, cfg.N, cfg.n_cp);
}

/// LMMSE with the estimated integer-tap channel. When `plan` is given, the known pilot
/// contribution is cancelled first and pilot positions of the result hold the known symbols.
inline ComplexMatrix lmmse_estimated(const ComplexMatrix &Y, const CsiEstimate &csi, const OtfsConfig &cfg,
                                     const FramePlan *plan = nullptr)
{
    const EffectiveChannel H = kernel_from_csi(csi, cfg);
    if (!plan)
        return lmmse_dd(Y, H, csi.noise_var);
    const ComplexMatrix Yd = Y - apply_dd(plan->X_train, H);
    ComplexMatrix X = lmmse_dd(Yd, H, csi.noise_var);
    for (int k = 0; k < cfg.N; ++k)
        for (int l = 0; l < cfg.M; ++l)
            if (plan->mask(l, k))
                X(l, k) = plan->X_train(l, k);
    return X;
}

} // namespace otfs
