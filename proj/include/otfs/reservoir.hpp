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

// Pieces shared by the 1D and 2D reservoir detectors: fixed random weights,
// the complex activation and the least-squares readout.

#include "modem.hpp"
#include "numerics.hpp"
#include "pilots.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <random>
#include <span>

namespace otfs
{

enum class Activation
{
    Tanh,    // tanh(a) + j tanh(b) for a + jb
    Identity // linear reservoir, used by degenerate-case checks
};

inline cd activate(cd x, Activation f)
{
    return f == Activation::Tanh ? cd(std::tanh(x.real()), std::tanh(x.imag())) : x;
}

template <class Derived>
void activate_inplace(Eigen::MatrixBase<Derived> &v, Activation f)
{
    if (f == Activation::Identity)
        return;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = activate(v(i), f);
}

inline double spectral_radius(const ComplexMatrix &W)
{
    if (W.rows() == 0)
        return 0.0;
    Eigen::ComplexEigenSolver<ComplexMatrix> es(W, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Real uniform [-1, 1] entries.
template <class Rng>
ComplexMatrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatrix W(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            W(r, c) = u(rng);
    return W;
}

/// Recurrent weights built so that every leading principal block of size sizes[i] is itself
/// a valid reservoir: block lower-triangular, each diagonal block sparsified (each entry zeroed
/// with probability `sparsity`) and rescaled to the target spectral radius. The spectral radius
/// of the whole matrix is the maximum over its diagonal blocks. With a single size this is an
/// ordinary sparse reservoir.
template <class Rng>
ComplexMatrix nested_reservoir(std::vector<int> sizes, double radius, double sparsity, Rng &rng)
{
    if (sizes.empty())
        throw std::invalid_argument("nested_reservoir: no sizes given.");
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    if (sizes.front() < 1)
        throw std::invalid_argument("nested_reservoir: sizes must be positive.");
    const int n = sizes.back();
    std::bernoulli_distribution keep(1.0 - sparsity);
    ComplexMatrix W = uniform_matrix(n, n, rng);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r)
            if (!keep(rng))
                W(r, c) = 0.0;
    int start = 0;
    for (int end : sizes)
    {
        const int b = end - start;
        W.block(0, start, start, b).setZero(); // no coupling from newer neurons into older ones
        ComplexMatrix D = W.block(start, start, b, b);
        const double rho = spectral_radius(D);
        if (rho > 0.0)
            W.block(start, start, b, b) = D * (radius / rho);
        // keep the off-diagonal feed-forward coupling on the same scale
        if (rho > 0.0 && start > 0)
            W.block(start, 0, b, start) *= radius / rho;
        start = end;
    }
    return W;
}

template <class Rng>
ComplexMatrix reservoir_matrix(int n, double radius, double sparsity, Rng &rng)
{
    return nested_reservoir(std::vector<int>{n}, radius, sparsity, rng);
}

/// splitmix64 finalizer over (a, b); used to derive independent per-frame and per-model seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Singular values below this fraction of the largest are treated as zero in pseudo-inverses.
inline constexpr double pinv_cutoff = 1e-10;

struct LsFit
{
    ComplexMatrix W;       // N_o x p
    double residual = 0.0; // ||W U - T||_F^2
};

/// Minimum-norm least squares W = T U^+ for regressors U (p x L) and targets T (N_o x L).
inline LsFit ls_readout(const ComplexMatrix &U, const ComplexMatrix &T)
{
    if (U.cols() != T.cols())
        throw std::invalid_argument("ls_readout: regressor and target column counts differ.");
    if (U.cols() == 0)
        throw std::invalid_argument("ls_readout: no training samples.");
    // W U = T  <=>  U^T W^T = T^T
    Eigen::BDCSVD<ComplexMatrix> svd(U.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(pinv_cutoff);
    LsFit fit;
    fit.W = svd.solve(T.transpose()).transpose();
    fit.residual = (fit.W * U - T).squaredNorm();
    return fit;
}

/// Output of any detector for one subframe.
struct Detection
{
    ComplexMatrix X_raw;   // soft estimate of the full grid
    ComplexMatrix X_hat;   // quantized grid
    BitVector bits;        // demapped data bits
    double train_nmse = 0.0;
};

inline Detection finish_detection(ComplexMatrix X_raw, const FramePlan &plan, Modulation mod)
{
    Detection d;
    d.X_hat = quantize(X_raw, mod);
    d.X_raw = std::move(X_raw);
    const auto symbols = extract_data(d.X_hat, plan.data_positions);
    d.bits = qam_demap_nearest(symbols, mod);
    return d;
}

inline std::size_t count_bit_errors(const BitVector &a, const BitVector &b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("count_bit_errors: length mismatch.");
    std::size_t e = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        e += (a[i] != b[i]);
    return e;
}

/// ||estimate - truth||^2 / ||truth||^2 over the data positions.
inline double data_nmse(const ComplexMatrix &estimate, const FramePlan &plan)
{
    double err = 0.0, ref = 0.0;
    for (const auto &[l, k] : plan.data_positions)
    {
        err += std::norm(estimate(l, k) - plan.X(l, k));
        ref += std::norm(plan.X(l, k));
    }
    return ref > 0.0 ? err / ref : 0.0;
}

} // namespace otfs
