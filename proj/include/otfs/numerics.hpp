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

// Transform and indexing primitives shared by every other module.
// Matrices are dense Eigen types; frame sizes are desk scale.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace otfs
{
using cd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cd j1{0.0, 1.0};

/// Non-negative remainder, <a>_m.
inline int mod(int a, int m)
{
    int r = a % m;
    return r < 0 ? r + m : r;
}

/// exp(j*2*pi*x)
inline cd cis2pi(double x)
{
    return std::polar(1.0, 2.0 * pi * x);
}

/// Three-way complex tensor, d1 x d2 x d3. Fibers along the first axis are contiguous:
/// fiber (m, n) is column m + d2*n of the backing matrix, which is also the
/// column-major vectorization of the last two axes.
class ComplexTensor3
{
public:
    ComplexTensor3() = default;
    ComplexTensor3(Eigen::Index d1, Eigen::Index d2, Eigen::Index d3)
        : d2_(d2), d3_(d3), data_(ComplexMatrix::Zero(d1, d2 * d3))
    {
        if (d1 < 1 || d2 < 1 || d3 < 1)
            throw std::invalid_argument("ComplexTensor3: all dimensions must be positive.");
    }

    Eigen::Index dim1() const { return data_.rows(); }
    Eigen::Index dim2() const { return d2_; }
    Eigen::Index dim3() const { return d3_; }

    auto fiber(Eigen::Index m, Eigen::Index n) { return data_.col(m + d2_ * n); }
    auto fiber(Eigen::Index m, Eigen::Index n) const { return data_.col(m + d2_ * n); }

    cd &operator()(Eigen::Index i, Eigen::Index m, Eigen::Index n) { return data_(i, m + d2_ * n); }
    cd operator()(Eigen::Index i, Eigen::Index m, Eigen::Index n) const { return data_(i, m + d2_ * n); }

    /// d1 x (d2*d3) view, columns in vec order of the last two axes.
    const ComplexMatrix &unfolded() const { return data_; }
    ComplexMatrix &unfolded() { return data_; }

private:
    Eigen::Index d2_ = 0, d3_ = 0;
    ComplexMatrix data_;
};

/// Unitary DFT matrix, entry (r, c) = exp(-j 2 pi r c / M) / sqrt(M).
inline ComplexMatrix dft_matrix(int M)
{
    if (M < 1)
        throw std::invalid_argument("dft_matrix: size must be at least 1, got " + std::to_string(M) + ".");
    ComplexMatrix F(M, M);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    for (int r = 0; r < M; ++r)
        for (int c = 0; c < M; ++c)
            F(r, c) = scale * cis2pi(-static_cast<double>((static_cast<long long>(r) * c) % M) / M);
    return F;
}

/// Delay-Doppler to time-frequency: F_M X F_N^H.
inline ComplexMatrix isfft(const ComplexMatrix &X)
{
    if (X.size() == 0)
        throw std::invalid_argument("isfft: empty input.");
    return dft_matrix(static_cast<int>(X.rows())) * X * dft_matrix(static_cast<int>(X.cols())).adjoint();
}

/// Time-frequency to delay-Doppler: F_M^H Y F_N.
inline ComplexMatrix sfft(const ComplexMatrix &Ytf)
{
    if (Ytf.size() == 0)
        throw std::invalid_argument("sfft: empty input.");
    return dft_matrix(static_cast<int>(Ytf.rows())).adjoint() * Ytf * dft_matrix(static_cast<int>(Ytf.cols()));
}

/// Column stacking: result[n*M + m] = X(m, n).
inline ComplexVector vec(const ComplexMatrix &X)
{
    return Eigen::Map<const ComplexVector>(X.data(), X.size());
}

inline ComplexMatrix vec_inv(const ComplexVector &x, int M, int N)
{
    if (M < 1 || N < 1 || x.size() != static_cast<Eigen::Index>(M) * N)
        throw std::invalid_argument("vec_inv: vector length " + std::to_string(x.size()) +
                                    " does not match " + std::to_string(M) + "x" + std::to_string(N) + ".");
    return Eigen::Map<const ComplexMatrix>(x.data(), M, N);
}

/// Dirichlet kernel S_M(x) = (1/M) sum_{m<M} exp(j 2 pi m x / M).
/// Closed form away from x = 0 (mod M); the direct sum near the removable singularities.
inline cd dirichlet(int M, double x)
{
    if (M < 1)
        throw std::invalid_argument("dirichlet: M must be at least 1.");
    const double den = std::sin(pi * x / M);
    if (std::abs(den) < 1e-9)
    {
        cd acc = 0.0;
        for (int m = 0; m < M; ++m)
            acc += cis2pi(m * x / M);
        return acc / static_cast<double>(M);
    }
    return (std::sin(pi * x) / (M * den)) * std::polar(1.0, pi * (M - 1) * x / M);
}

} // namespace otfs
