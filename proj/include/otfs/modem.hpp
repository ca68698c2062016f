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

#include "numerics.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace otfs
{

enum class Variant
{
    RCP, // one cyclic prefix per subframe
    CP   // one cyclic prefix per column (OFDM overlay)
};

enum class Modulation
{
    QPSK,
    QAM16,
    QAM64
};

inline int bits_per_symbol(Modulation mod)
{
    switch (mod)
    {
    case Modulation::QPSK:
        return 2;
    case Modulation::QAM16:
        return 4;
    case Modulation::QAM64:
        return 6;
    }
    throw std::invalid_argument("bits_per_symbol: unknown modulation.");
}

inline int constellation_size(Modulation mod) { return 1 << bits_per_symbol(mod); }

inline std::string to_string(Variant v) { return v == Variant::RCP ? "rcp" : "cp"; }

inline std::string to_string(Modulation mod)
{
    switch (mod)
    {
    case Modulation::QPSK:
        return "qpsk";
    case Modulation::QAM16:
        return "16qam";
    case Modulation::QAM64:
        return "64qam";
    }
    return "unknown";
}

inline Variant parse_variant(std::string_view s)
{
    if (s == "rcp" || s == "RCP")
        return Variant::RCP;
    if (s == "cp" || s == "CP")
        return Variant::CP;
    throw std::invalid_argument("unknown OTFS variant '" + std::string(s) + "' (expected rcp or cp).");
}

inline Modulation parse_modulation(std::string_view s)
{
    if (s == "qpsk" || s == "QPSK")
        return Modulation::QPSK;
    if (s == "16qam" || s == "QAM16" || s == "qam16")
        return Modulation::QAM16;
    if (s == "64qam" || s == "QAM64" || s == "qam64")
        return Modulation::QAM64;
    throw std::invalid_argument("unknown modulation '" + std::string(s) + "'.");
}

/// Frame geometry and waveform options.
struct OtfsConfig
{
    int M = 64;                  // delay bins
    int N = 14;                  // Doppler bins
    double delta_f = 15e3;       // subcarrier spacing [Hz]
    double carrier_freq = 4e9;   // [Hz]
    Variant variant = Variant::RCP;
    int n_cp = 8;                // CP length in samples
    Modulation modulation = Modulation::QPSK;

    void validate() const
    {
        if (M < 2 || N < 2)
            throw std::invalid_argument("OtfsConfig: M and N must be at least 2.");
        if (n_cp < 0)
            throw std::invalid_argument("OtfsConfig: n_cp must be non-negative.");
        if (!(delta_f > 0.0) || !(carrier_freq > 0.0))
            throw std::invalid_argument("OtfsConfig: delta_f and carrier_freq must be positive.");
    }

    /// Samples per subframe including prefixes.
    int stream_length() const
    {
        return variant == Variant::RCP ? M * N + n_cp : (M + n_cp) * N;
    }
};

using BitVector = std::vector<std::uint8_t>;

// Gray labeling: the first half of each label drives I, the second half Q.
// Per axis, a Gray code g of b bits maps to amplitude (L-1) - 2*binary(g), L = 2^b,
// so bit 0 maps to the positive half-plane. Label index = bits read MSB first.

namespace detail
{
inline int gray_to_binary(int g)
{
    int b = 0;
    for (; g; g >>= 1)
        b ^= g;
    return b;
}

inline double axis_norm(int levels)
{
    // mean |x|^2 of a square QAM with 'levels' points per axis is 2*(L^2-1)/3
    return std::sqrt(2.0 * (levels * levels - 1) / 3.0);
}
} // namespace detail

/// Constellation points indexed by label (bits MSB first), unit average energy.
inline std::vector<cd> constellation(Modulation mod)
{
    const int k = bits_per_symbol(mod);
    const int half = k / 2;
    const int levels = 1 << half;
    const double norm = detail::axis_norm(levels);
    std::vector<cd> pts(static_cast<std::size_t>(1) << k);
    for (int label = 0; label < (1 << k); ++label)
    {
        const int gi = label >> half;
        const int gq = label & (levels - 1);
        const double re = (levels - 1) - 2.0 * detail::gray_to_binary(gi);
        const double im = (levels - 1) - 2.0 * detail::gray_to_binary(gq);
        pts[label] = cd(re, im) / norm;
    }
    return pts;
}

inline std::vector<cd> qam_map(std::span<const std::uint8_t> bits, Modulation mod)
{
    const int k = bits_per_symbol(mod);
    if (bits.size() % k != 0)
        throw std::invalid_argument("qam_map: bit count " + std::to_string(bits.size()) +
                                    " is not a multiple of " + std::to_string(k) + ".");
    const auto pts = constellation(mod);
    std::vector<cd> out(bits.size() / k);
    for (std::size_t s = 0; s < out.size(); ++s)
    {
        int label = 0;
        for (int b = 0; b < k; ++b)
            label = (label << 1) | (bits[s * k + b] & 1);
        out[s] = pts[label];
    }
    return out;
}

/// Index of the nearest constellation point; ties go to the lowest index.
inline int nearest_label(cd x, const std::vector<cd> &pts)
{
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(pts.size()); ++i)
    {
        const double d = std::norm(x - pts[i]);
        if (d < best_d)
        {
            best_d = d;
            best = i;
        }
    }
    return best;
}

inline BitVector qam_demap_nearest(std::span<const cd> symbols, Modulation mod)
{
    const int k = bits_per_symbol(mod);
    const auto pts = constellation(mod);
    BitVector bits(symbols.size() * k);
    for (std::size_t s = 0; s < symbols.size(); ++s)
    {
        const int label = nearest_label(symbols[s], pts);
        for (int b = 0; b < k; ++b)
            bits[s * k + b] = static_cast<std::uint8_t>((label >> (k - 1 - b)) & 1);
    }
    return bits;
}

/// Nearest-neighbour quantizer Q(.) applied elementwise.
inline ComplexMatrix quantize(const ComplexMatrix &X, Modulation mod)
{
    const auto pts = constellation(mod);
    ComplexMatrix out(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.size(); ++i)
        out(i) = pts[nearest_label(X(i), pts)];
    return out;
}

/// Rectangular-pulse OTFS transmitter: S = X F_N^H, s = vec(S), plus cyclic prefix(es).
inline ComplexVector modulate(const ComplexMatrix &X, const OtfsConfig &cfg)
{
    if (X.rows() != cfg.M || X.cols() != cfg.N)
        throw std::invalid_argument("modulate: grid is " + std::to_string(X.rows()) + "x" +
                                    std::to_string(X.cols()) + ", config expects " +
                                    std::to_string(cfg.M) + "x" + std::to_string(cfg.N) + ".");
    const ComplexMatrix S = X * dft_matrix(cfg.N).adjoint();
    const int M = cfg.M, N = cfg.N, cp = cfg.n_cp;
    ComplexVector out(cfg.stream_length());
    if (cfg.variant == Variant::RCP)
    {
        if (cp > M * N)
            throw std::invalid_argument("modulate: CP longer than the subframe.");
        const ComplexVector s = vec(S);
        out.head(cp) = s.tail(cp);
        out.tail(M * N) = s;
    }
    else
    {
        if (cp > M)
            throw std::invalid_argument("modulate: per-column CP longer than a column.");
        for (int n = 0; n < N; ++n)
        {
            auto block = out.segment(static_cast<Eigen::Index>(n) * (M + cp), M + cp);
            block.head(cp) = S.col(n).tail(cp);
            block.tail(M) = S.col(n);
        }
    }
    return out;
}

/// Drops the prefix(es) and returns the MN core samples in transmit order.
inline ComplexVector remove_cp(const ComplexVector &r, const OtfsConfig &cfg)
{
    const int M = cfg.M, N = cfg.N, cp = cfg.n_cp;
    if (r.size() != cfg.stream_length())
        throw std::invalid_argument("remove_cp: stream has " + std::to_string(r.size()) +
                                    " samples, expected " + std::to_string(cfg.stream_length()) + ".");
    if (cfg.variant == Variant::RCP)
        return r.tail(static_cast<Eigen::Index>(M) * N);
    ComplexVector core(static_cast<Eigen::Index>(M) * N);
    for (int n = 0; n < N; ++n)
        core.segment(static_cast<Eigen::Index>(n) * M, M) =
            r.segment(static_cast<Eigen::Index>(n) * (M + cp) + cp, M);
    return core;
}

/// Wigner transform followed by SFFT with rectangular pulses: Y = vec^-1(r) F_N.
inline ComplexMatrix demodulate(const ComplexVector &r, const OtfsConfig &cfg)
{
    if (r.size() != cfg.stream_length())
        throw std::invalid_argument("demodulate: expected a stream of " +
                                    std::to_string(cfg.stream_length()) + " samples for variant " +
                                    to_string(cfg.variant) + ", got " + std::to_string(r.size()) + ".");
    return vec_inv(remove_cp(r, cfg), cfg.M, cfg.N) * dft_matrix(cfg.N);
}

} // namespace otfs
