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

#include "modem.hpp"

#include <random>

namespace otfs
{

enum class PilotKind
{
    Blockwise, // random constellation symbols on a centred block of delay rows
    SpikeGuard // one high-power spike, zero guards elsewhere in the block
};

inline std::string to_string(PilotKind k) { return k == PilotKind::Blockwise ? "blockwise" : "spike"; }

using PilotMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct PilotPattern
{
    PilotKind kind = PilotKind::Blockwise;
    PilotMask mask;            // M x N, true = pilot or guard
    int rows = 0;              // delay rows occupied, spanning the full Doppler axis
    int block_start_row = 0;
    int spike_row = -1;        // SpikeGuard only
    int spike_col = -1;
    double spike_power_db = 0.0;

    int M() const { return static_cast<int>(mask.rows()); }
    int N() const { return static_cast<int>(mask.cols()); }
    Eigen::Index count() const { return mask.count(); }

    /// eta = |Omega| / (MN)
    double overhead() const { return static_cast<double>(count()) / static_cast<double>(mask.size()); }

    double spike_amplitude() const { return std::pow(10.0, spike_power_db / 20.0); }

    /// Delay rows whose every Doppler bin is a known (pilot or guard) symbol.
    std::vector<int> known_rows() const
    {
        std::vector<int> out;
        for (int l = 0; l < M(); ++l)
            if (mask.row(l).all())
                out.push_back(l);
        return out;
    }
};

namespace detail
{
inline PilotPattern block_support(const OtfsConfig &cfg, int n_pilot_rows)
{
    if (n_pilot_rows < 1 || n_pilot_rows > cfg.M)
        throw std::invalid_argument("pilot pattern: rows must lie in [1, M], got " +
                                    std::to_string(n_pilot_rows) + ".");
    PilotPattern p;
    p.rows = n_pilot_rows;
    p.block_start_row = (cfg.M - n_pilot_rows) / 2;
    p.mask = PilotMask::Constant(cfg.M, cfg.N, false);
    p.mask.middleRows(p.block_start_row, n_pilot_rows).setConstant(true);
    return p;
}
} // namespace detail

/// Rows [r0, r0 + rows) across all Doppler bins, r0 = floor((M - rows) / 2).
inline PilotPattern blockwise_mask(const OtfsConfig &cfg, int n_pilot_rows)
{
    auto p = detail::block_support(cfg, n_pilot_rows);
    p.kind = PilotKind::Blockwise;
    return p;
}

/// Same support as the blockwise block; the spike sits at (r0 + rows/2, N/2) and the guards
/// count toward the overhead.
inline PilotPattern spike_mask(const OtfsConfig &cfg, int n_pilot_rows, double spike_power_db)
{
    auto p = detail::block_support(cfg, n_pilot_rows);
    p.kind = PilotKind::SpikeGuard;
    p.spike_row = p.block_start_row + n_pilot_rows / 2;
    p.spike_col = cfg.N / 2;
    p.spike_power_db = spike_power_db;
    return p;
}

struct FramePlan
{
    ComplexMatrix X;       // transmitted grid
    PilotMask mask;        // Omega
    ComplexMatrix X_train; // Omega .* X
    ComplexMatrix X_test;  // (1 - Omega) .* X
    BitVector bits;        // data bits, in data-position order
    std::vector<std::pair<int, int>> data_positions; // (l, k), column-major order

    Eigen::Index n_data() const { return static_cast<Eigen::Index>(data_positions.size()); }
};

/// Data positions in vec order (k outer, l inner).
inline std::vector<std::pair<int, int>> data_positions(const PilotMask &mask)
{
    std::vector<std::pair<int, int>> pos;
    for (int k = 0; k < mask.cols(); ++k)
        for (int l = 0; l < mask.rows(); ++l)
            if (!mask(l, k))
                pos.emplace_back(l, k);
    return pos;
}

inline FramePlan assemble_frame(const BitVector &bits, const PilotPattern &pattern, const OtfsConfig &cfg,
                                std::uint64_t seed)
{
    if (pattern.M() != cfg.M || pattern.N() != cfg.N)
        throw std::invalid_argument("assemble_frame: pilot mask shape does not match the config.");
    FramePlan plan;
    plan.mask = pattern.mask;
    plan.data_positions = data_positions(pattern.mask);
    const std::size_t bps = bits_per_symbol(cfg.modulation);
    if (bits.size() != plan.data_positions.size() * bps)
        throw std::invalid_argument("assemble_frame: got " + std::to_string(bits.size()) + " bits, frame carries " +
                                    std::to_string(plan.data_positions.size() * bps) + ".");
    plan.bits = bits;
    plan.X = ComplexMatrix::Zero(cfg.M, cfg.N);
    const auto symbols = qam_map(bits, cfg.modulation);
    for (std::size_t i = 0; i < symbols.size(); ++i)
        plan.X(plan.data_positions[i].first, plan.data_positions[i].second) = symbols[i];

    if (pattern.kind == PilotKind::Blockwise)
    {
        const auto pts = constellation(cfg.modulation);
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(pts.size()) - 1);
        for (int k = 0; k < cfg.N; ++k)
            for (int l = 0; l < cfg.M; ++l)
                if (pattern.mask(l, k))
                    plan.X(l, k) = pts[pick(rng)];
    }
    else
    {
        plan.X(pattern.spike_row, pattern.spike_col) = pattern.spike_amplitude();
    }
    const auto m = pattern.mask.cast<double>().matrix().cast<cd>();
    plan.X_train = plan.X.cwiseProduct(m);
    plan.X_test = plan.X - plan.X_train;
    return plan;
}

/// Draws the data bits for a frame with the given pattern.
template <class Rng>
BitVector random_bits(const PilotPattern &pattern, Modulation mod, Rng &rng)
{
    const std::size_t n = static_cast<std::size_t>(pattern.mask.size() - pattern.count()) * bits_per_symbol(mod);
    std::bernoulli_distribution coin(0.5);
    BitVector bits(n);
    for (auto &b : bits)
        b = coin(rng) ? 1 : 0;
    return bits;
}

/// Symbols at data positions, in data-position order.
inline std::vector<cd> extract_data(const ComplexMatrix &X, const std::vector<std::pair<int, int>> &positions)
{
    std::vector<cd> out;
    out.reserve(positions.size());
    for (const auto &[l, k] : positions)
        out.push_back(X(l, k));
    return out;
}

/// Peak-to-average power ratio in dB.
inline double papr(const ComplexVector &s)
{
    if (s.size() == 0)
        throw std::invalid_argument("papr: empty stream.");
    const double peak = s.cwiseAbs2().maxCoeff();
    const double mean = s.cwiseAbs2().mean();
    return 10.0 * std::log10(peak / mean);
}

} // namespace otfs
