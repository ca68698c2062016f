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

// P-path doubly dispersive channel h(tau, nu) = sum_i h_i delta(tau - tau_i) delta(nu - nu_i)
// with normalized delay ell_i = tau_i M df and Doppler kappa_i = nu_i N T.
//
// Three independent routes to the received delay-Doppler grid:
//   * sample level   apply_time_rcp / apply_time_cp (DFT-domain fractional delay)
//   * matrix oracle  oracle_rcp, H = sum_i h_i Pi_{ell_i} Delta_{kappa_i}
//   * DD kernel      effective_channel_rcp / effective_channel_cp + apply_dd

#include "modem.hpp"
#include "numerics.hpp"

#include <unsupported/Eigen/FFT>

#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

namespace otfs
{

struct Path
{
    cd gain{1.0, 0.0};
    double delay = 0.0;   // ell_i, in samples
    double doppler = 0.0; // kappa_i, in Doppler bins
};

struct PathChannel
{
    std::vector<Path> paths;

    std::size_t size() const { return paths.size(); }

    void validate(int M) const
    {
        if (paths.empty())
            throw std::invalid_argument("PathChannel: at least one path is required.");
        for (const auto &p : paths)
        {
            if (!std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag()) ||
                !std::isfinite(p.delay) || !std::isfinite(p.doppler))
                throw std::invalid_argument("PathChannel: non-finite path parameter.");
            if (p.delay < 0.0 || p.delay >= M)
                throw std::invalid_argument("PathChannel: delay " + std::to_string(p.delay) +
                                            " outside [0, M).");
        }
    }

    double max_delay() const
    {
        double m = 0.0;
        for (const auto &p : paths)
            m = std::max(m, p.delay);
        return m;
    }

    PathChannel scaled(cd a) const
    {
        PathChannel out = *this;
        for (auto &p : out.paths)
            p.gain *= a;
        return out;
    }
};

/// Text record: header line, path count, then "re im delay doppler" per path.
inline std::string to_text(const PathChannel &chan)
{
    std::ostringstream os;
    os << "# otfs path channel v1\n" << chan.size() << '\n' << std::setprecision(17);
    for (const auto &p : chan.paths)
        os << p.gain.real() << ' ' << p.gain.imag() << ' ' << p.delay << ' ' << p.doppler << '\n';
    return os.str();
}

inline PathChannel path_channel_from_text(const std::string &text)
{
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    if (line.rfind("# otfs path channel", 0) != 0)
        throw std::invalid_argument("path channel record: missing header line.");
    std::size_t count = 0;
    if (!(is >> count))
        throw std::invalid_argument("path channel record: missing path count.");
    PathChannel chan;
    for (std::size_t i = 0; i < count; ++i)
    {
        double re, im, d, k;
        if (!(is >> re >> im >> d >> k))
            throw std::invalid_argument("path channel record: truncated at path " + std::to_string(i) + ".");
        chan.paths.push_back({cd(re, im), d, k});
    }
    return chan;
}

/// Randomization used by the experiments: complex Gaussian gains normalized to unit
/// total power, delays uniform on [0, max_delay], Dopplers uniform on [-max_doppler, max_doppler].
struct ChannelSpec
{
    int paths = 3;
    double max_delay = 2.0;
    double max_doppler = 0.5;
    bool integer_delay = false;
    bool integer_doppler = false;

    void validate(int M) const
    {
        if (paths < 1)
            throw std::invalid_argument("ChannelSpec: paths must be at least 1.");
        if (max_delay < 0.0 || max_delay >= M)
            throw std::invalid_argument("ChannelSpec: max_delay must lie in [0, M).");
        if (max_doppler < 0.0)
            throw std::invalid_argument("ChannelSpec: max_doppler must be non-negative.");
    }
};

template <class Rng>
PathChannel random_channel(const ChannelSpec &spec, Rng &rng)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PathChannel chan;
    double power = 0.0;
    for (int i = 0; i < spec.paths; ++i)
    {
        Path p;
        p.gain = cd(gauss(rng), gauss(rng));
        power += std::norm(p.gain);
        if (spec.integer_delay)
            p.delay = std::floor(unit(rng) * (std::floor(spec.max_delay) + 1.0));
        else
            p.delay = unit(rng) * spec.max_delay;
        if (spec.integer_doppler)
        {
            const double kmax = std::floor(spec.max_doppler);
            p.doppler = std::floor(unit(rng) * (2.0 * kmax + 1.0)) - kmax;
        }
        else
            p.doppler = (2.0 * unit(rng) - 1.0) * spec.max_doppler;
        chan.paths.push_back(p);
    }
    const double g = 1.0 / std::sqrt(power);
    for (auto &p : chan.paths)
        p.gain *= g;
    return chan;
}

/// Normalized Doppler kappa = nu N / df for a terminal moving at the given speed.
inline double doppler_bins_from_speed(double speed_kmh, const OtfsConfig &cfg)
{
    const double nu = speed_kmh / 3.6 * cfg.carrier_freq / 299792458.0;
    return nu * cfg.N / cfg.delta_f;
}

// ------------------------------------------------------------------------
// Matrix oracle

/// Pi_ell = F_MN^H D_MN(ell) F_MN with D_MN(x) = diag(z^{-x r}), z = exp(j 2 pi / MN).
/// The product is circulant, so it is assembled from its first column F^H D F e_0.
inline ComplexMatrix delay_operator(double ell, int MN)
{
    if (MN < 1)
        throw std::invalid_argument("delay_operator: MN must be at least 1.");
    const ComplexMatrix F = dft_matrix(MN);
    ComplexVector d(MN);
    for (int r = 0; r < MN; ++r)
        d(r) = cis2pi(-ell * r / MN);
    const ComplexVector first = F.adjoint() * (d.asDiagonal() * F.col(0));
    ComplexMatrix Pi(MN, MN);
    for (int c = 0; c < MN; ++c)
        for (int t = 0; t < MN; ++t)
            Pi(t, c) = first(mod(t - c, MN));
    return Pi;
}

/// Delta_kappa = D_MN(-kappa) = diag(z^{kappa r}).
inline ComplexMatrix doppler_operator(double kappa, int MN)
{
    if (MN < 1)
        throw std::invalid_argument("doppler_operator: MN must be at least 1.");
    ComplexVector d(MN);
    for (int r = 0; r < MN; ++r)
        d(r) = cis2pi(kappa * r / MN);
    return d.asDiagonal();
}

struct TimeChannelOracle
{
    ComplexMatrix H_time; // MN x MN
};

inline constexpr int oracle_max_mn = 4096;

inline TimeChannelOracle oracle_rcp(const PathChannel &chan, const OtfsConfig &cfg)
{
    const int MN = cfg.M * cfg.N;
    if (MN > oracle_max_mn)
        throw std::invalid_argument("oracle_rcp: MN = " + std::to_string(MN) +
                                    " exceeds the dense oracle limit of " + std::to_string(oracle_max_mn) + ".");
    chan.validate(cfg.M);
    TimeChannelOracle out{ComplexMatrix::Zero(MN, MN)};
    for (const auto &p : chan.paths)
    {
        // Pi * Delta scales column c of Pi by z^{kappa c}
        ComplexMatrix term = delay_operator(p.delay, MN);
        for (int c = 0; c < MN; ++c)
            term.col(c) *= p.gain * cis2pi(p.doppler * c / MN);
        out.H_time += term;
    }
    return out;
}

/// OTFS modulation matrix O = F_N kron I_M.
inline ComplexMatrix otfs_modulation_matrix(int M, int N)
{
    const ComplexMatrix FN = dft_matrix(N);
    ComplexMatrix O = ComplexMatrix::Zero(static_cast<Eigen::Index>(M) * N, static_cast<Eigen::Index>(M) * N);
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c)
            O.block(static_cast<Eigen::Index>(r) * M, static_cast<Eigen::Index>(c) * M, M, M).diagonal().setConstant(FN(r, c));
    return O;
}

/// Dense delay-Doppler map O H O^H.
inline ComplexMatrix oracle_dd_matrix(const TimeChannelOracle &oracle, const OtfsConfig &cfg)
{
    const ComplexMatrix O = otfs_modulation_matrix(cfg.M, cfg.N);
    return O * oracle.H_time * O.adjoint();
}

/// vec^-1(O H O^H vec(X)), evaluated without forming the product.
inline ComplexMatrix oracle_apply_dd(const TimeChannelOracle &oracle, const ComplexMatrix &X, const OtfsConfig &cfg)
{
    const ComplexMatrix FN = dft_matrix(cfg.N);
    const ComplexVector s = vec(X * FN.adjoint()); // O^H x
    const ComplexVector r = oracle.H_time * s;
    return vec_inv(r, cfg.M, cfg.N) * FN; // O r
}

// ------------------------------------------------------------------------
// Effective delay-Doppler kernel H_{l,k}[l', k']

class EffectiveChannel
{
public:
    using RowFn = std::function<void(int l, int k, cd *out)>;

    /// Dense, zero-initialized kernel.
    EffectiveChannel(int M, int N, Variant variant)
        : M_(M), N_(N), variant_(variant),
          dense_(static_cast<std::size_t>(M) * N * M * N, cd(0.0))
    {
        if (M < 1 || N < 1)
            throw std::invalid_argument("EffectiveChannel: dimensions must be positive.");
    }

    /// Lazily evaluated kernel; rows are produced on demand.
    EffectiveChannel(int M, int N, Variant variant, RowFn row_fn)
        : M_(M), N_(N), variant_(variant), row_fn_(std::move(row_fn))
    {
    }

    int M() const { return M_; }
    int N() const { return N_; }
    Variant variant() const { return variant_; }
    bool is_dense() const { return !dense_.empty(); }

    cd &at(int l, int k, int lp, int kp)
    {
        if (!is_dense())
            throw std::logic_error("EffectiveChannel: mutable access needs dense storage.");
        return dense_[index(l, k, lp, kp)];
    }

    cd at(int l, int k, int lp, int kp) const
    {
        if (is_dense())
            return dense_[index(l, k, lp, kp)];
        std::vector<cd> r(static_cast<std::size_t>(M_) * N_);
        row_fn_(l, k, r.data());
        return r[static_cast<std::size_t>(lp) * N_ + kp];
    }

    /// Writes H_{l,k}[l', k'] to out[l' * N + k'].
    void row(int l, int k, cd *out) const
    {
        if (is_dense())
            std::copy_n(dense_.begin() + static_cast<std::ptrdiff_t>(index(l, k, 0, 0)),
                        static_cast<std::size_t>(M_) * N_, out);
        else
            row_fn_(l, k, out);
    }

    EffectiveChannel materialized() const
    {
        if (is_dense())
            return *this;
        EffectiveChannel out(M_, N_, variant_);
        for (int l = 0; l < M_; ++l)
            for (int k = 0; k < N_; ++k)
                row_fn_(l, k, &out.dense_[out.index(l, k, 0, 0)]);
        return out;
    }

private:
    std::size_t index(int l, int k, int lp, int kp) const
    {
        return ((static_cast<std::size_t>(l) * N_ + k) * M_ + lp) * N_ + kp;
    }

    int M_, N_;
    Variant variant_;
    std::vector<cd> dense_;
    RowFn row_fn_;
};

enum class KernelStorage
{
    Auto,
    Dense,
    Lazy
};

namespace detail
{
inline constexpr std::size_t dense_kernel_limit = std::size_t(1) << 22;

inline bool use_dense(KernelStorage s, int M, int N)
{
    if (s == KernelStorage::Auto)
        return static_cast<std::size_t>(M) * N * M * N <= dense_kernel_limit;
    return s == KernelStorage::Dense;
}

// Adds one path's fractional RCP kernel row (l, k) into out.
inline void rcp_row(const Path &p, int M, int N, int l, int k, const std::vector<cd> &sm,
                    const std::vector<cd> &sn, cd *out)
{
    const double MN = static_cast<double>(M) * N;
    const cd alpha_wrap = cis2pi(-static_cast<double>(k) / N);
    for (int lp = 0; lp < M; ++lp)
    {
        const cd alpha = l < lp ? alpha_wrap : cd(1.0);
        const cd coef = p.gain * alpha * cis2pi((k * (lp - p.delay) + p.doppler * mod(l - lp, M)) / MN) * sm[lp];
        for (int kp = 0; kp < N; ++kp)
            out[static_cast<std::size_t>(lp) * N + kp] += coef * sn[kp];
    }
}

inline void cp_row(const Path &p, int M, int N, int n_cp, int l, const std::vector<cd> &sm,
                   const std::vector<cd> &sn, cd *out)
{
    const cd coef0 = p.gain * cis2pi(p.doppler * (n_cp + l - p.delay) / (static_cast<double>(N) * (M + n_cp)));
    for (int lp = 0; lp < M; ++lp)
    {
        const cd coef = coef0 * sm[lp];
        for (int kp = 0; kp < N; ++kp)
            out[static_cast<std::size_t>(lp) * N + kp] += coef * sn[kp];
    }
}

struct PathTables
{
    std::vector<cd> sm, sn; // S_M(l' - ell), S_N(kappa - k')
};

inline std::vector<PathTables> path_tables(const PathChannel &chan, int M, int N)
{
    std::vector<PathTables> t;
    for (const auto &p : chan.paths)
    {
        PathTables pt{std::vector<cd>(M), std::vector<cd>(N)};
        for (int lp = 0; lp < M; ++lp)
            pt.sm[lp] = dirichlet(M, lp - p.delay);
        for (int kp = 0; kp < N; ++kp)
            pt.sn[kp] = dirichlet(N, p.doppler - kp);
        t.push_back(std::move(pt));
    }
    return t;
}
} // namespace detail

/// RCP kernel, fractional delay and Doppler:
/// H_{l,k}[l',k'] = sum_i h_i alpha_{l'}[l,k] z^{k(l'-ell_i) + kappa_i <l-l'>_M} S_M(l'-ell_i) S_N(kappa_i-k'),
/// alpha_{l'}[l,k] = exp(-j 2 pi k / N) for l < l', 1 otherwise; z = exp(j 2 pi / MN).
inline EffectiveChannel effective_channel_rcp(const PathChannel &chan, const OtfsConfig &cfg,
                                              KernelStorage storage = KernelStorage::Auto)
{
    chan.validate(cfg.M);
    const int M = cfg.M, N = cfg.N;
    auto tables = detail::path_tables(chan, M, N);
    auto row_fn = [chan, tables, M, N](int l, int k, cd *out)
    {
        std::fill_n(out, static_cast<std::size_t>(M) * N, cd(0.0));
        for (std::size_t i = 0; i < chan.size(); ++i)
            detail::rcp_row(chan.paths[i], M, N, l, k, tables[i].sm, tables[i].sn, out);
    };
    if (!detail::use_dense(storage, M, N))
        return EffectiveChannel(M, N, Variant::RCP, row_fn);
    EffectiveChannel H(M, N, Variant::RCP);
    for (int l = 0; l < M; ++l)
        for (int k = 0; k < N; ++k)
            row_fn(l, k, &H.at(l, k, 0, 0));
    return H;
}

/// CP kernel: H_l[l',k'] = sum_i h_i zt^{kappa_i (N_cp + l - ell_i)} S_M(l'-ell_i) S_N(kappa_i-k'),
/// zt = exp(j 2 pi / (N (M + N_cp))); independent of k.
inline EffectiveChannel effective_channel_cp(const PathChannel &chan, const OtfsConfig &cfg,
                                             KernelStorage storage = KernelStorage::Auto)
{
    chan.validate(cfg.M);
    const int M = cfg.M, N = cfg.N, n_cp = cfg.n_cp;
    auto tables = detail::path_tables(chan, M, N);
    auto row_fn = [chan, tables, M, N, n_cp](int l, int, cd *out)
    {
        std::fill_n(out, static_cast<std::size_t>(M) * N, cd(0.0));
        for (std::size_t i = 0; i < chan.size(); ++i)
            detail::cp_row(chan.paths[i], M, N, n_cp, l, tables[i].sm, tables[i].sn, out);
    };
    if (!detail::use_dense(storage, M, N))
        return EffectiveChannel(M, N, Variant::CP, row_fn);
    EffectiveChannel H(M, N, Variant::CP);
    std::vector<cd> buf(static_cast<std::size_t>(M) * N);
    for (int l = 0; l < M; ++l)
    {
        row_fn(l, 0, buf.data());
        for (int k = 0; k < N; ++k)
            std::copy(buf.begin(), buf.end(), &H.at(l, k, 0, 0));
    }
    return H;
}

inline EffectiveChannel effective_channel(const PathChannel &chan, const OtfsConfig &cfg,
                                          KernelStorage storage = KernelStorage::Auto)
{
    return cfg.variant == Variant::RCP ? effective_channel_rcp(chan, cfg, storage)
                                       : effective_channel_cp(chan, cfg, storage);
}

/// Integer tap of an integer-valued channel; doppler is signed.
struct IntegerTap
{
    cd gain{1.0, 0.0};
    int delay = 0;
    int doppler = 0;
};

/// Integer-only RCP relation: Y[l,k] = sum_i h_i z^{k_i <l-l_i>_M} alpha_{l_i}[l,k] X[<l-l_i>, <k-k_i>].
inline EffectiveChannel integer_kernel_rcp(const std::vector<IntegerTap> &taps, int M, int N)
{
    EffectiveChannel H(M, N, Variant::RCP);
    const double MN = static_cast<double>(M) * N;
    for (const auto &t : taps)
    {
        const int lp = mod(t.delay, M), kp = mod(t.doppler, N);
        for (int l = 0; l < M; ++l)
            for (int k = 0; k < N; ++k)
            {
                const cd alpha = l < t.delay ? cis2pi(-static_cast<double>(k) / N) : cd(1.0);
                H.at(l, k, lp, kp) += t.gain * cis2pi(t.doppler * mod(l - t.delay, M) / MN) * alpha;
            }
    }
    return H;
}

/// Integer-only CP relation: Y[l,k] = sum_i h_i zt^{k_i (N_cp + l - l_i)} X[<l-l_i>, <k-k_i>].
inline EffectiveChannel integer_kernel_cp(const std::vector<IntegerTap> &taps, int M, int N, int n_cp)
{
    EffectiveChannel H(M, N, Variant::CP);
    const double denom = static_cast<double>(N) * (M + n_cp);
    for (const auto &t : taps)
    {
        const int lp = mod(t.delay, M), kp = mod(t.doppler, N);
        for (int l = 0; l < M; ++l)
            for (int k = 0; k < N; ++k)
                H.at(l, k, lp, kp) += t.gain * cis2pi(t.doppler * static_cast<double>(n_cp + l - t.delay) / denom);
    }
    return H;
}

/// Y[l,k] = sum_{l',k'} H_{l,k}[l',k'] X[<l-l'>_M, <k-k'>_N].
inline ComplexMatrix apply_dd(const ComplexMatrix &X, const EffectiveChannel &H)
{
    const int M = H.M(), N = H.N();
    if (X.rows() != M || X.cols() != N)
        throw std::invalid_argument("apply_dd: grid is " + std::to_string(X.rows()) + "x" +
                                    std::to_string(X.cols()) + ", kernel is " + std::to_string(M) +
                                    "x" + std::to_string(N) + ".");
    ComplexMatrix Y(M, N);
    std::vector<cd> row(static_cast<std::size_t>(M) * N);
    for (int l = 0; l < M; ++l)
        for (int k = 0; k < N; ++k)
        {
            H.row(l, k, row.data());
            cd acc = 0.0;
            for (int lp = 0; lp < M; ++lp)
            {
                const int ls = mod(l - lp, M);
                const cd *r = &row[static_cast<std::size_t>(lp) * N];
                for (int kp = 0; kp < N; ++kp)
                    acc += r[kp] * X(ls, mod(k - kp, N));
            }
            Y(l, k) = acc;
        }
    return Y;
}

// ------------------------------------------------------------------------
// Sample-level channels

namespace detail
{
/// Circular fractional delay F^H D(ell) F x over the length of x.
inline ComplexVector circular_fractional_delay(const ComplexVector &x, double ell, Eigen::FFT<double> &fft)
{
    const Eigen::Index L = x.size();
    std::vector<cd> in(x.data(), x.data() + L), freq, out;
    fft.fwd(freq, in);
    for (Eigen::Index r = 0; r < L; ++r)
        freq[r] *= cis2pi(-ell * static_cast<double>(r) / static_cast<double>(L));
    fft.inv(out, freq);
    return Eigen::Map<ComplexVector>(out.data(), L);
}
} // namespace detail

/// RCP subframe through the channel: on the MN core samples r = sum_i h_i Pi_{ell_i} Delta_{kappa_i} s,
/// with the cyclic prefix regenerated from the result. Equals the matrix oracle exactly.
inline ComplexVector apply_time_rcp(const ComplexVector &stream, const PathChannel &chan, const OtfsConfig &cfg)
{
    if (cfg.variant != Variant::RCP)
        throw std::invalid_argument("apply_time_rcp: config variant is not RCP.");
    chan.validate(cfg.M);
    const ComplexVector core = remove_cp(stream, cfg);
    const Eigen::Index MN = core.size();
    Eigen::FFT<double> fft;
    ComplexVector y = ComplexVector::Zero(MN);
    for (const auto &p : chan.paths)
    {
        ComplexVector v(MN);
        for (Eigen::Index r = 0; r < MN; ++r)
            v(r) = core(r) * cis2pi(p.doppler * static_cast<double>(r) / static_cast<double>(MN));
        y += p.gain * detail::circular_fractional_delay(v, p.delay, fft);
    }
    ComplexVector out(cfg.stream_length());
    out.head(cfg.n_cp) = y.tail(cfg.n_cp);
    out.tail(MN) = y;
    return out;
}

/// Indices of paths whose delay exceeds the per-column CP.
inline std::vector<std::size_t> cp_violations(const PathChannel &chan, const OtfsConfig &cfg)
{
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < chan.size(); ++i)
        if (chan.paths[i].delay > cfg.n_cp)
            bad.push_back(i);
    return bad;
}

/// CP-OTFS subframe through the channel. Each CP-extended column absorbs the delay, so the
/// core of column n is delayed circularly within its M samples; the Doppler phase
/// zt^{kappa_i (t - ell_i)} runs on the global CP-included sample index t.
inline ComplexVector apply_time_cp(const ComplexVector &stream, const PathChannel &chan, const OtfsConfig &cfg)
{
    if (cfg.variant != Variant::CP)
        throw std::invalid_argument("apply_time_cp: config variant is not CP.");
    chan.validate(cfg.M);
    if (const auto bad = cp_violations(chan, cfg); !bad.empty())
        std::clog << "warning: apply_time_cp: " << bad.size() << " path(s) exceed the CP length "
                  << cfg.n_cp << "; the per-column circular model no longer matches a physical CP.\n";
    const int M = cfg.M, N = cfg.N, cp = cfg.n_cp, B = M + cfg.n_cp;
    const double denom = static_cast<double>(N) * B;
    const ComplexVector core = remove_cp(stream, cfg);
    Eigen::FFT<double> fft;
    ComplexVector out = ComplexVector::Zero(cfg.stream_length());
    for (const auto &p : chan.paths)
        for (int n = 0; n < N; ++n)
        {
            const ComplexVector d =
                detail::circular_fractional_delay(core.segment(static_cast<Eigen::Index>(n) * M, M), p.delay, fft);
            for (int j = 0; j < B; ++j)
            {
                const double t = static_cast<double>(n) * B + j;
                out(static_cast<Eigen::Index>(n) * B + j) +=
                    p.gain * cis2pi(p.doppler * (t - p.delay) / denom) * d(mod(j - cp, M));
            }
        }
    return out;
}

inline ComplexVector apply_time(const ComplexVector &stream, const PathChannel &chan, const OtfsConfig &cfg)
{
    return cfg.variant == Variant::RCP ? apply_time_rcp(stream, chan, cfg) : apply_time_cp(stream, chan, cfg);
}

// ------------------------------------------------------------------------
// Noise

/// Per-sample noise variance for a given Es/N0 with unit average symbol energy.
inline double noise_variance(double snr_db)
{
    if (std::isinf(snr_db) && snr_db > 0)
        return 0.0;
    return std::pow(10.0, -snr_db / 10.0);
}

template <class Rng>
ComplexVector add_awgn(const ComplexVector &s, double snr_db, Rng &rng)
{
    const double var = noise_variance(snr_db);
    if (var == 0.0)
        return s;
    std::normal_distribution<double> gauss(0.0, std::sqrt(var / 2.0));
    ComplexVector out = s;
    for (Eigen::Index i = 0; i < out.size(); ++i)
    {
        const double re = gauss(rng);
        const double im = gauss(rng);
        out(i) += cd(re, im);
    }
    return out;
}

/// Seeded form; snr_db = +infinity leaves the stream unchanged.
inline ComplexVector add_awgn(const ComplexVector &s, double snr_db, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return add_awgn(s, snr_db, rng);
}

} // namespace otfs
