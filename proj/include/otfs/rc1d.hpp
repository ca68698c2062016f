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

// Time-domain reservoir computing baseline: V independent echo-state networks, each
// equalizing one contiguous segment of the received sample stream.
//
// Pilot rows of the delay-Doppler grid span every Doppler bin, so the transmitted time
// samples s[nM + l] of those rows are known; they are the training targets.

#include "reservoir.hpp"

namespace otfs
{

struct Rc1dParams
{
    int n_neurons = 12;
    int window = 10;                                       // N_w
    std::vector<int> forget_set{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22};
    int n_reservoirs = 7;                                  // V
    double spectral_radius = 0.9;
    double sparsity = 0.6;
    double input_scale = 1.0;
    std::uint64_t seed = 1;
    Activation activation = Activation::Tanh;

    int max_forget() const { return *std::max_element(forget_set.begin(), forget_set.end()); }

    void validate(int M, int N) const
    {
        if (n_neurons < 1 || window < 1)
            throw std::invalid_argument("Rc1dParams: n_neurons and window must be positive.");
        if (forget_set.empty())
            throw std::invalid_argument("Rc1dParams: forget set must be non-empty.");
        for (int f : forget_set)
            if (f < 0)
                throw std::invalid_argument("Rc1dParams: forget lengths must be non-negative.");
        if (n_reservoirs < 1 || (M * N) % n_reservoirs != 0)
            throw std::invalid_argument("Rc1dParams: the number of reservoirs (" + std::to_string(n_reservoirs) +
                                        ") must divide MN = " + std::to_string(M * N) + ".");
        if (!(spectral_radius >= 0.0 && spectral_radius < 1.0))
            throw std::invalid_argument("Rc1dParams: spectral radius must lie in [0, 1).");
        if (!(sparsity >= 0.0 && sparsity <= 1.0))
            throw std::invalid_argument("Rc1dParams: sparsity must lie in [0, 1].");
    }
};

/// Column t = [y(t); y(t-1); ...; y(t-N_w+1)], zeros where t - i < 0.
inline ComplexMatrix window_1d(const ComplexMatrix &Y, int N_w)
{
    if (N_w < 1)
        throw std::invalid_argument("window_1d: window must be positive.");
    const auto Ny = Y.rows(), Lt = Y.cols();
    ComplexMatrix out = ComplexMatrix::Zero(Ny * N_w, Lt);
    for (Eigen::Index t = 0; t < Lt; ++t)
        for (int i = 0; i < N_w && t - i >= 0; ++i)
            out.block(i * Ny, t, Ny, 1) = Y.col(t - i);
    return out;
}

/// [Y_w, 0_{N_i x L_f}]
inline ComplexMatrix pad_zeros(const ComplexMatrix &Yw, int L_f)
{
    if (L_f < 0)
        throw std::invalid_argument("pad_zeros: negative padding.");
    ComplexMatrix out = ComplexMatrix::Zero(Yw.rows(), Yw.cols() + L_f);
    out.leftCols(Yw.cols()) = Yw;
    return out;
}

struct Rc1dReservoir
{
    ComplexMatrix W_i;   // N_n x N_i
    ComplexMatrix W_res; // N_n x N_n
    Activation activation = Activation::Tanh;

    int n_neurons() const { return static_cast<int>(W_i.rows()); }
    int n_inputs() const { return static_cast<int>(W_i.cols()); }

    template <class Rng>
    static Rc1dReservoir draw(int n_neurons, int n_inputs, const Rc1dParams &p, Rng &rng)
    {
        Rc1dReservoir r;
        r.W_i = p.input_scale * uniform_matrix(n_neurons, n_inputs, rng);
        r.W_res = reservoir_matrix(n_neurons, p.spectral_radius, p.sparsity, rng);
        r.activation = p.activation;
        return r;
    }

    /// u(n) = f(W_i y(n) + W_res u(n-1)) from u(-1) = init (zero by default).
    /// Returns extended states [y(n); u(n)] as columns.
    ComplexMatrix states(const ComplexMatrix &Ypad, const ComplexVector *init = nullptr) const
    {
        if (Ypad.rows() != n_inputs())
            throw std::invalid_argument("Rc1dReservoir::states: input rows do not match W_i.");
        const int Ni = n_inputs(), Nn = n_neurons();
        ComplexMatrix ext(Ni + Nn, Ypad.cols());
        ComplexVector u = init ? *init : ComplexVector::Zero(Nn);
        for (Eigen::Index n = 0; n < Ypad.cols(); ++n)
        {
            ComplexVector a = W_i * Ypad.col(n) + W_res * u;
            activate_inplace(a, activation);
            u = a;
            ext.col(n).head(Ni) = Ypad.col(n);
            ext.col(n).tail(Nn) = u;
        }
        return ext;
    }
};

struct Rc1dTrainResult
{
    ComplexMatrix W_o;
    int l_f = 0;
    double residual = 0.0;
    double target_energy = 0.0;
    std::vector<std::pair<int, double>> visited; // (l_f, residual)
};

/// LS readout per forget length on truncated states; keeps the minimizing pair.
/// `steps` selects which of the L_t target columns are known (all when empty).
inline Rc1dTrainResult rc1d_train(const ComplexMatrix &ext, const ComplexMatrix &target, const std::vector<int> &forget_set,
                                  const std::vector<int> &steps = {})
{
    if (forget_set.empty())
        throw std::invalid_argument("rc1d_train: forget set is empty.");
    const auto Lt = target.cols();
    std::vector<int> cols = steps;
    if (cols.empty())
        for (int t = 0; t < Lt; ++t)
            cols.push_back(t);
    ComplexMatrix T(target.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        T.col(c) = target.col(cols[c]);

    Rc1dTrainResult best;
    best.residual = std::numeric_limits<double>::infinity();
    for (int l_f : forget_set)
    {
        if (l_f < 0 || l_f + Lt > ext.cols())
            throw std::invalid_argument("rc1d_train: forget length " + std::to_string(l_f) +
                                        " exceeds the padded state length.");
        ComplexMatrix U(ext.rows(), T.cols());
        for (std::size_t c = 0; c < cols.size(); ++c)
            U.col(c) = ext.col(cols[c] + l_f);
        LsFit fit = ls_readout(U, T);
        best.visited.emplace_back(l_f, fit.residual);
        if (fit.residual < best.residual)
        {
            best.W_o = std::move(fit.W);
            best.l_f = l_f;
            best.residual = fit.residual;
        }
    }
    best.target_energy = T.squaredNorm();
    return best;
}

/// W_o applied to the truncated states, columns l_f ... l_f + L_t - 1.
inline ComplexMatrix rc1d_predict(const ComplexMatrix &ext, const Rc1dTrainResult &fit, Eigen::Index Lt)
{
    return fit.W_o * ext.middleCols(fit.l_f, Lt);
}

struct Rc1dDetection
{
    Detection detection;
    std::vector<Rc1dTrainResult> reservoirs; // one per segment
};

/// Transmitted time samples known from the pilot rows: (sample index, value).
inline std::vector<std::pair<int, cd>> known_time_samples(const FramePlan &plan, const OtfsConfig &cfg)
{
    std::vector<int> rows;
    for (int l = 0; l < cfg.M; ++l)
        if (plan.mask.row(l).all())
            rows.push_back(l);
    const ComplexMatrix S = plan.X_train * dft_matrix(cfg.N).adjoint();
    std::vector<std::pair<int, cd>> out;
    for (int n = 0; n < cfg.N; ++n)
        for (int l : rows)
            out.emplace_back(n * cfg.M + l, S(l, n));
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    return out;
}

/// Splits the CP-free received stream into V segments, trains one reservoir per segment on
/// the known samples inside it, predicts the segment and maps the estimate back to the
/// delay-Doppler grid with X = S F_N.
inline Rc1dDetection rc1d_detect(const ComplexVector &received, const FramePlan &plan, const Rc1dParams &params,
                                 const OtfsConfig &cfg)
{
    params.validate(cfg.M, cfg.N);
    const ComplexVector r = remove_cp(received, cfg);
    const int MN = cfg.M * cfg.N, V = params.n_reservoirs, L = MN / V, Lf = params.max_forget();
    const auto known = known_time_samples(plan, cfg);

    Rc1dDetection out;
    ComplexVector s_hat(MN);
    auto it = known.begin();
    for (int v = 0; v < V; ++v)
    {
        std::vector<int> steps;
        ComplexMatrix target = ComplexMatrix::Zero(1, L);
        for (; it != known.end() && it->first < (v + 1) * L; ++it)
        {
            steps.push_back(it->first - v * L);
            target(0, it->first - v * L) = it->second;
        }
        if (steps.empty())
            throw std::runtime_error("rc1d_detect: segment " + std::to_string(v) +
                                     " holds no pilot samples; use a larger pilot block or fewer reservoirs.");
        std::mt19937_64 rng(mix_seed(params.seed, static_cast<std::uint64_t>(v)));
        const auto res = Rc1dReservoir::draw(params.n_neurons, params.window, params, rng);
        const ComplexMatrix input = r.segment(static_cast<Eigen::Index>(v) * L, L).transpose();
        const ComplexMatrix ext = res.states(pad_zeros(window_1d(input, params.window), Lf));
        auto fit = rc1d_train(ext, target, params.forget_set, steps);
        s_hat.segment(static_cast<Eigen::Index>(v) * L, L) = rc1d_predict(ext, fit, L).row(0).transpose();
        out.reservoirs.push_back(std::move(fit));
    }
    const ComplexMatrix X_raw = vec_inv(s_hat, cfg.M, cfg.N) * dft_matrix(cfg.N);
    out.detection = finish_detection(X_raw, plan, cfg.modulation);
    double res = 0.0, ref = 0.0;
    for (const auto &f : out.reservoirs)
    {
        res += f.residual;
        ref += f.target_energy;
    }
    out.detection.train_nmse = ref > 0.0 ? res / ref : 0.0;
    return out;
}

} // namespace otfs
