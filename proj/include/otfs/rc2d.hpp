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

// Two-dimensional reservoir computing detector working directly on the received
// delay-Doppler grid. One network per subframe, trained on that subframe's pilots.
//
// Pipeline: phase compensation (RCP only) -> 2D sliding window -> 2D circular padding
// -> 2D state recursion -> masked least-squares readout with a forget-length search
// -> nearest-neighbour quantization.

#include "reservoir.hpp"

#include <map>
#include <optional>

namespace otfs
{

enum class ForgetSearch
{
    TwoStage,  // best Doppler forget length at min(delay set), then sweep the delay set
    Exhaustive // every pair
};

enum class ScanOrder
{
    DelayFastest,  // n outer, m inner
    DopplerFastest // m outer, n inner
};

struct Rc2dParams
{
    int n_neurons = 6;
    int window_delay = 4;    // M_w
    int window_doppler = 14; // N_w
    std::vector<int> forget_delay{7, 8};     // L_m
    std::vector<int> forget_doppler{13, 14}; // L_n
    int l_c = 7;             // phase-compensation delay threshold
    double spectral_radius = 0.9;
    double sparsity = 0.6;
    double input_scale = 1.0;
    std::uint64_t seed = 1;
    Activation activation = Activation::Tanh;
    ForgetSearch search = ForgetSearch::TwoStage;

    int n_inputs() const { return window_delay * window_doppler; }
    int max_forget_delay() const { return *std::max_element(forget_delay.begin(), forget_delay.end()); }
    int max_forget_doppler() const { return *std::max_element(forget_doppler.begin(), forget_doppler.end()); }

    void validate(int M, int N) const
    {
        if (n_neurons < 1)
            throw std::invalid_argument("Rc2dParams: n_neurons must be positive.");
        if (window_delay < 1 || window_delay > M || window_doppler < 1 || window_doppler > N)
            throw std::invalid_argument("Rc2dParams: window must satisfy 1 <= M_w <= M and 1 <= N_w <= N.");
        if (forget_delay.empty() || forget_doppler.empty())
            throw std::invalid_argument("Rc2dParams: forget-length sets must be non-empty.");
        for (int f : forget_delay)
            if (f < 0 || f > M)
                throw std::invalid_argument("Rc2dParams: delay forget lengths must lie in [0, M].");
        for (int f : forget_doppler)
            if (f < 0 || f > N)
                throw std::invalid_argument("Rc2dParams: Doppler forget lengths must lie in [0, N].");
        if (l_c < 0 || l_c > M)
            throw std::invalid_argument("Rc2dParams: l_c must lie in [0, M].");
        if (!(spectral_radius >= 0.0 && spectral_radius < 1.0))
            throw std::invalid_argument("Rc2dParams: spectral radius must lie in [0, 1).");
        if (!(sparsity >= 0.0 && sparsity <= 1.0))
            throw std::invalid_argument("Rc2dParams: sparsity must lie in [0, 1].");
    }
};

/// Y_c[l,k] = Y[l,k] exp(j 2 pi k / N) for l < l_c (RCP only); identity for CP.
inline ComplexMatrix phase_compensate(const ComplexMatrix &Y, int l_c, Variant variant)
{
    if (l_c < 0 || l_c > Y.rows())
        throw std::invalid_argument("phase_compensate: l_c outside [0, M].");
    ComplexMatrix Yc = Y;
    if (variant == Variant::CP)
        return Yc;
    const auto N = Y.cols();
    for (Eigen::Index k = 0; k < N; ++k)
        Yc.col(k).head(l_c) *= cis2pi(static_cast<double>(k) / static_cast<double>(N));
    return Yc;
}

/// Fiber (l, k) = vec(rev(Y_c[l-M_w+1 : l, k-N_w+1 : k]^T)); entry b*N_w + a holds
/// Y_c[l-b, k-a], zero where the index leaves the grid.
inline ComplexTensor3 window_2d(const ComplexMatrix &Yc, int M_w, int N_w)
{
    const int M = static_cast<int>(Yc.rows()), N = static_cast<int>(Yc.cols());
    if (M_w < 1 || N_w < 1 || M_w > M || N_w > N)
        throw std::invalid_argument("window_2d: window must fit inside the grid.");
    ComplexTensor3 out(static_cast<Eigen::Index>(M_w) * N_w, M, N);
    for (int k = 0; k < N; ++k)
        for (int l = 0; l < M; ++l)
            for (int b = 0; b < M_w && l - b >= 0; ++b)
                for (int a = 0; a < N_w && k - a >= 0; ++a)
                    out(b * N_w + a, l, k) = Yc(l - b, k - a);
    return out;
}

/// Appends the first M_f delay slices and the first N_f Doppler slices (and the leading
/// corner block) at the end of the respective axes.
inline ComplexTensor3 circular_pad_2d(const ComplexTensor3 &Yw, int M_f, int N_f)
{
    const auto M = Yw.dim2(), N = Yw.dim3();
    if (M_f < 0 || N_f < 0 || M_f > M || N_f > N)
        throw std::invalid_argument("circular_pad_2d: forget lengths must satisfy M_f <= M and N_f <= N.");
    ComplexTensor3 out(Yw.dim1(), M + M_f, N + N_f);
    for (Eigen::Index n = 0; n < N + N_f; ++n)
        for (Eigen::Index m = 0; m < M + M_f; ++m)
            out.fiber(m, n) = Yw.fiber(m % M, n % N);
    return out;
}

struct Rc2dWeights
{
    ComplexMatrix W_i;           // N_n x N_i
    ComplexMatrix W_r, W_c, W_d; // N_n x N_n: row, column and diagonal couplings

    int n_neurons() const { return static_cast<int>(W_i.rows()); }
    int n_inputs() const { return static_cast<int>(W_i.cols()); }

    /// Leading n neurons; exact sub-network when drawn with nested sizes.
    Rc2dWeights leading(int n) const
    {
        return {W_i.topRows(n), W_r.topLeftCorner(n, n), W_c.topLeftCorner(n, n), W_d.topLeftCorner(n, n)};
    }
};

/// Draws weights whose leading blocks of every size in `neuron_sizes` are themselves valid
/// reservoirs, so models of those sizes share their randomness.
template <class Rng>
Rc2dWeights draw_rc2d_weights(const std::vector<int> &neuron_sizes, int n_inputs, double radius, double sparsity,
                              double input_scale, Rng &rng)
{
    const int n = *std::max_element(neuron_sizes.begin(), neuron_sizes.end());
    Rc2dWeights w;
    w.W_i = input_scale * uniform_matrix(n, n_inputs, rng);
    w.W_r = nested_reservoir(neuron_sizes, radius, sparsity, rng);
    w.W_c = nested_reservoir(neuron_sizes, radius, sparsity, rng);
    w.W_d = nested_reservoir(neuron_sizes, radius, sparsity, rng);
    return w;
}

struct ForgetPoint
{
    int m_f = 0, n_f = 0;
    double residual = 0.0;
};

struct Rc2dTrainReport
{
    int m_f = 0, n_f = 0;      // chosen forget lengths
    double residual = 0.0;     // masked LS residual at the chosen pair
    double nmse = 0.0;         // residual / ||X_train||^2
    std::vector<ForgetPoint> visited;
    std::vector<std::string> warnings;
};

class Rc2dModel
{
public:
    Rc2dModel(const Rc2dParams &params, Rc2dWeights weights) : params_(params), w_(std::move(weights))
    {
        if (w_.n_inputs() != params_.n_inputs() || w_.n_neurons() != params_.n_neurons)
            throw std::invalid_argument("Rc2dModel: weight shapes do not match the parameters.");
    }

    explicit Rc2dModel(const Rc2dParams &params)
        : Rc2dModel(params, [&]
                    {
                        std::mt19937_64 rng(params.seed);
                        return draw_rc2d_weights({params.n_neurons}, params.n_inputs(), params.spectral_radius,
                                                 params.sparsity, params.input_scale, rng);
                    }())
    {
    }

    const Rc2dParams &params() const { return params_; }
    const Rc2dWeights &weights() const { return w_; }
    int n_neurons() const { return params_.n_neurons; }
    int n_inputs() const { return params_.n_inputs(); }
    int extended_size() const { return n_neurons() + n_inputs(); }

    bool trained() const { return W_o_.has_value(); }
    const ComplexMatrix &readout() const
    {
        if (!W_o_)
            throw std::logic_error("Rc2dModel: readout requested before training.");
        return *W_o_;
    }
    int forget_delay() const { return m_f_; }
    int forget_doppler() const { return n_f_; }

    void set_readout(ComplexMatrix W_o, int m_f, int n_f)
    {
        if (W_o.rows() != 1 || W_o.cols() != extended_size())
            throw std::invalid_argument("Rc2dModel: readout must be 1 x (N_n + N_i).");
        W_o_ = std::move(W_o);
        m_f_ = m_f;
        n_f_ = n_f;
    }

    /// u[m,n] = f(W_i y[m,n] + W_r u[m-1,n] + W_d u[m-1,n-1] + W_c u[m,n-1]), zero boundary
    /// states. Returns extended fibers [y[m,n]; u[m,n]].
    ComplexTensor3 states(const ComplexTensor3 &Y, ScanOrder order = ScanOrder::DelayFastest) const
    {
        if (Y.dim1() != n_inputs())
            throw std::invalid_argument("Rc2dModel::states: input fibers have the wrong length.");
        const auto Mt = Y.dim2(), Nt = Y.dim3();
        const int Ni = n_inputs(), Nn = n_neurons();
        ComplexTensor3 ext(Ni + Nn, Mt, Nt);
        const ComplexVector zero = ComplexVector::Zero(Nn);
        auto step = [&](Eigen::Index m, Eigen::Index n)
        {
            ComplexVector a = w_.W_i * Y.fiber(m, n);
            if (m > 0)
                a.noalias() += w_.W_r * ext.fiber(m - 1, n).tail(Nn);
            if (n > 0)
                a.noalias() += w_.W_c * ext.fiber(m, n - 1).tail(Nn);
            if (m > 0 && n > 0)
                a.noalias() += w_.W_d * ext.fiber(m - 1, n - 1).tail(Nn);
            activate_inplace(a, params_.activation);
            ext.fiber(m, n).head(Ni) = Y.fiber(m, n);
            ext.fiber(m, n).tail(Nn) = a;
        };
        if (order == ScanOrder::DelayFastest)
        {
            for (Eigen::Index n = 0; n < Nt; ++n)
                for (Eigen::Index m = 0; m < Mt; ++m)
                    step(m, n);
        }
        else
        {
            for (Eigen::Index m = 0; m < Mt; ++m)
                for (Eigen::Index n = 0; n < Nt; ++n)
                    step(m, n);
        }
        return ext;
    }

    /// Truncated extended states for all M x N positions, columns in vec order.
    static ComplexMatrix truncated(const ComplexTensor3 &ext, int M, int N, int m_f, int n_f)
    {
        ComplexMatrix U(ext.dim1(), static_cast<Eigen::Index>(M) * N);
        for (int k = 0; k < N; ++k)
            for (int l = 0; l < M; ++l)
                U.col(static_cast<Eigen::Index>(k) * M + l) = ext.fiber(m_f + l, n_f + k);
        return U;
    }

    /// O_hat truncated at the trained forget lengths, M x N.
    ComplexMatrix predict(const ComplexTensor3 &ext, int M, int N) const
    {
        const ComplexMatrix out = readout() * truncated(ext, M, N, m_f_, n_f_);
        return vec_inv(out.row(0).transpose(), M, N);
    }

private:
    Rc2dParams params_;
    Rc2dWeights w_;
    std::optional<ComplexMatrix> W_o_;
    int m_f_ = 0, n_f_ = 0;
};

/// Regressors restricted to the pilot positions (columns of the masked truncated state
/// matrix that are not identically zero) and the matching pilot targets.
inline std::pair<ComplexMatrix, ComplexMatrix> masked_regressors(const ComplexTensor3 &ext, const ComplexMatrix &X_train,
                                                                 const PilotMask &mask, int m_f, int n_f)
{
    const int M = static_cast<int>(mask.rows()), N = static_cast<int>(mask.cols());
    const Eigen::Index count = mask.count();
    ComplexMatrix U(ext.dim1(), count), T(1, count);
    Eigen::Index c = 0;
    for (int k = 0; k < N; ++k)
        for (int l = 0; l < M; ++l)
            if (mask(l, k))
            {
                U.col(c) = ext.fiber(m_f + l, n_f + k);
                T(0, c) = X_train(l, k);
                ++c;
            }
    return {U, T};
}

/// Masked LS readout with the forget-length search. Stores the winning readout in `model`.
inline Rc2dTrainReport rc2d_train(const ComplexTensor3 &ext, const ComplexMatrix &X_train, const PilotMask &mask,
                                  const std::vector<int> &forget_delay, const std::vector<int> &forget_doppler,
                                  Rc2dModel &model, ForgetSearch search = ForgetSearch::TwoStage)
{
    const int M = static_cast<int>(mask.rows()), N = static_cast<int>(mask.cols());
    if (mask.count() == 0)
        throw std::invalid_argument("rc2d_train: the pilot mask is empty.");
    if (forget_delay.empty() || forget_doppler.empty())
        throw std::invalid_argument("rc2d_train: forget-length sets must be non-empty.");
    for (int f : forget_delay)
        if (f < 0 || M + f > ext.dim2())
            throw std::invalid_argument("rc2d_train: delay forget length exceeds the padded state.");
    for (int f : forget_doppler)
        if (f < 0 || N + f > ext.dim3())
            throw std::invalid_argument("rc2d_train: Doppler forget length exceeds the padded state.");

    Rc2dTrainReport report;
    if (mask.count() < model.extended_size())
        report.warnings.push_back("underdetermined readout: " + std::to_string(mask.count()) + " pilots for " +
                                  std::to_string(model.extended_size()) + " readout weights");

    std::map<std::pair<int, int>, LsFit> fits;
    auto eval = [&](int m_f, int n_f) -> const LsFit &
    {
        auto key = std::make_pair(m_f, n_f);
        auto it = fits.find(key);
        if (it == fits.end())
        {
            auto [U, T] = masked_regressors(ext, X_train, mask, m_f, n_f);
            it = fits.emplace(key, ls_readout(U, T)).first;
            report.visited.push_back({m_f, n_f, it->second.residual});
        }
        return it->second;
    };

    std::pair<int, int> best;
    if (search == ForgetSearch::Exhaustive)
    {
        double best_r = std::numeric_limits<double>::infinity();
        for (int n_f : forget_doppler)
            for (int m_f : forget_delay)
                if (const double r = eval(m_f, n_f).residual; r < best_r)
                {
                    best_r = r;
                    best = {m_f, n_f};
                }
    }
    else
    {
        const int m0 = *std::min_element(forget_delay.begin(), forget_delay.end());
        double best_r = std::numeric_limits<double>::infinity();
        int n_best = forget_doppler.front();
        for (int n_f : forget_doppler)
            if (const double r = eval(m0, n_f).residual; r < best_r)
            {
                best_r = r;
                n_best = n_f;
            }
        best_r = std::numeric_limits<double>::infinity();
        for (int m_f : forget_delay)
            if (const double r = eval(m_f, n_best).residual; r < best_r)
            {
                best_r = r;
                best = {m_f, n_best};
            }
    }

    const LsFit &fit = fits.at(best);
    model.set_readout(fit.W, best.first, best.second);
    report.m_f = best.first;
    report.n_f = best.second;
    report.residual = fit.residual;
    const double ref = X_train.squaredNorm();
    report.nmse = ref > 0.0 ? fit.residual / ref : 0.0;
    return report;
}

/// Phase compensation, windowing and padding for a received grid.
inline ComplexTensor3 rc2d_preprocess(const ComplexMatrix &Y, const Rc2dParams &params, Variant variant)
{
    const ComplexMatrix Yc = phase_compensate(Y, params.l_c, variant);
    return circular_pad_2d(window_2d(Yc, params.window_delay, params.window_doppler), params.max_forget_delay(),
                           params.max_forget_doppler());
}

struct Rc2dDetection
{
    Detection detection;
    Rc2dTrainReport report;
    int m_f = 0, n_f = 0;
};

/// Trains on this subframe's pilots, then estimates every grid position.
inline Rc2dDetection rc2d_detect(const ComplexMatrix &Y, const FramePlan &plan, const Rc2dModel &untrained,
                                 const OtfsConfig &cfg)
{
    const auto &params = untrained.params();
    params.validate(cfg.M, cfg.N);
    if (Y.rows() != cfg.M || Y.cols() != cfg.N)
        throw std::invalid_argument("rc2d_detect: received grid shape does not match the config.");
    if (plan.mask.count() == 0)
        throw std::invalid_argument("rc2d_detect: cannot train without pilots.");
    Rc2dModel model = untrained;
    const ComplexTensor3 ext = model.states(rc2d_preprocess(Y, params, cfg.variant));
    Rc2dDetection out;
    out.report = rc2d_train(ext, plan.X_train, plan.mask, params.forget_delay, params.forget_doppler, model,
                            params.search);
    out.detection = finish_detection(model.predict(ext, cfg.M, cfg.N), plan, cfg.modulation);
    out.detection.train_nmse = out.report.nmse;
    out.m_f = model.forget_delay();
    out.n_f = model.forget_doppler();
    return out;
}

inline Rc2dDetection rc2d_detect(const ComplexMatrix &Y, const FramePlan &plan, const Rc2dParams &params,
                                 const OtfsConfig &cfg)
{
    params.validate(cfg.M, cfg.N);
    return rc2d_detect(Y, plan, Rc2dModel(params), cfg);
}

/// Detection with an already trained model (no training on this frame).
inline Detection rc2d_apply(const ComplexMatrix &Y, const FramePlan &plan, const Rc2dModel &trained,
                            const OtfsConfig &cfg)
{
    if (!trained.trained())
        throw std::logic_error("rc2d_apply: model has not been trained.");
    const ComplexTensor3 ext = trained.states(rc2d_preprocess(Y, trained.params(), cfg.variant));
    return finish_detection(trained.predict(ext, cfg.M, cfg.N), plan, cfg.modulation);
}

} // namespace otfs
