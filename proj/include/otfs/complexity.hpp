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

// Dominant-term complex multiplication counts per subframe, O-constants taken as 1.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace otfs
{

enum class Method
{
    LMMSE,
    LowLMMSE,
    MPA,
    LSMR,
    RC1D,
    RC2D
};

enum class Phase
{
    TrainOrEstimate,
    TestOrDetect
};

inline const std::vector<Method> &all_methods()
{
    static const std::vector<Method> m{Method::LMMSE, Method::LowLMMSE, Method::MPA,
                                       Method::LSMR,  Method::RC1D,     Method::RC2D};
    return m;
}

inline std::string to_string(Method m)
{
    switch (m)
    {
    case Method::LMMSE:
        return "lmmse";
    case Method::LowLMMSE:
        return "low_lmmse";
    case Method::MPA:
        return "mpa";
    case Method::LSMR:
        return "lsmr";
    case Method::RC1D:
        return "rc1d";
    case Method::RC2D:
        return "rc2d";
    }
    throw std::invalid_argument("unknown method");
}

inline Method parse_method(const std::string &s)
{
    for (Method m : all_methods())
        if (to_string(m) == s)
            return m;
    throw std::invalid_argument("unknown method '" + s + "'.");
}

inline std::string to_string(Phase p) { return p == Phase::TrainOrEstimate ? "train" : "test"; }

struct ComplexityParams
{
    double M = 1024, N = 14;
    double eta = 0.046875;     // pilot overhead |Omega| / MN
    double n_neurons_2d = 6, n_inputs_2d = 56;
    double forget_delay = 2, forget_doppler = 2; // |L_m|, |L_n|
    double n_neurons_1d = 12, n_inputs_1d = 10;
    double forget_1d = 12;     // |L_f|
    double V = 7;
    double P_tilde = -1;       // estimated taps; <= 0 selects eta MN / 2
    double n_iter = 30;        // MPA iterations
    double alphabet = 4;       // |A|
    double lsmr_iter = 15;     // I
    double ic_iter = 5;        // K

    double MN() const { return M * N; }
    double paths() const { return P_tilde > 0 ? P_tilde : eta * MN() / 2.0; }

    void validate() const
    {
        for (double v : {M, N, n_neurons_2d, n_inputs_2d, forget_delay, forget_doppler, n_neurons_1d, n_inputs_1d,
                         forget_1d, V, n_iter, alphabet, lsmr_iter, ic_iter})
            if (!(v > 0))
                throw std::invalid_argument("ComplexityParams: all counts must be positive.");
        if (!(eta > 0.0 && eta <= 1.0))
            throw std::invalid_argument("ComplexityParams: eta must lie in (0, 1].");
    }
};

/// True when the first 1D-RC branch applies: N_i + N_n <= eta MN / V.
inline bool rc1d_small_readout(const ComplexityParams &p)
{
    return p.n_inputs_1d + p.n_neurons_1d <= p.eta * p.MN() / p.V;
}

inline double rc1d_train_branch(const ComplexityParams &p, bool small_readout)
{
    const double e = p.n_inputs_1d + p.n_neurons_1d, pil = p.eta * p.MN();
    const double solve = small_readout ? pil * pil / p.V : e * pil * p.V;
    return p.n_neurons_1d * e * p.MN() + e * (solve + pil) * p.forget_1d;
}

inline double count(Method method, Phase phase, const ComplexityParams &p)
{
    p.validate();
    const double MN = p.MN(), pil = p.eta * MN;
    if (phase == Phase::TrainOrEstimate)
    {
        switch (method)
        {
        case Method::LMMSE:
        case Method::LowLMMSE:
        case Method::MPA:
        case Method::LSMR:
            return pil;
        case Method::RC1D:
            return rc1d_train_branch(p, rc1d_small_readout(p));
        case Method::RC2D:
        {
            const double e = p.n_inputs_2d + p.n_neurons_2d;
            return p.n_neurons_2d * (p.n_inputs_2d + 3 * p.n_neurons_2d) * MN +
                   e * (pil * pil + pil) * (p.forget_delay + p.forget_doppler);
        }
        }
    }
    else
    {
        switch (method)
        {
        case Method::LMMSE:
            return MN * MN * MN;
        case Method::LowLMMSE:
            return MN * p.paths() * std::log2(p.N);
        case Method::MPA:
            return p.n_iter * p.alphabet * p.paths() * MN;
        case Method::LSMR:
            return p.lsmr_iter * p.ic_iter * p.paths() * MN;
        case Method::RC1D:
            return (p.n_neurons_1d + p.n_inputs_1d) * MN;
        case Method::RC2D:
            return (p.n_neurons_2d + p.n_inputs_2d) * MN;
        }
    }
    throw std::invalid_argument("count: unknown method.");
}

struct Inequality
{
    std::string versus;
    double lhs = 0.0, rhs = 0.0;
    bool holds = false; // strict lhs < rhs
};

struct CrossoverReport
{
    std::vector<Inequality> inequalities; // vs MPA, LSMR, low-complexity LMMSE
    bool rc1d_small_readout = false;
    bool rc1d_at_boundary = false;
    double rc1d_branch_small = 0.0, rc1d_branch_large = 0.0;
};

/// Conditions under which reservoir detection is cheaper at test time; uses the 2D-RC readout size.
inline CrossoverReport crossover_report(const ComplexityParams &p)
{
    p.validate();
    const double e = p.n_inputs_2d + p.n_neurons_2d, P = p.paths();
    CrossoverReport r;
    auto add = [&](std::string name, double rhs) { r.inequalities.push_back({std::move(name), e, rhs, e < rhs}); };
    add("mpa", P * p.n_iter * p.alphabet);
    add("lsmr", P * p.lsmr_iter * p.ic_iter);
    add("low_lmmse", P * std::log2(p.N));
    r.rc1d_small_readout = rc1d_small_readout(p);
    r.rc1d_at_boundary = p.n_inputs_1d + p.n_neurons_1d == p.eta * p.MN() / p.V;
    r.rc1d_branch_small = rc1d_train_branch(p, true);
    r.rc1d_branch_large = rc1d_train_branch(p, false);
    return r;
}

} // namespace otfs
