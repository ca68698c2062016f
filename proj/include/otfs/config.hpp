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

// Experiment configuration and its JSON form.

#include "complexity.hpp"
#include "pilots.hpp"
#include "rc1d.hpp"
#include "rc2d.hpp"
#include "verification.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace otfs
{

enum class DetectorKind
{
    Rc2d,
    Rc1d,
    LmmsePerfect,   // LMMSE with the true fractional kernel
    LmmseEstimated  // LMMSE with spike-pilot integer-tap estimates
};

inline std::string to_string(DetectorKind k)
{
    switch (k)
    {
    case DetectorKind::Rc2d:
        return "rc2d";
    case DetectorKind::Rc1d:
        return "rc1d";
    case DetectorKind::LmmsePerfect:
        return "lmmse_perfect";
    case DetectorKind::LmmseEstimated:
        return "lmmse_estimated";
    }
    throw std::invalid_argument("unknown detector kind");
}

inline DetectorKind parse_detector_kind(const std::string &s)
{
    for (DetectorKind k :
         {DetectorKind::Rc2d, DetectorKind::Rc1d, DetectorKind::LmmsePerfect, DetectorKind::LmmseEstimated})
        if (to_string(k) == s)
            return k;
    throw std::invalid_argument("unknown detector '" + s + "' (expected rc2d, rc1d, lmmse_perfect, lmmse_estimated).");
}

struct DetectorSpec
{
    DetectorKind kind = DetectorKind::Rc2d;
    std::string label; // defaults to the kind name
    Rc2dParams rc2d;
    Rc1dParams rc1d;
    double threshold_factor = 3.0; // spike estimator

    std::string name() const { return label.empty() ? to_string(kind) : label; }
    PilotKind pilot() const
    {
        return kind == DetectorKind::LmmseEstimated ? PilotKind::SpikeGuard : PilotKind::Blockwise;
    }
};

enum class ChannelModel
{
    Random,
    Identity
};

using GridSize = std::array<int, 2>;

struct NmseStudy
{
    std::vector<int> neurons{1, 2, 4, 6, 8, 12};
    std::vector<GridSize> windows{{1, 7}, {2, 7}, {2, 14}, {4, 14}}; // (M_w, N_w)
    double snr_db = 20.0;
    int subframes = 20;

    /// Checked when the study runs, so sweep-only configs on small grids stay valid.
    void validate(int M, int N) const
    {
        if (neurons.empty() || windows.empty() || subframes < 1)
            throw std::invalid_argument("config: nmse study needs neurons, windows and subframes >= 1.");
        for (int n : neurons)
            if (n < 1)
                throw std::invalid_argument("config: nmse neuron counts must be positive.");
        for (const auto &w : windows)
            if (w[0] < 1 || w[0] > M || w[1] < 1 || w[1] > N)
                throw std::invalid_argument("config: nmse windows must fit inside the grid.");
    }
};

struct ComplexityStudy
{
    ComplexityParams base;
    std::vector<GridSize> sizes{{64, 14}, {128, 14}, {256, 14}, {512, 14}, {1024, 14}, {2048, 14}};
};

struct ExperimentConfig
{
    std::string name = "experiment";
    OtfsConfig otfs;
    int pilot_rows = 6;
    double spike_power_db = 20.0;
    ChannelModel channel_model = ChannelModel::Random;
    ChannelSpec channel;
    std::vector<DetectorSpec> detectors;
    std::vector<double> snr_db{0, 5, 10, 15, 20, 25};
    int subframes = 100;
    std::uint64_t master_seed = 1;
    int threads = 0; // 0 selects the hardware concurrency
    NmseStudy nmse;
    ComplexityStudy complexity;
    VerifyParams verify;

    PilotPattern pattern(PilotKind kind) const
    {
        return kind == PilotKind::Blockwise ? blockwise_mask(otfs, pilot_rows)
                                            : spike_mask(otfs, pilot_rows, spike_power_db);
    }

    void validate() const
    {
        otfs.validate();
        if (pilot_rows < 1 || pilot_rows > otfs.M)
            throw std::invalid_argument("config: pilot_rows must lie in [1, M].");
        if (channel_model == ChannelModel::Random)
            channel.validate(otfs.M);
        if (detectors.empty())
            throw std::invalid_argument("config: at least one detector is required.");
        if (snr_db.empty())
            throw std::invalid_argument("config: at least one SNR point is required.");
        if (subframes < 1)
            throw std::invalid_argument("config: subframes must be at least 1.");
        if (threads < 0)
            throw std::invalid_argument("config: threads must be non-negative.");
        std::set<std::string> names;
        for (const auto &d : detectors)
        {
            if (!names.insert(d.name()).second)
                throw std::invalid_argument("config: duplicate detector label '" + d.name() + "'.");
            if (d.kind == DetectorKind::Rc2d)
                d.rc2d.validate(otfs.M, otfs.N);
            if (d.kind == DetectorKind::Rc1d)
                d.rc1d.validate(otfs.M, otfs.N);
            if (d.kind == DetectorKind::LmmseEstimated && !(d.threshold_factor >= 0.0))
                throw std::invalid_argument("config: threshold_factor must be non-negative.");
        }
        complexity.base.validate();
        verify.validate();
    }
};

// ------------------------------------------------------------------------
// JSON

namespace detail
{
using json = nlohmann::json;

inline void check_keys(const json &j, std::initializer_list<const char *> allowed, const std::string &where)
{
    if (!j.is_object())
        throw std::invalid_argument("config: '" + where + "' must be an object.");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char *k) { return it.key() == k; }))
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in '" + where + "'.");
}

template <class T>
void read(const json &j, const char *key, T &out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

inline std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "identity"; }
inline Activation parse_activation(const std::string &s)
{
    if (s == "tanh")
        return Activation::Tanh;
    if (s == "identity")
        return Activation::Identity;
    throw std::invalid_argument("config: unknown activation '" + s + "'.");
}
inline std::string to_string(ForgetSearch s) { return s == ForgetSearch::TwoStage ? "two_stage" : "exhaustive"; }
inline ForgetSearch parse_search(const std::string &s)
{
    if (s == "two_stage")
        return ForgetSearch::TwoStage;
    if (s == "exhaustive")
        return ForgetSearch::Exhaustive;
    throw std::invalid_argument("config: unknown forget search '" + s + "'.");
}

/// SNR points are numbers; the string "inf" marks a noiseless point.
inline std::vector<double> snr_list_from_json(const json &j)
{
    if (!j.is_array())
        throw std::invalid_argument("config: 'snr_db' must be an array.");
    std::vector<double> out;
    for (const auto &e : j)
    {
        if (e.is_string() && e.get<std::string>() == "inf")
            out.push_back(std::numeric_limits<double>::infinity());
        else if (e.is_number())
            out.push_back(e.get<double>());
        else
            throw std::invalid_argument("config: SNR points must be numbers or \"inf\".");
    }
    return out;
}

inline json snr_list_to_json(const std::vector<double> &snr)
{
    json out = json::array();
    for (double v : snr)
        if (std::isinf(v) && v > 0)
            out.push_back("inf");
        else
            out.push_back(v);
    return out;
}

inline json rc2d_to_json(const Rc2dParams &p)
{
    return {{"neurons", p.n_neurons},         {"window_delay", p.window_delay},
            {"window_doppler", p.window_doppler}, {"forget_delay", p.forget_delay},
            {"forget_doppler", p.forget_doppler}, {"l_c", p.l_c},
            {"spectral_radius", p.spectral_radius}, {"sparsity", p.sparsity},
            {"input_scale", p.input_scale},     {"seed", p.seed},
            {"activation", to_string(p.activation)}, {"search", to_string(p.search)}};
}

inline Rc2dParams rc2d_from_json(const json &j)
{
    check_keys(j, {"neurons", "window_delay", "window_doppler", "forget_delay", "forget_doppler", "l_c",
                   "spectral_radius", "sparsity", "input_scale", "seed", "activation", "search"},
               "rc2d");
    Rc2dParams p;
    read(j, "neurons", p.n_neurons);
    read(j, "window_delay", p.window_delay);
    read(j, "window_doppler", p.window_doppler);
    read(j, "forget_delay", p.forget_delay);
    read(j, "forget_doppler", p.forget_doppler);
    read(j, "l_c", p.l_c);
    read(j, "spectral_radius", p.spectral_radius);
    read(j, "sparsity", p.sparsity);
    read(j, "input_scale", p.input_scale);
    read(j, "seed", p.seed);
    if (j.contains("activation"))
        p.activation = parse_activation(j.at("activation").get<std::string>());
    if (j.contains("search"))
        p.search = parse_search(j.at("search").get<std::string>());
    return p;
}

inline json rc1d_to_json(const Rc1dParams &p)
{
    return {{"neurons", p.n_neurons},
            {"window", p.window},
            {"forget", p.forget_set},
            {"reservoirs", p.n_reservoirs},
            {"spectral_radius", p.spectral_radius},
            {"sparsity", p.sparsity},
            {"input_scale", p.input_scale},
            {"seed", p.seed},
            {"activation", to_string(p.activation)}};
}

inline Rc1dParams rc1d_from_json(const json &j)
{
    check_keys(j, {"neurons", "window", "forget", "reservoirs", "spectral_radius", "sparsity", "input_scale", "seed",
                   "activation"},
               "rc1d");
    Rc1dParams p;
    read(j, "neurons", p.n_neurons);
    read(j, "window", p.window);
    read(j, "forget", p.forget_set);
    read(j, "reservoirs", p.n_reservoirs);
    read(j, "spectral_radius", p.spectral_radius);
    read(j, "sparsity", p.sparsity);
    read(j, "input_scale", p.input_scale);
    read(j, "seed", p.seed);
    if (j.contains("activation"))
        p.activation = parse_activation(j.at("activation").get<std::string>());
    return p;
}

inline json complexity_to_json(const ComplexityParams &p)
{
    return {{"eta", p.eta},
            {"rc2d_neurons", p.n_neurons_2d},
            {"rc2d_inputs", p.n_inputs_2d},
            {"forget_delay_count", p.forget_delay},
            {"forget_doppler_count", p.forget_doppler},
            {"rc1d_neurons", p.n_neurons_1d},
            {"rc1d_inputs", p.n_inputs_1d},
            {"rc1d_forget_count", p.forget_1d},
            {"reservoirs", p.V},
            {"estimated_paths", p.P_tilde},
            {"mpa_iterations", p.n_iter},
            {"alphabet", p.alphabet},
            {"lsmr_iterations", p.lsmr_iter},
            {"ic_iterations", p.ic_iter}};
}

inline ComplexityParams complexity_from_json(const json &j)
{
    check_keys(j, {"eta", "rc2d_neurons", "rc2d_inputs", "forget_delay_count", "forget_doppler_count", "rc1d_neurons",
                   "rc1d_inputs", "rc1d_forget_count", "reservoirs", "estimated_paths", "mpa_iterations", "alphabet",
                   "lsmr_iterations", "ic_iterations"},
               "complexity.params");
    ComplexityParams p;
    read(j, "eta", p.eta);
    read(j, "rc2d_neurons", p.n_neurons_2d);
    read(j, "rc2d_inputs", p.n_inputs_2d);
    read(j, "forget_delay_count", p.forget_delay);
    read(j, "forget_doppler_count", p.forget_doppler);
    read(j, "rc1d_neurons", p.n_neurons_1d);
    read(j, "rc1d_inputs", p.n_inputs_1d);
    read(j, "rc1d_forget_count", p.forget_1d);
    read(j, "reservoirs", p.V);
    read(j, "estimated_paths", p.P_tilde);
    read(j, "mpa_iterations", p.n_iter);
    read(j, "alphabet", p.alphabet);
    read(j, "lsmr_iterations", p.lsmr_iter);
    read(j, "ic_iterations", p.ic_iter);
    return p;
}
} // namespace detail

inline nlohmann::json to_json(const ExperimentConfig &c)
{
    using detail::json;
    json dets = json::array();
    for (const auto &d : c.detectors)
    {
        json e{{"kind", to_string(d.kind)}, {"label", d.name()}};
        if (d.kind == DetectorKind::Rc2d)
            e["rc2d"] = detail::rc2d_to_json(d.rc2d);
        if (d.kind == DetectorKind::Rc1d)
            e["rc1d"] = detail::rc1d_to_json(d.rc1d);
        if (d.kind == DetectorKind::LmmseEstimated)
            e["threshold_factor"] = d.threshold_factor;
        dets.push_back(e);
    }
    return {
        {"name", c.name},
        {"frame",
         {{"M", c.otfs.M},
          {"N", c.otfs.N},
          {"delta_f", c.otfs.delta_f},
          {"carrier_freq", c.otfs.carrier_freq},
          {"variant", to_string(c.otfs.variant)},
          {"n_cp", c.otfs.n_cp},
          {"modulation", to_string(c.otfs.modulation)}}},
        {"pilots", {{"rows", c.pilot_rows}, {"spike_power_db", c.spike_power_db}}},
        {"channel",
         {{"model", c.channel_model == ChannelModel::Random ? "random" : "identity"},
          {"paths", c.channel.paths},
          {"max_delay", c.channel.max_delay},
          {"max_doppler", c.channel.max_doppler},
          {"integer_delay", c.channel.integer_delay},
          {"integer_doppler", c.channel.integer_doppler}}},
        {"detectors", dets},
        {"sweep",
         {{"snr_db", detail::snr_list_to_json(c.snr_db)}, {"subframes", c.subframes}, {"seed", c.master_seed}, {"threads", c.threads}}},
        {"nmse",
         {{"neurons", c.nmse.neurons},
          {"windows", c.nmse.windows},
          {"snr_db", c.nmse.snr_db},
          {"subframes", c.nmse.subframes}}},
        {"complexity", {{"params", detail::complexity_to_json(c.complexity.base)}, {"sizes", c.complexity.sizes}}},
        {"verify",
         {{"trials", c.verify.trials},
          {"delay_sizes", c.verify.delay_sizes},
          {"doppler_sizes", c.verify.doppler_sizes},
          {"max_paths", c.verify.max_paths},
          {"max_delay", c.verify.max_delay},
          {"max_doppler", c.verify.max_doppler},
          {"seed", c.verify.seed}}},
    };
}

inline ExperimentConfig config_from_json(const nlohmann::json &j)
{
    using detail::check_keys;
    using detail::read;
    check_keys(j, {"name", "frame", "pilots", "channel", "detectors", "sweep", "nmse", "complexity", "verify"}, "root");
    ExperimentConfig c;
    read(j, "name", c.name);
    if (j.contains("frame"))
    {
        const auto &f = j.at("frame");
        check_keys(f, {"M", "N", "delta_f", "carrier_freq", "variant", "n_cp", "modulation"}, "frame");
        read(f, "M", c.otfs.M);
        read(f, "N", c.otfs.N);
        read(f, "delta_f", c.otfs.delta_f);
        read(f, "carrier_freq", c.otfs.carrier_freq);
        read(f, "n_cp", c.otfs.n_cp);
        if (f.contains("variant"))
            c.otfs.variant = parse_variant(f.at("variant").get<std::string>());
        if (f.contains("modulation"))
            c.otfs.modulation = parse_modulation(f.at("modulation").get<std::string>());
    }
    if (j.contains("pilots"))
    {
        const auto &p = j.at("pilots");
        check_keys(p, {"rows", "spike_power_db"}, "pilots");
        read(p, "rows", c.pilot_rows);
        read(p, "spike_power_db", c.spike_power_db);
    }
    if (j.contains("channel"))
    {
        const auto &ch = j.at("channel");
        check_keys(ch, {"model", "paths", "max_delay", "max_doppler", "integer_delay", "integer_doppler"}, "channel");
        if (ch.contains("model"))
        {
            const auto m = ch.at("model").get<std::string>();
            if (m == "random")
                c.channel_model = ChannelModel::Random;
            else if (m == "identity")
                c.channel_model = ChannelModel::Identity;
            else
                throw std::invalid_argument("config: unknown channel model '" + m + "'.");
        }
        read(ch, "paths", c.channel.paths);
        read(ch, "max_delay", c.channel.max_delay);
        read(ch, "max_doppler", c.channel.max_doppler);
        read(ch, "integer_delay", c.channel.integer_delay);
        read(ch, "integer_doppler", c.channel.integer_doppler);
    }
    if (j.contains("detectors"))
    {
        if (!j.at("detectors").is_array())
            throw std::invalid_argument("config: 'detectors' must be an array.");
        for (const auto &e : j.at("detectors"))
        {
            check_keys(e, {"kind", "label", "rc2d", "rc1d", "threshold_factor"}, "detectors[]");
            DetectorSpec d;
            d.kind = parse_detector_kind(e.at("kind").get<std::string>());
            read(e, "label", d.label);
            if (e.contains("rc2d"))
                d.rc2d = detail::rc2d_from_json(e.at("rc2d"));
            if (e.contains("rc1d"))
                d.rc1d = detail::rc1d_from_json(e.at("rc1d"));
            read(e, "threshold_factor", d.threshold_factor);
            c.detectors.push_back(d);
        }
    }
    if (j.contains("sweep"))
    {
        const auto &s = j.at("sweep");
        check_keys(s, {"snr_db", "subframes", "seed", "threads"}, "sweep");
        if (s.contains("snr_db"))
            c.snr_db = detail::snr_list_from_json(s.at("snr_db"));
        read(s, "subframes", c.subframes);
        read(s, "seed", c.master_seed);
        read(s, "threads", c.threads);
    }
    if (j.contains("nmse"))
    {
        const auto &s = j.at("nmse");
        check_keys(s, {"neurons", "windows", "snr_db", "subframes"}, "nmse");
        read(s, "neurons", c.nmse.neurons);
        read(s, "windows", c.nmse.windows);
        read(s, "snr_db", c.nmse.snr_db);
        read(s, "subframes", c.nmse.subframes);
    }
    if (j.contains("complexity"))
    {
        const auto &s = j.at("complexity");
        check_keys(s, {"params", "sizes"}, "complexity");
        if (s.contains("params"))
            c.complexity.base = detail::complexity_from_json(s.at("params"));
        read(s, "sizes", c.complexity.sizes);
    }
    if (j.contains("verify"))
    {
        const auto &s = j.at("verify");
        check_keys(s, {"trials", "delay_sizes", "doppler_sizes", "max_paths", "max_delay", "max_doppler", "seed"},
                   "verify");
        read(s, "trials", c.verify.trials);
        read(s, "delay_sizes", c.verify.delay_sizes);
        read(s, "doppler_sizes", c.verify.doppler_sizes);
        read(s, "max_paths", c.verify.max_paths);
        read(s, "max_delay", c.verify.max_delay);
        read(s, "max_doppler", c.verify.max_doppler);
        read(s, "seed", c.verify.seed);
    }
    c.validate();
    return c;
}

inline ExperimentConfig parse_config(const std::string &text)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text, nullptr, true, true);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    try
    {
        return config_from_json(j);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

inline ExperimentConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config '" + path + "'.");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// FNV-1a over the canonical JSON dump.
inline std::uint64_t config_hash(const ExperimentConfig &c)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : to_json(c).dump())
    {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace otfs
