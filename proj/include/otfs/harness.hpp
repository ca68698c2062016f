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

// Seeded Monte-Carlo sweeps, NMSE grid study, complexity tables and CSV/metadata output.

#include "config.hpp"
#include "equalizers.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <thread>

namespace otfs
{

inline constexpr const char *ber_csv_schema = "# otfs-rc ber-csv v1";
inline constexpr const char *nmse_csv_schema = "# otfs-rc nmse-csv v1";
inline constexpr const char *complexity_csv_schema = "# otfs-rc complexity-csv v1";
inline constexpr const char *verify_csv_schema = "# otfs-rc verify-csv v1";

#ifndef OTFS_VERSION
#define OTFS_VERSION "0.1.0"
#endif

struct Interval
{
    double lo = 0.0, hi = 1.0;
};

/// Wilson score interval for a binomial proportion (z = 1.96 gives 95%).
inline Interval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z = 1.959963984540054)
{
    if (trials == 0)
        return {0.0, 1.0};
    const double n = static_cast<double>(trials), p = static_cast<double>(errors) / n, z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

inline bool intervals_overlap(const Interval &a, const Interval &b) { return a.lo <= b.hi && b.lo <= a.hi; }

/// Runs fn(i) for i in [0, count) on `threads` workers; rethrows the first failure.
template <class Fn>
void parallel_for(int count, int threads, Fn &&fn)
{
    if (threads <= 0)
        threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, std::max(count, 1));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex guard;
    auto worker = [&]
    {
        for (int i = next++; i < count; i = next++)
        {
            try
            {
                fn(i);
            }
            catch (...)
            {
                std::lock_guard lock(guard);
                if (!failure)
                    failure = std::current_exception();
                next = count;
            }
        }
    };
    if (threads == 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);
}

// ------------------------------------------------------------------------
// Frames

/// Everything a subframe shares across detectors and SNR points.
struct SubframeDraw
{
    PathChannel channel;
    BitVector bits;
    std::uint64_t pilot_seed = 0, noise_seed = 0;
};

inline SubframeDraw draw_subframe(const ExperimentConfig &cfg, int frame_index)
{
    const std::uint64_t fs = mix_seed(cfg.master_seed, static_cast<std::uint64_t>(frame_index));
    SubframeDraw d;
    if (cfg.channel_model == ChannelModel::Identity)
        d.channel.paths.push_back({cd(1.0), 0.0, 0.0});
    else
    {
        std::mt19937_64 rng(mix_seed(fs, 1));
        d.channel = random_channel(cfg.channel, rng);
    }
    std::mt19937_64 bit_rng(mix_seed(fs, 2));
    d.bits = random_bits(cfg.pattern(PilotKind::Blockwise), cfg.otfs.modulation, bit_rng);
    d.pilot_seed = mix_seed(fs, 3);
    d.noise_seed = mix_seed(fs, 4);
    return d;
}

/// One transmitted frame per pilot kind, sharing data bits, channel and noise realization.
struct LinkFrame
{
    PilotPattern pattern;
    FramePlan plan;
    ComplexVector clean; // channel output before noise
};

inline LinkFrame make_link_frame(const ExperimentConfig &cfg, const SubframeDraw &d, PilotKind kind)
{
    LinkFrame f;
    f.pattern = cfg.pattern(kind);
    f.plan = assemble_frame(d.bits, f.pattern, cfg.otfs, d.pilot_seed);
    f.clean = apply_time(modulate(f.plan.X, cfg.otfs), d.channel, cfg.otfs);
    return f;
}

struct FrameOutcome
{
    bool ok = false;
    std::uint64_t errors = 0, bits = 0;
    double train_nmse = 0.0, nmse = 0.0, seconds = 0.0;
    std::string error;
};

struct DetectorStats
{
    std::string detector;
    double snr_db = 0.0;
    std::uint64_t bits = 0, errors = 0;
    int frames = 0, failed = 0;
    double train_nmse_sum = 0.0, nmse_sum = 0.0, seconds = 0.0;

    double ber() const { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
    Interval interval() const { return wilson_interval(errors, bits); }
    double train_nmse() const { return frames ? train_nmse_sum / frames : 0.0; }
    double nmse() const { return frames ? nmse_sum / frames : 0.0; }
};

struct RunResult
{
    std::vector<DetectorStats> stats; // detector-major, SNR-minor
    std::vector<std::string> failures;
    std::uint64_t config_hash = 0;
    std::uint64_t master_seed = 0;
    double seconds = 0.0;

    const DetectorStats &at(const std::string &detector, double snr_db) const
    {
        for (const auto &s : stats)
            if (s.detector == detector && s.snr_db == snr_db)
                return s;
        throw std::out_of_range("RunResult: no entry for " + detector + " at " + std::to_string(snr_db) + " dB.");
    }
};

namespace detail
{
inline FrameOutcome score(const Detection &det, const FramePlan &plan, const ComplexMatrix &X_raw)
{
    FrameOutcome o;
    o.ok = true;
    o.errors = count_bit_errors(det.bits, plan.bits);
    o.bits = plan.bits.size();
    o.train_nmse = det.train_nmse;
    o.nmse = data_nmse(X_raw, plan);
    return o;
}
} // namespace detail

/// Runs one detector on one received frame.
inline FrameOutcome run_detector(const DetectorSpec &spec, const Rc2dModel *model, const ExperimentConfig &cfg,
                                 const LinkFrame &frame, const ComplexVector &received, const PathChannel &chan,
                                 double snr_db)
{
    const auto t0 = std::chrono::steady_clock::now();
    FrameOutcome o;
    try
    {
        const OtfsConfig &oc = cfg.otfs;
        switch (spec.kind)
        {
        case DetectorKind::Rc2d:
        {
            const auto r = rc2d_detect(demodulate(received, oc), frame.plan, *model, oc);
            o = detail::score(r.detection, frame.plan, r.detection.X_raw);
            break;
        }
        case DetectorKind::Rc1d:
        {
            const auto r = rc1d_detect(received, frame.plan, spec.rc1d, oc);
            o = detail::score(r.detection, frame.plan, r.detection.X_raw);
            break;
        }
        case DetectorKind::LmmsePerfect:
        {
            const ComplexMatrix X = lmmse_dd(demodulate(received, oc), effective_channel(chan, oc),
                                             noise_variance(snr_db));
            o = detail::score(finish_detection(X, frame.plan, oc.modulation), frame.plan, X);
            break;
        }
        case DetectorKind::LmmseEstimated:
        {
            const ComplexMatrix Y = demodulate(received, oc);
            const CsiEstimate csi = estimate_csi_spike(Y, frame.pattern, spec.threshold_factor, oc);
            const ComplexMatrix X = lmmse_estimated(Y, csi, oc, &frame.plan);
            o = detail::score(finish_detection(X, frame.plan, oc.modulation), frame.plan, X);
            break;
        }
        }
    }
    catch (const std::exception &e)
    {
        o = FrameOutcome{};
        o.error = e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return o;
}

/// Monte-Carlo BER sweep. Frame i uses the same channel, bits and unit-variance noise draw at
/// every SNR point, and every detector sees the same received data. Results do not depend on
/// the worker count.
inline RunResult run_sweep(const ExperimentConfig &cfg)
{
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t D = cfg.detectors.size(), S = cfg.snr_db.size();

    std::vector<std::optional<Rc2dModel>> models(D);
    for (std::size_t d = 0; d < D; ++d)
        if (cfg.detectors[d].kind == DetectorKind::Rc2d)
            models[d].emplace(cfg.detectors[d].rc2d);

    std::vector<FrameOutcome> outcomes(static_cast<std::size_t>(cfg.subframes) * D * S);
    auto slot = [&](int f, std::size_t d, std::size_t s) -> FrameOutcome &
    { return outcomes[(static_cast<std::size_t>(f) * D + d) * S + s]; };

    parallel_for(cfg.subframes, cfg.threads,
                 [&](int f)
                 {
                     const SubframeDraw draw = draw_subframe(cfg, f);
                     std::optional<LinkFrame> block, spike;
                     for (const auto &d : cfg.detectors)
                     {
                         if (d.pilot() == PilotKind::Blockwise && !block)
                             block = make_link_frame(cfg, draw, PilotKind::Blockwise);
                         if (d.pilot() == PilotKind::SpikeGuard && !spike)
                             spike = make_link_frame(cfg, draw, PilotKind::SpikeGuard);
                     }
                     for (std::size_t s = 0; s < S; ++s)
                     {
                         std::optional<ComplexVector> rx_block, rx_spike;
                         if (block)
                             rx_block = add_awgn(block->clean, cfg.snr_db[s], draw.noise_seed);
                         if (spike)
                             rx_spike = add_awgn(spike->clean, cfg.snr_db[s], draw.noise_seed);
                         for (std::size_t d = 0; d < D; ++d)
                         {
                             const auto &spec = cfg.detectors[d];
                             const bool blk = spec.pilot() == PilotKind::Blockwise;
                             slot(f, d, s) = run_detector(spec, models[d] ? &*models[d] : nullptr, cfg,
                                                          blk ? *block : *spike, blk ? *rx_block : *rx_spike,
                                                          draw.channel, cfg.snr_db[s]);
                         }
                     }
                 });

    RunResult out;
    out.config_hash = config_hash(cfg);
    out.master_seed = cfg.master_seed;
    for (std::size_t d = 0; d < D; ++d)
        for (std::size_t s = 0; s < S; ++s)
        {
            DetectorStats st;
            st.detector = cfg.detectors[d].name();
            st.snr_db = cfg.snr_db[s];
            for (int f = 0; f < cfg.subframes; ++f)
            {
                const FrameOutcome &o = slot(f, d, s);
                st.seconds += o.seconds;
                if (!o.ok)
                {
                    ++st.failed;
                    out.failures.push_back(st.detector + " @ " + std::to_string(st.snr_db) + " dB, frame " +
                                           std::to_string(f) + ": " + o.error);
                    continue;
                }
                ++st.frames;
                st.bits += o.bits;
                st.errors += o.errors;
                st.train_nmse_sum += o.train_nmse;
                st.nmse_sum += o.nmse;
            }
            out.stats.push_back(st);
        }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

// ------------------------------------------------------------------------
// NMSE grid study

struct NmseCell
{
    int neurons = 0, window_delay = 0, window_doppler = 0;
    double train_nmse = 0.0, test_nmse = 0.0;
    int frames = 0;
};

struct NmseResult
{
    std::vector<NmseCell> cells; // window-major, neurons ascending
    std::uint64_t config_hash = 0;
    double seconds = 0.0;

    /// Training NMSE never increases with the neuron count at a fixed window.
    bool train_monotone(double rel_slack = 1e-9) const
    {
        for (std::size_t i = 1; i < cells.size(); ++i)
        {
            const auto &a = cells[i - 1], &b = cells[i];
            if (a.window_delay == b.window_delay && a.window_doppler == b.window_doppler &&
                b.train_nmse > a.train_nmse * (1.0 + rel_slack))
                return false;
        }
        return true;
    }
};

/// Training and test NMSE over the (neurons x window) grid. For each window one nested weight
/// draw serves every neuron count, so the smaller reservoirs are exact sub-networks of the
/// larger ones, and the forget lengths are searched exhaustively.
inline NmseResult nmse_report(const ExperimentConfig &cfg)
{
    cfg.validate();
    cfg.nmse.validate(cfg.otfs.M, cfg.otfs.N);
    const auto t0 = std::chrono::steady_clock::now();
    Rc2dParams base;
    for (const auto &d : cfg.detectors)
        if (d.kind == DetectorKind::Rc2d)
        {
            base = d.rc2d;
            break;
        }
    base.search = ForgetSearch::Exhaustive;
    std::vector<int> neurons = cfg.nmse.neurons;
    std::sort(neurons.begin(), neurons.end());
    neurons.erase(std::unique(neurons.begin(), neurons.end()), neurons.end());

    const std::size_t W = cfg.nmse.windows.size(), K = neurons.size();
    std::vector<Rc2dWeights> weights;
    for (const auto &w : cfg.nmse.windows)
    {
        std::mt19937_64 rng(base.seed);
        weights.push_back(
            draw_rc2d_weights(neurons, w[0] * w[1], base.spectral_radius, base.sparsity, base.input_scale, rng));
    }

    std::vector<std::pair<double, double>> per(static_cast<std::size_t>(cfg.nmse.subframes) * W * K);
    parallel_for(cfg.nmse.subframes, cfg.threads,
                 [&](int f)
                 {
                     const SubframeDraw draw = draw_subframe(cfg, f);
                     const LinkFrame frame = make_link_frame(cfg, draw, PilotKind::Blockwise);
                     const ComplexMatrix Y =
                         demodulate(add_awgn(frame.clean, cfg.nmse.snr_db, draw.noise_seed), cfg.otfs);
                     for (std::size_t w = 0; w < W; ++w)
                     {
                         Rc2dParams p = base;
                         p.window_delay = cfg.nmse.windows[w][0];
                         p.window_doppler = cfg.nmse.windows[w][1];
                         const ComplexTensor3 input = rc2d_preprocess(Y, p, cfg.otfs.variant);
                         for (std::size_t n = 0; n < K; ++n)
                         {
                             p.n_neurons = neurons[n];
                             Rc2dModel model(p, weights[w].leading(neurons[n]));
                             const ComplexTensor3 ext = model.states(input);
                             const auto rep = rc2d_train(ext, frame.plan.X_train, frame.plan.mask, p.forget_delay,
                                                         p.forget_doppler, model, ForgetSearch::Exhaustive);
                             per[(static_cast<std::size_t>(f) * W + w) * K + n] = {
                                 rep.nmse, data_nmse(model.predict(ext, cfg.otfs.M, cfg.otfs.N), frame.plan)};
                         }
                     }
                 });

    NmseResult out;
    out.config_hash = config_hash(cfg);
    for (std::size_t w = 0; w < W; ++w)
        for (std::size_t n = 0; n < K; ++n)
        {
            NmseCell c{neurons[n], cfg.nmse.windows[w][0], cfg.nmse.windows[w][1], 0.0, 0.0, cfg.nmse.subframes};
            for (int f = 0; f < cfg.nmse.subframes; ++f)
            {
                const auto &v = per[(static_cast<std::size_t>(f) * W + w) * K + n];
                c.train_nmse += v.first;
                c.test_nmse += v.second;
            }
            c.train_nmse /= cfg.nmse.subframes;
            c.test_nmse /= cfg.nmse.subframes;
            out.cells.push_back(c);
        }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

// ------------------------------------------------------------------------
// Complexity table

struct ComplexityRow
{
    Method method;
    Phase phase;
    int M = 0, N = 0;
    double count = 0.0;
};

inline std::vector<ComplexityRow> complexity_table(const ComplexityStudy &study)
{
    std::vector<ComplexityRow> rows;
    for (const auto &sz : study.sizes)
    {
        ComplexityParams p = study.base;
        p.M = sz[0];
        p.N = sz[1];
        for (Method m : all_methods())
            for (Phase ph : {Phase::TrainOrEstimate, Phase::TestOrDetect})
                rows.push_back({m, ph, sz[0], sz[1], count(m, ph, p)});
    }
    return rows;
}

// ------------------------------------------------------------------------
// CSV and metadata

namespace detail
{
inline std::string num(double v)
{
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}
} // namespace detail

inline std::string ber_csv(const RunResult &r)
{
    std::ostringstream os;
    os << ber_csv_schema << "\n"
       << "detector,snr_db,ber,ber_lo,ber_hi,nmse,train_nmse,errors,bits,frames,failed\n";
    for (const auto &s : r.stats)
    {
        const Interval ci = s.interval();
        os << s.detector << ',' << detail::num(s.snr_db) << ',' << detail::num(s.ber()) << ',' << detail::num(ci.lo)
           << ',' << detail::num(ci.hi) << ',' << detail::num(s.nmse()) << ',' << detail::num(s.train_nmse()) << ','
           << s.errors << ',' << s.bits << ',' << s.frames << ',' << s.failed << '\n';
    }
    return os.str();
}

inline std::string nmse_csv(const NmseResult &r)
{
    std::ostringstream os;
    os << nmse_csv_schema << "\n"
       << "neurons,window_delay,window_doppler,inputs,train_nmse,test_nmse,frames\n";
    for (const auto &c : r.cells)
        os << c.neurons << ',' << c.window_delay << ',' << c.window_doppler << ',' << c.window_delay * c.window_doppler
           << ',' << detail::num(c.train_nmse) << ',' << detail::num(c.test_nmse) << ',' << c.frames << '\n';
    return os.str();
}

inline std::string complexity_csv(const std::vector<ComplexityRow> &rows)
{
    std::ostringstream os;
    os << complexity_csv_schema << "\nmethod,phase,M,N,count\n";
    for (const auto &r : rows)
        os << to_string(r.method) << ',' << to_string(r.phase) << ',' << r.M << ',' << r.N << ','
           << detail::num(r.count) << '\n';
    return os.str();
}

inline std::string verify_csv(const VerifySummary &s)
{
    std::ostringstream os;
    os << verify_csv_schema << "\ncheck,M,N,trial,error,tolerance,passed\n";
    for (const auto &c : s.cases)
        os << c.check << ',' << c.M << ',' << c.N << ',' << c.trial << ',' << detail::num(c.error) << ','
           << detail::num(c.tolerance) << ',' << (c.passed() ? 1 : 0) << '\n';
    return os.str();
}

inline std::string hex64(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

/// Sidecar with everything needed to rerun the experiment.
inline nlohmann::json run_metadata(const ExperimentConfig &cfg, const std::string &kind, double seconds)
{
    return {{"schema", "otfs-rc metadata v1"},
            {"kind", kind},
            {"version", OTFS_VERSION},
            {"config_hash", hex64(config_hash(cfg))},
            {"master_seed", cfg.master_seed},
            {"snr_axis", "Es/N0 [dB]"},
            {"seed_derivation", "frame seed = splitmix64 mix of (master seed, frame index)"},
            {"wall_seconds", seconds},
            {"config", to_json(cfg)}};
}

inline void write_text(const std::filesystem::path &path, const std::string &text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'.");
    out << text;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path &csv)
{
    auto p = csv;
    p.replace_extension(".meta.json");
    return p;
}

} // namespace otfs
