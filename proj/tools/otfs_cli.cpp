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

// Command-line driver: runs one study from a JSON config and writes CSV plus a metadata sidecar.

#include "CLI11.hpp"

#include "otfs/otfs.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>

namespace
{
struct Common
{
    std::string config;
    std::string out;
    std::optional<int> subframes;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App *cmd, Common &c, const std::string &default_out)
{
    cmd->add_option("config", c.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    c.out = default_out;
    cmd->add_option("-o,--out", c.out, "Output CSV path")->capture_default_str();
    cmd->add_option("--subframes", c.subframes, "Override the subframe count");
    cmd->add_option("--threads", c.threads, "Override the worker count (0 = all cores)");
    cmd->add_option("--seed", c.seed, "Override the master seed");
}

otfs::ExperimentConfig load(const Common &c)
{
    otfs::ExperimentConfig cfg = otfs::load_config(c.config);
    if (c.subframes)
        cfg.subframes = *c.subframes;
    if (c.threads)
        cfg.threads = *c.threads;
    if (c.seed)
        cfg.master_seed = *c.seed;
    cfg.validate();
    return cfg;
}

void emit(const Common &c, const otfs::ExperimentConfig &cfg, const std::string &kind, const std::string &csv,
          double seconds)
{
    otfs::write_text(c.out, csv);
    const auto meta = otfs::sidecar_path(c.out);
    otfs::write_text(meta, otfs::run_metadata(cfg, kind, seconds).dump(2) + "\n");
    std::cerr << "wrote " << c.out << " and " << meta.string() << " (" << seconds << " s)\n";
}

int run_sweep(const Common &c)
{
    const auto cfg = load(c);
    const auto r = otfs::run_sweep(cfg);
    for (const auto &f : r.failures)
        std::cerr << "frame failure: " << f << "\n";
    emit(c, cfg, "ber", otfs::ber_csv(r), r.seconds);
    return 0;
}

int run_nmse(const Common &c)
{
    const auto cfg = load(c);
    const auto r = otfs::nmse_report(cfg);
    emit(c, cfg, "nmse", otfs::nmse_csv(r), r.seconds);
    if (!r.train_monotone())
    {
        std::cerr << "training NMSE increased with the neuron count\n";
        return 1;
    }
    return 0;
}

int run_complexity(const Common &c)
{
    const auto cfg = load(c);
    emit(c, cfg, "complexity", otfs::complexity_csv(otfs::complexity_table(cfg.complexity)), 0.0);
    const auto rep = otfs::crossover_report(cfg.complexity.base);
    for (const auto &q : rep.inequalities)
        std::cout << "rc2d readout " << q.lhs << (q.holds ? " < " : " >= ") << q.versus << " bound " << q.rhs << "\n";
    std::cout << "rc1d training branch: " << (rep.rc1d_small_readout ? "small readout" : "large readout")
              << (rep.rc1d_at_boundary ? " (at the boundary)" : "") << "\n";
    return 0;
}

int run_verify(const Common &c)
{
    const auto cfg = load(c);
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = otfs::verify_channel(cfg.verify);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(c, cfg, "verify", otfs::verify_csv(s), sec);
    for (const char *check : {"rcp_oracle", "cp_sample", "rcp_integer", "cp_integer"})
        std::cout << check << ": worst " << s.worst(check) << (s.passed(check) ? " ok" : " FAILED") << "\n";
    return s.all_passed() ? 0 : 1;
}
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Delay-Doppler link simulator with reservoir-computing detectors", "otfs"};
    app.set_version_flag("--version", std::string(OTFS_VERSION));
    app.require_subcommand(1);

    Common sweep, nmse, cplx, verify;
    add_common(app.add_subcommand("sweep", "Monte-Carlo BER sweep"), sweep, "ber.csv");
    add_common(app.add_subcommand("nmse", "Training and test NMSE over the neurons x window grid"), nmse, "nmse.csv");
    add_common(app.add_subcommand("complexity", "Operation counts and crossover bounds"), cplx, "complexity.csv");
    add_common(app.add_subcommand("verify-channel", "Check the effective-channel kernels against the oracles"),
               verify, "verify.csv");

    CLI11_PARSE(app, argc, argv);
    try
    {
        if (app.got_subcommand("sweep"))
            return run_sweep(sweep);
        if (app.got_subcommand("nmse"))
            return run_nmse(nmse);
        if (app.got_subcommand("complexity"))
            return run_complexity(cplx);
        return run_verify(verify);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
