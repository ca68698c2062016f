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

// One subframe through the whole link: pilots and data, a fractional doubly dispersive channel,
// noise, then 2D-RC detection next to LMMSE with perfect channel knowledge.

#include "otfs/otfs.hpp"

#include <cstdlib>
#include <iomanip>
#include <iostream>

using namespace otfs;

int main(int argc, char **argv)
{
    const double snr_db = argc > 1 ? std::atof(argv[1]) : 20.0;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;

    OtfsConfig cfg; // 64 x 14, QPSK, reduced CP
    const PilotPattern pattern = blockwise_mask(cfg, 6);
    std::mt19937_64 rng(seed);

    const BitVector bits = random_bits(pattern, cfg.modulation, rng);
    const FramePlan plan = assemble_frame(bits, pattern, cfg, rng());
    const PathChannel chan = random_channel(ChannelSpec{3, 2.0, 0.5}, rng);

    std::cout << "frame " << cfg.M << " x " << cfg.N << ", " << plan.n_data() << " data symbols, pilot overhead "
              << pattern.overhead() << "\n";
    for (const auto &p : chan.paths)
        std::cout << "  path |h| " << std::setw(8) << std::abs(p.gain) << "  delay " << std::setw(8) << p.delay
                  << "  Doppler " << std::setw(9) << p.doppler << "\n";

    const ComplexVector rx = add_awgn(apply_time(modulate(plan.X, cfg), chan, cfg), snr_db, rng());
    const ComplexMatrix Y = demodulate(rx, cfg);

    Rc2dParams p;
    p.window_delay = 3;
    p.window_doppler = 3;
    p.forget_delay = {0, 1, 2, 3};
    p.forget_doppler = {0, 1, 2, 3, 4};
    p.l_c = 2;
    const auto rc = rc2d_detect(Y, plan, p, cfg);
    const auto rc_err = count_bit_errors(rc.detection.bits, plan.bits);

    const ComplexMatrix X_lmmse = lmmse_dd(Y, effective_channel(chan, cfg), noise_variance(snr_db));
    const auto lm = finish_detection(X_lmmse, plan, cfg.modulation);
    const auto lm_err = count_bit_errors(lm.bits, plan.bits);

    const double n = static_cast<double>(plan.bits.size());
    std::cout << "Es/N0 " << snr_db << " dB\n"
              << "  2D-RC         BER " << rc_err / n << "  (forget " << rc.m_f << ", " << rc.n_f
              << ", training NMSE " << rc.report.nmse << ")\n"
              << "  LMMSE, known  BER " << lm_err / n << "\n";
    return 0;
}
