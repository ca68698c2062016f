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
#include "modem.hpp"
#include "channel.hpp"
#include "pilots.hpp"
#include "reservoir.hpp"
#include "rc1d.hpp"
#include "rc2d.hpp"
#include "equalizers.hpp"
#include "complexity.hpp"
#include "verification.hpp"
#include "config.hpp"
#include "harness.hpp"
