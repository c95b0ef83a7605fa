// Copyright 2026 The fockbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "fockbench/appendix.hpp"
#include "fockbench/circuits.hpp"
#include "fockbench/devices.hpp"
#include "fockbench/fock_core.hpp"
#include "fockbench/gate_preset.hpp"
#include "fockbench/linear_optics.hpp"
#include "fockbench/metrics.hpp"
#include "fockbench/optimize.hpp"
#include "fockbench/preset_io.hpp"
#include "fockbench/sweep.hpp"
