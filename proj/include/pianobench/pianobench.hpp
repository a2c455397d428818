// Copyright 2026 The pianobench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header.

#ifndef PIANOBENCH_PIANOBENCH_HPP_
#define PIANOBENCH_PIANOBENCH_HPP_

#include "pianobench/commands.hpp"
#include "pianobench/config.hpp"
#include "pianobench/env.hpp"
#include "pianobench/fingering.hpp"
#include "pianobench/hands.hpp"
#include "pianobench/keyboard.hpp"
#include "pianobench/layout.hpp"
#include "pianobench/metrics.hpp"
#include "pianobench/midi.hpp"
#include "pianobench/planner.hpp"
#include "pianobench/policy.hpp"
#include "pianobench/protocol.hpp"
#include "pianobench/score.hpp"
#include "pianobench/service.hpp"
#include "pianobench/songs.hpp"
#include "pianobench/spline.hpp"
#include "pianobench/text.hpp"
#include "pianobench/trajectory.hpp"

#endif  // PIANOBENCH_PIANOBENCH_HPP_
