// Copyright 2026 The dynfab Authors.
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

#ifndef DYNFAB_DYNFAB_HPP_
#define DYNFAB_DYNFAB_HPP_

#include "dynfab/config.hpp"
#include "dynfab/core.hpp"
#include "dynfab/diffgeo.hpp"
#include "dynfab/dynamic.hpp"
#include "dynfab/energy.hpp"
#include "dynfab/io.hpp"
#include "dynfab/leaves.hpp"
#include "dynfab/planner.hpp"
#include "dynfab/reference.hpp"
#include "dynfab/robots.hpp"
#include "dynfab/scenarios.hpp"
#include "dynfab/sim.hpp"
#include "dynfab/spec.hpp"

#endif  // DYNFAB_DYNFAB_HPP_
