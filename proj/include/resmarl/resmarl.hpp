// Copyright 2026 The resmarl Authors
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

#include "resmarl/adversary.hpp"
#include "resmarl/agent.hpp"
#include "resmarl/cli.hpp"
#include "resmarl/config.hpp"
#include "resmarl/consensus.hpp"
#include "resmarl/engine.hpp"
#include "resmarl/errors.hpp"
#include "resmarl/features.hpp"
#include "resmarl/graph.hpp"
#include "resmarl/markov.hpp"
#include "resmarl/mdp.hpp"
#include "resmarl/mdp_io.hpp"
#include "resmarl/random.hpp"
#include "resmarl/schedule.hpp"
#include "resmarl/trajectory.hpp"
