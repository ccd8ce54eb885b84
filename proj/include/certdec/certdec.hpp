/*
   Copyright 2026 The certdec Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include "certdec/adoption.hpp"
#include "certdec/asif.hpp"
#include "certdec/config.hpp"
#include "certdec/confset.hpp"
#include "certdec/core.hpp"
#include "certdec/ecert.hpp"
#include "certdec/normal.hpp"
#include "certdec/rng.hpp"
#include "certdec/sim/adoption_sim.hpp"
#include "certdec/sim/audit.hpp"
#include "certdec/sim/etrack.hpp"
#include "certdec/sim/harness.hpp"
#include "certdec/sim/scenario.hpp"
#include "certdec/sim/treatment.hpp"
#include "certdec/sim/winners.hpp"
