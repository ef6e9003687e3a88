// SPDX-License-Identifier: Apache-2.0
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

#include "bsar/core/chirp.hpp"
#include "bsar/core/correlate.hpp"
#include "bsar/core/fft.hpp"
#include "bsar/core/matrix.hpp"
#include "bsar/core/phase.hpp"
#include "bsar/decompose.hpp"
#include "bsar/error.hpp"
#include "bsar/estimate.hpp"
#include "bsar/focus.hpp"
#include "bsar/io/bsar_file.hpp"
#include "bsar/io/json.hpp"
#include "bsar/io/pgm.hpp"
#include "bsar/quality.hpp"
#include "bsar/simulate.hpp"
#include "bsar/version.hpp"
