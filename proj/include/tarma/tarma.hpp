// Copyright 2026 The tarmagarch Authors
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

#ifndef TARMA__TARMA_HPP_
#define TARMA__TARMA_HPP_

#include "tarma/analysis.hpp"
#include "tarma/core.hpp"
#include "tarma/critical_values.hpp"
#include "tarma/diagnostics.hpp"
#include "tarma/error.hpp"
#include "tarma/estimate.hpp"
#include "tarma/filter.hpp"
#include "tarma/json.hpp"
#include "tarma/mc.hpp"
#include "tarma/optimize.hpp"
#include "tarma/rng.hpp"
#include "tarma/score.hpp"
#include "tarma/simulate.hpp"
#include "tarma/sup_lm.hpp"
#include "tarma/svg.hpp"
#include "tarma/tarma_ls.hpp"

#endif  // TARMA__TARMA_HPP_
