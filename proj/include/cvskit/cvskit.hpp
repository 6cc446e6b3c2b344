// Copyright 2026 The cvskit Authors.
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

#ifndef CVSKIT_CVSKIT_HPP
#define CVSKIT_CVSKIT_HPP

#include "cvskit/ceiling.hpp"
#include "cvskit/datamodel.hpp"
#include "cvskit/io.hpp"
#include "cvskit/lab/config.hpp"
#include "cvskit/lab/dataset.hpp"
#include "cvskit/lab/experiment.hpp"
#include "cvskit/lab/gumbel.hpp"
#include "cvskit/lab/optimizer.hpp"
#include "cvskit/lab/ternary_net.hpp"
#include "cvskit/phase.hpp"
#include "cvskit/quadrants.hpp"
#include "cvskit/report_json.hpp"
#include "cvskit/routing.hpp"
#include "cvskit/trajectory.hpp"

#endif  // CVSKIT_CVSKIT_HPP
