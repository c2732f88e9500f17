// Copyright 2026 The Authors.
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

#pragma once

#include "dkmips/bctree.hpp"
#include "dkmips/dataset.hpp"
#include "dkmips/error.hpp"
#include "dkmips/evalbench.hpp"
#include "dkmips/greedy.hpp"
#include "dkmips/objective.hpp"
#include "dkmips/oracle.hpp"
#include "dkmips/solve.hpp"
#include "dkmips/synthetic.hpp"
#include "dkmips/verify.hpp"
