// Copyright 2026 The qpec Authors
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

// Umbrella header for the qpec library.
#pragma once

#include "qpec/error.hpp"
#include "qpec/channel.hpp"
#include "qpec/gates.hpp"
#include "qpec/noise.hpp"
#include "qpec/bases.hpp"
#include "qpec/simplex.hpp"
#include "qpec/decomposer.hpp"
#include "qpec/rng.hpp"
#include "qpec/random.hpp"
#include "qpec/bounds.hpp"
#include "qpec/pec.hpp"
#include "qpec/io.hpp"
