// Copyright 2026 The tn-slicer Authors
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


// Umbrella header.

#ifndef TNSLICER_TNSLICER_HPP_
#define TNSLICER_TNSLICER_HPP_

#include "tnslicer/baselines.hpp"
#include "tnslicer/big_count.hpp"
#include "tnslicer/common.hpp"
#include "tnslicer/cost.hpp"
#include "tnslicer/exec.hpp"
#include "tnslicer/fusion.hpp"
#include "tnslicer/lifetime.hpp"
#include "tnslicer/network.hpp"
#include "tnslicer/permutation.hpp"
#include "tnslicer/refine.hpp"
#include "tnslicer/rng.hpp"
#include "tnslicer/slicing.hpp"
#include "tnslicer/synth.hpp"
#include "tnslicer/tensor.hpp"
#include "tnslicer/tensor_io.hpp"
#include "tnslicer/tree.hpp"

#endif  // TNSLICER_TNSLICER_HPP_
