// Copyright 2026 The dis2 Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIS2_SEED_H_
#define DIS2_SEED_H_

#include <cstdint>
#include <string_view>

namespace dis2 {

// 64-bit FNV-1a of the bytes of `text`. Stable across platforms.
uint64_t StableHash(std::string_view text);

// splitmix64 finalizer.
uint64_t MixSeed(uint64_t x);

// Seed for one component of a run: mixes the suite seed, the FNV-1a hash of
// the component name and an index.
uint64_t DeriveSeed(uint64_t suite_seed, std::string_view component,
                    uint64_t index = 0);

}  // namespace dis2

#endif  // DIS2_SEED_H_
