// Copyright 2026 The pqs Authors
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

#include <cstdint>
#include <random>

namespace pqs {

using Rng = std::mt19937_64;

/// Independent generator for stream `stream` of a run seeded with `seed`.
/// Streams depend only on (seed, stream), never on scheduling.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace pqs
