// Copyright 2026-present the cqa-engine authors
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

#include "cqa/backends/providers.hpp"
#include "cqa/core/config.hpp"

namespace cqa {

// Mock or HTTP providers per the backend block. The scorer is always the
// overlap scorer. API keys are read from the environment variable the
// config names.
Backends make_backends(const EngineConfig& cfg);

}  // namespace cqa
