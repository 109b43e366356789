// Copyright 2026 The brdgen Authors.
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

#include "brd/kernels/kernels.hpp"

#include <stdexcept>

#include "brd/errors.hpp"

namespace brd::kernels {
namespace {

const Ops* g_active = nullptr;

const Ops& resolve_auto() {
  if (const Ops* simd = avx2_ops(); simd != nullptr && avx2_supported()) {
    return *simd;
  }
  return scalar_ops();
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::vector<std::string> available_backends() {
  std::vector<std::string> names{"scalar"};
  if (avx2_ops() != nullptr && avx2_supported()) names.emplace_back("avx2");
  return names;
}

std::string set_backend(std::string_view name) {
  if (name == "auto") {
    g_active = &resolve_auto();
  } else if (name == "scalar") {
    g_active = &scalar_ops();
  } else if (name == "avx2") {
    const Ops* simd = avx2_ops();
    if (simd == nullptr || !avx2_supported()) {
      throw ConfigError("kernel backend 'avx2' is not supported on this CPU");
    }
    g_active = simd;
  } else {
    throw std::invalid_argument("unknown kernel backend '" + std::string(name) +
                                "' (expected auto|scalar|avx2)");
  }
  return g_active->name;
}

const Ops& active() {
  if (g_active == nullptr) g_active = &resolve_auto();
  return *g_active;
}

std::string active_name() { return active().name; }

}  // namespace brd::kernels
