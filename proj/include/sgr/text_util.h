/*
 * Copyright 2026 The SGR Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SGR_TEXT_UTIL_H_
#define SGR_TEXT_UTIL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace sgr {

// Splits on ASCII whitespace; empty tokens are dropped.
std::vector<std::string> Tokenize(std::string_view text);

// Number of Unicode code points in a UTF-8 string. Invalid bytes count as
// one code point each.
std::size_t Utf8Length(std::string_view text);

// 64-bit FNV-1a. Stable across platforms, used wherever a hash leaks into
// output (seeds, fixture keys, mock noise).
std::uint64_t Fnv1a64(std::string_view data,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

// 16 lowercase hex digits of Fnv1a64(text).
std::string PromptHash(std::string_view text);

// splitmix64 finalizer.
std::uint64_t MixSeed(std::uint64_t value);

// Seed for one (session, step) work item, independent of scheduling.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view session_id,
                         std::uint64_t ordinal);

// Uniform integer in [0, bound) from a 64-bit engine by rejection, so that
// output does not depend on the standard library's distributions.
template <typename Engine>
std::uint64_t UniformIndex(Engine& engine, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw;
  do {
    draw = engine();
  } while (draw >= limit);
  return draw % bound;
}

// Uniform real in [0, 1) with 53 bits of precision.
template <typename Engine>
double UniformUnit(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Exceptions thrown
// by fn are rethrown on the calling thread (the one with the lowest index
// wins).
void ParallelFor(std::size_t count, int jobs,
                 const std::function<void(std::size_t)>& fn);

}  // namespace sgr

#endif  // SGR_TEXT_UTIL_H_
