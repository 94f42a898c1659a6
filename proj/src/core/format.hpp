/*
 * Copyright 2026 The MTMT Uplift Authors.
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

#ifndef MTMT_CORE_FORMAT_HPP_
#define MTMT_CORE_FORMAT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace mtmt {

// Shortest representation that parses back to the identical double.
std::string format_double(double value);
// Strict parse of a whole cell; false on trailing garbage or a non-finite value.
bool parse_double(std::string_view text, double* out);
bool parse_int(std::string_view text, long long* out);

// 64-bit FNV-1a, used for parameter and file digests.
uint64_t fnv1a(std::span<const unsigned char> bytes, uint64_t state = 0xcbf29ce484222325ULL);
std::string hex_digest(uint64_t digest);

std::string_view trim(std::string_view text);

}  // namespace mtmt

#endif  // MTMT_CORE_FORMAT_HPP_
