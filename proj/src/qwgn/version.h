// Copyright 2026 The qwgn Authors
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

#ifndef QWGN_VERSION_H
#define QWGN_VERSION_H

namespace qwgn {

inline constexpr const char *kVersion = "0.1.0";

// Bumped whenever the corresponding output changes bit-for-bit.
inline constexpr int kEntropySimVersion = 1;
inline constexpr int kExtractorVersion = 1;
inline constexpr int kIcdfCoreVersion = 1;
inline constexpr int kWgnSynthVersion = 1;

}  // namespace qwgn

#endif
