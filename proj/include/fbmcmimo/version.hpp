// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace fbmcmimo {

inline constexpr const char* kVersion = "fbmc-mimo-sim 1.0.0";

}  // namespace fbmcmimo
