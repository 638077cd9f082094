// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ippp/error.hpp"
#include "ippp/quadrature.hpp"
#include "ippp/rate_expr.hpp"
#include "ippp/rate_model.hpp"
#include "ippp/rng.hpp"
#include "ippp/sampling_bounded.hpp"
#include "ippp/sampling_line.hpp"

namespace ippp {
inline constexpr const char* kVersion = "0.1.0";
}
