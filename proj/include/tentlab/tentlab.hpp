#pragma once

#include "carleson.hpp"
#include "common.hpp"
#include "criteria.hpp"
#include "functions.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "measures.hpp"
#include "norms.hpp"
#include "rng.hpp"
#include "selftest.hpp"

namespace tentlab {
inline constexpr const char* kVersion = "0.1.0";
}
