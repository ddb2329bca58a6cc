#pragma once

#include <cmath>
#include <random>

#include "nlslab/grid.hpp"
#include "nlslab/random_fields.hpp"

namespace testing {

inline nlslab::Grid default_grid() { return nlslab::Grid(40.0, 4001); }

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace testing
