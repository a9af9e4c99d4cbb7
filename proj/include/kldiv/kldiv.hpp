#pragma once

// Umbrella header for the library (without the JSON/CSV layer, which needs
// nlohmann/json; include kldiv/io.hpp for that).

#include "kldiv/bounds.hpp"
#include "kldiv/conjectures.hpp"
#include "kldiv/core.hpp"
#include "kldiv/errors.hpp"
#include "kldiv/exact.hpp"
#include "kldiv/moments.hpp"
#include "kldiv/montecarlo.hpp"
#include "kldiv/numeric.hpp"
