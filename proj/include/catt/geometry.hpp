#pragma once

#include "catt/metaops.hpp"
#include "catt/naturality.hpp"

namespace catt {

// Filled in below as the geometry layer is defined.
struct GeoCache;

}  // namespace catt
