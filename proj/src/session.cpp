#include "catt/geometry.hpp"

#include "caches.hpp"

namespace catt {

Session::Session()
    : kernel_cache(std::make_unique<KernelCache>()),
      nat_cache(std::make_unique<NatCache>()),
      geo_cache(std::make_unique<GeoCache>()) {}

Session::~Session() = default;

}  // namespace catt
