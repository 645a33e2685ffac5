#include "gsdfront/parallel.hpp"

namespace gsdfront {

std::size_t worker_count(std::size_t requested) {
    if (requested > 0) return requested;
    const auto hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace gsdfront
