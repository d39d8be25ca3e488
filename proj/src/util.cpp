#include "qsl/util.hpp"

#include <cstdlib>

namespace qsl {

int worker_count() {
    const char* env = std::getenv("QGEVREY_THREADS");
    int n = env ? std::atoi(env) : 0;
    if (n <= 0) n = (int)std::thread::hardware_concurrency();
    return std::max(1, n);
}

}  // namespace qsl
