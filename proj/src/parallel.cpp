#include "kgex/parallel.hpp"

namespace kgex {

int ThreadPolicy::max_threads = 0;
bool ThreadPolicy::deterministic = false;

}  // namespace kgex
