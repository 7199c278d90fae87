#pragma once

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace exactrc {

/// Worker count: explicit request if positive, else EXACTRC_THREADS, else the
/// OpenMP default. Results never depend on this value.
inline int worker_threads(int requested = 0)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("EXACTRC_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0)
                return v;
        } catch (const std::exception&) {
        }
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace exactrc
