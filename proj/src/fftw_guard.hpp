#pragma once

#include <mutex>

namespace ascan {

// FFTW plan creation and destruction are not thread-safe; every translation
// unit that plans must hold this one mutex while doing so. Executing a plan
// needs no lock.
std::mutex& fftw_plan_mutex();

}  // namespace ascan
