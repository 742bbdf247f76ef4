#pragma once

#include <cstddef>

#include <functional>

namespace mdcc::detail {

/// Worker-count cap shared by every parallel loop. Defaults to the value of
/// the MDCC_THREADS environment variable, else the hardware concurrency.
int thread_limit();
void set_thread_limit(int n);

/// Runs f(i) for i in [0, count). Work items are claimed dynamically but each
/// item writes only state owned by its index, so results are identical for
/// every thread count; callers must do any floating-point reduction over the
/// index order afterwards.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f);

}  // namespace mdcc::detail
