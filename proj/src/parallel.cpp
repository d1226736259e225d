#include "csmri/parallel.hpp"

#include <memory>
#include <mutex>

#include <tbb/blocked_range.h>
#include <tbb/info.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace csmri::parallel {

namespace {
std::mutex arena_mutex;
std::shared_ptr<tbb::task_arena> arena;

auto current() -> std::shared_ptr<tbb::task_arena>
{
  std::lock_guard lock(arena_mutex);
  if (!arena) { arena = std::make_shared<tbb::task_arena>(tbb::info::default_concurrency()); }
  return arena;
}
} // namespace

void set_threads(int n)
{
  if (n < 0) { throw Error("thread count must be >= 0"); }
  std::lock_guard lock(arena_mutex);
  arena = std::make_shared<tbb::task_arena>(n == 0 ? tbb::info::default_concurrency() : n);
}

auto threads() -> int
{
  return current()->max_concurrency();
}

void for_each(Index n, std::function<void(Index)> const &fn)
{
  if (n <= 0) { return; }
  auto a = current();
  if (a->max_concurrency() == 1 || n == 1) {
    for (Index i = 0; i < n; ++i) { fn(i); }
    return;
  }
  a->execute([&] {
    tbb::parallel_for(tbb::blocked_range<Index>(0, n), [&](tbb::blocked_range<Index> const &r) {
      for (Index i = r.begin(); i < r.end(); ++i) { fn(i); }
    });
  });
}

} // namespace csmri::parallel
