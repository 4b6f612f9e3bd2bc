#include "fairx/parallel.hpp"

#include <algorithm>
#include <cstdlib>

namespace fairx {

int worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("FAIRX_THREADS");
  if (env == nullptr) return static_cast<int>(hw);
  long v = std::strtol(env, nullptr, 10);
  if (v <= 0) return static_cast<int>(hw);
  return static_cast<int>(std::min<long>(v, hw));
}

void parallel_chunks(std::size_t count, std::size_t num_chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  num_chunks = std::max<std::size_t>(1, std::min(num_chunks, count));
  const std::size_t per = (count + num_chunks - 1) / num_chunks;

  auto run_chunk = [&](std::size_t c) {
    std::size_t b = c * per;
    std::size_t e = std::min(count, b + per);
    if (b < e) fn(c, b, e);
  };

  int workers = worker_count();
  if (workers <= 1 || num_chunks == 1 || count < 64) {
    for (std::size_t c = 0; c < num_chunks; ++c) run_chunk(c);
    return;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= num_chunks) break;
      run_chunk(c);
    }
  };
  std::vector<std::thread> pool;
  int spawn = static_cast<int>(std::min<std::size_t>(workers, num_chunks)) - 1;
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace fairx
