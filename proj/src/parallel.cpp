#include "uclab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace uclab {

namespace {

std::atomic<bool> g_deterministic{true};
constexpr std::size_t kFixedChunks = 64;

void run_chunks(std::size_t chunks, std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  const int workers = std::min<int>(thread_count(), static_cast<int>(chunks));
  auto range = [&](std::size_t c, std::size_t& b, std::size_t& e) {
    b = n * c / chunks;
    e = n * (c + 1) / chunks;
  };
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      std::size_t b, e;
      range(c, b, e);
      body(c, b, e);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        std::size_t b, e;
        range(c, b, e);
        body(c, b, e);
      }
    });
  for (auto& t : pool) t.join();
}

}  // namespace

int thread_count() {
  static const int count = [] {
    const char* env = std::getenv("UCLAB_THREADS");
    if (env == nullptr) return 1;
    const int v = std::atoi(env);
    return std::clamp(v, 1, 256);
  }();
  return count;
}

void set_deterministic(bool on) { g_deterministic = on; }
bool deterministic() { return g_deterministic; }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t chunks = std::min<std::size_t>(n, thread_count() <= 1 ? 1 : kFixedChunks);
  run_chunks(chunks, n, [&](std::size_t, std::size_t b, std::size_t e) { body(b, e); });
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& chunk_sum) {
  if (n == 0) return 0.0;
  const std::size_t chunks =
      std::min<std::size_t>(n, deterministic() ? kFixedChunks : static_cast<std::size_t>(thread_count()));
  std::vector<double> partial(chunks, 0.0);
  run_chunks(chunks, n, [&](std::size_t c, std::size_t b, std::size_t e) { partial[c] = chunk_sum(b, e); });
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

}  // namespace uclab
