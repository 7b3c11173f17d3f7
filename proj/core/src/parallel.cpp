#include "kmsh/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace kmsh {

int thread_count() {
  int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const char* env = std::getenv("KMS_HODGE_THREADS");
  if (!env || !*env) return hw;
  try {
    int v = std::stoi(env);
    return v <= 0 ? hw : v;
  } catch (...) {
    return hw;
  }
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n / 256 + 1);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t b = w * chunk, e = std::min(n, b + chunk);
    if (b < e)
      pool.emplace_back([&, w, b, e] {
        try {
          body(b, e);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace kmsh
