#include "matchfn/common.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <thread>
#include <vector>

namespace matchfn {

Month Month::parse(const std::string& text) {
  int y = 0, m = 0;
  char dash = 0;
  if (std::sscanf(text.c_str(), "%d%c%d", &y, &dash, &m) != 3 || dash != '-' ||
      m < 1 || m > 12) {
    throw DataError("invalid period '" + text + "', expected YYYY-MM");
  }
  return Month{y, m};
}

std::string Month::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

Month operator+(Month m, int months) { return Month::from_index(m.index() + months); }

namespace {

unsigned thread_cap() {
  if (const char* env = std::getenv("MATCHFN_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned nthreads = std::min<std::size_t>(thread_cap(), n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  for (unsigned w = 0; w < nthreads; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += nthreads) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace matchfn
