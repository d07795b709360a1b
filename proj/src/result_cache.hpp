#pragma once

// In-process memo for ensembles shared by several checks (for example the
// pull-back sweep feeds both the pull-back and the domination check). Keys
// encode everything the ensemble depends on; worker count is deliberately
// excluded because results do not depend on it.

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace pathspace::harness::cache {

inline std::atomic<int>& bypass_depth() {
  static std::atomic<int> depth{0};
  return depth;
}

/// While alive, every lookup recomputes (and nothing is stored).
struct Bypass {
  Bypass() { ++bypass_depth(); }
  ~Bypass() { --bypass_depth(); }
  Bypass(const Bypass&) = delete;
  Bypass& operator=(const Bypass&) = delete;
};

template <class T>
std::shared_ptr<const T> get_or_compute(const std::string& key, const std::function<T()>& compute) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const T>> store;
  if (bypass_depth() > 0) return std::make_shared<const T>(compute());
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = store.find(key); it != store.end()) return it->second;
  }
  auto value = std::make_shared<const T>(compute());
  std::lock_guard<std::mutex> lock(mu);
  store.emplace(key, value);
  return value;
}

}  // namespace pathspace::harness::cache
