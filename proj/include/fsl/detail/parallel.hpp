#pragma once

#include <optional>

namespace fsl {

template <class T>
std::vector<T> run_parallel(const std::vector<std::function<T()>>& jobs) {
  std::vector<std::optional<T>> slots(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) { slots[i].emplace(jobs[i]()); });
  std::vector<T> out;
  out.reserve(jobs.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace fsl
