#pragma once

#include <exception>

namespace pathprompt {

namespace detail {
ItemError capture_current_exception();
void parallel_for_dynamic(std::size_t n, int threads, void (*fn)(std::size_t, void*), void* ctx);
}  // namespace detail

template <typename Body>
std::vector<std::optional<ItemError>> run_indexed(std::size_t n, int threads, Body&& body) {
  std::vector<std::optional<ItemError>> errors(n);
  struct Ctx {
    Body* body;
    std::vector<std::optional<ItemError>>* errors;
  } ctx{&body, &errors};
  auto trampoline = [](std::size_t i, void* p) {
    auto* c = static_cast<Ctx*>(p);
    try {
      (*c->body)(i);
    } catch (...) {
      (*c->errors)[i] = detail::capture_current_exception();
    }
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) trampoline(i, &ctx);
  } else {
    detail::parallel_for_dynamic(n, threads, trampoline, &ctx);
  }
  return errors;
}

}  // namespace pathprompt
