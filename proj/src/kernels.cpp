#include "schmm/kernels.hpp"

#include <atomic>

namespace schmm::kernels {

extern const Ops kScalarOps;
extern const Ops kAvx2Ops;
extern const bool kAvx2Compiled;

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "?";
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return kAvx2Compiled && __builtin_cpu_supports("avx2") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const Ops& backend_ops(Backend b) {
  if (!backend_available(b)) {
    fail(ErrorKind::invalid_argument,
         std::string("kernel backend unavailable on this host: ") + backend_name(b));
  }
  return b == Backend::avx2 ? kAvx2Ops : kScalarOps;
}

Backend detect_backend() {
  return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

namespace {
std::atomic<Backend>& selected_slot() {
  static std::atomic<Backend> s{detect_backend()};
  return s;
}
}  // namespace

const Ops& active() { return backend_ops(selected_slot().load(std::memory_order_relaxed)); }

void select(Backend b) {
  backend_ops(b);  // validates availability
  selected_slot().store(b, std::memory_order_relaxed);
}

Backend selected() { return selected_slot().load(std::memory_order_relaxed); }

}  // namespace schmm::kernels
