#include "gptlab/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace gptlab::kernels {

const KernelTable& active() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    if (const char* env = std::getenv("GPTLAB_KERNELS");
        env != nullptr && std::string_view(env) == "scalar") {
      return scalar();
    }
    if (avx2() != nullptr && avx2_supported()) return *avx2();
    return scalar();
  }();
  return chosen;
}

}  // namespace gptlab::kernels
