#include <cstdlib>
#include <string_view>

#include "shyp/kernels.hpp"

namespace shyp::kernels {

const KernelSet& active_kernels() {
    static const KernelSet& chosen = [] () -> const KernelSet& {
        const char* env = std::getenv("SHYP_KERNELS");
        if (env && std::string_view(env) == "scalar") return scalar_kernels();
        if (const KernelSet* k = avx2_kernels()) return *k;
        return scalar_kernels();
    }();
    return chosen;
}

}  // namespace shyp::kernels
