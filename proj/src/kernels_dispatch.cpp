#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "rmup/kernels.hpp"

namespace rmup::kern {

const Ops* avx2_ops_compiled();  // kernels_avx2.cpp

const Ops* avx2_ops() {
    const Ops* ops = avx2_ops_compiled();
    if (ops == nullptr) return nullptr;
#if defined(__x86_64__) || defined(__i386__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return ops;
#endif
    return nullptr;
}

namespace {

const Ops& select() {
    if (const char* env = std::getenv("RMUP_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return scalar_ops();
        if (std::strcmp(env, "avx2") == 0) {
            if (const Ops* ops = avx2_ops()) return *ops;
            throw std::runtime_error("RMUP_KERNELS=avx2 requested but AVX2+FMA unavailable");
        }
        throw std::runtime_error(std::string("unknown RMUP_KERNELS backend: ") + env);
    }
    if (const Ops* ops = avx2_ops()) return *ops;
    return scalar_ops();
}

}  // namespace

const Ops& active() {
    static const Ops& ops = select();
    return ops;
}

}  // namespace rmup::kern
