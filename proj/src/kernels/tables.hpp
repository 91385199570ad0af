#pragma once

#include "srs/kernels.hpp"

namespace srs::kernels::detail {

#if defined(SRS_WITH_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(SRS_WITH_NEON)
const KernelTable& neon_table();
#endif

}  // namespace srs::kernels::detail
