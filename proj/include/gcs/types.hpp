#pragma once

#include <cstdint>

namespace gcs {

// Token index into a fixed vocabulary [0, vocab_size).
using Token = std::int32_t;

}  // namespace gcs
