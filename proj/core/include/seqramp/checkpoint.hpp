#pragma once

#include <span>
#include <string>

#include "seqramp/tensor.hpp"

namespace seqramp {

// Binary checkpoint format, little-endian:
//   magic "SRCK", u32 format version, u64 parameter count,
//   then per parameter: u32 name length, name bytes, u32 rank,
//   u32 dims..., raw 64-bit reals.
// Round-trips bit-exactly.
void save_checkpoint(const std::string& path, std::span<Parameter* const> params);

// Loads into an existing parameter set; names, order and shapes must match.
void load_checkpoint(const std::string& path, std::span<Parameter* const> params);

} // namespace seqramp
