#pragma once

#include <iosfwd>
#include <string>

#include "coco/tensor.hpp"

namespace coco {

// Text format: first line "D n_1 ... n_D", then n whitespace-separated
// doubles in storage order. Binary format: magic "COCO", version byte 1,
// u32 order, D x u64 dims, then n little-endian f64 values.

Tensor read_tensor(const std::string& path);  // sniffs the magic bytes
Tensor read_tensor_text(std::istream& in);
Tensor read_tensor_binary(std::istream& in);

void write_tensor_text(const std::string& path, const Tensor& t);
void write_tensor_binary(const std::string& path, const Tensor& t);

}  // namespace coco
