#pragma once

#include <string>

#include "ssc/tensor.hpp"

namespace ssc::ppm {

// Binary P6 PPM with maxval 255; three channels, values quantized to
// round(v*255)/255 on save.
Tensor load(const std::string& path);
void save(const Tensor& image, const std::string& path);

Tensor decode(const std::string& bytes);
std::string encode(const Tensor& image);

}  // namespace ssc::ppm
