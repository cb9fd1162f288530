// Copyright 2026 The estime Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ESTIME_SAFETENSORS_H_
#define ESTIME_SAFETENSORS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace estime {

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> data;  // row-major

  std::int64_t numel() const;
};

// Reader for the safetensors container: an 8-byte little-endian header
// length, a JSON header mapping names to {dtype, shape, data_offsets}, then
// the raw tensor bytes. F32, F16, BF16 and F64 tensors are widened or
// narrowed to float on load.
class SafeTensors {
 public:
  static SafeTensors Load(const std::filesystem::path &path);

  bool Contains(const std::string &name) const;
  // Throws kSchema when absent.
  const Tensor &Get(const std::string &name) const;
  const std::map<std::string, Tensor> &tensors() const { return tensors_; }

 private:
  std::map<std::string, Tensor> tensors_;
};

}  // namespace estime

#endif  // ESTIME_SAFETENSORS_H_
