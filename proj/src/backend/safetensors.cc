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

#include "estime/safetensors.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "estime/error.h"
#include "json.hpp"

namespace estime {
namespace {

float HalfToFloat(std::uint16_t h) {
  const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000) << 16;
  std::uint32_t exponent = (h >> 10) & 0x1f;
  std::uint32_t mantissa = h & 0x3ff;
  std::uint32_t bits;
  if (exponent == 0) {
    if (mantissa == 0) {
      bits = sign;
    } else {
      // Subnormal: renormalize.
      exponent = 127 - 15 + 1;
      while ((mantissa & 0x400) == 0) {
        mantissa <<= 1;
        --exponent;
      }
      mantissa &= 0x3ff;
      bits = sign | (exponent << 23) | (mantissa << 13);
    }
  } else if (exponent == 0x1f) {
    bits = sign | 0x7f800000 | (mantissa << 13);
  } else {
    bits = sign | ((exponent + 127 - 15) << 23) | (mantissa << 13);
  }
  return std::bit_cast<float>(bits);
}

std::uint64_t ReadLittleEndian64(const unsigned char *p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::size_t DtypeSize(const std::string &dtype) {
  if (dtype == "F32") return 4;
  if (dtype == "F16" || dtype == "BF16") return 2;
  if (dtype == "F64") return 8;
  return 0;
}

void Convert(const std::string &dtype, const unsigned char *src,
             std::size_t count, float *dst) {
  static_assert(std::endian::native == std::endian::little,
                "safetensors data is little-endian");
  if (dtype == "F32") {
    std::memcpy(dst, src, count * 4);
  } else if (dtype == "F64") {
    for (std::size_t i = 0; i < count; ++i) {
      double d;
      std::memcpy(&d, src + 8 * i, 8);
      dst[i] = static_cast<float>(d);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint16_t h;
      std::memcpy(&h, src + 2 * i, 2);
      dst[i] = dtype == "F16"
                   ? HalfToFloat(h)
                   : std::bit_cast<float>(static_cast<std::uint32_t>(h) << 16);
    }
  }
}

}  // namespace

std::int64_t Tensor::numel() const {
  std::int64_t n = 1;
  for (std::int64_t d : shape) n *= d;
  return n;
}

SafeTensors SafeTensors::Load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const auto file_size = std::filesystem::file_size(path);

  unsigned char prefix[8];
  if (!in.read(reinterpret_cast<char *>(prefix), 8)) {
    throw Error(ErrorCode::kSchema, path.string() + ": truncated header");
  }
  const std::uint64_t header_size = ReadLittleEndian64(prefix);
  if (header_size > file_size - 8) {
    throw Error(ErrorCode::kSchema, path.string() + ": bad header length");
  }
  std::string header(header_size, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_size));
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kSchema,
                path.string() + ": header is not JSON: " + e.what());
  }
  const std::uint64_t data_start = 8 + header_size;
  const std::uint64_t data_size = file_size - data_start;

  SafeTensors out;
  std::vector<unsigned char> buffer;
  for (const auto &[name, info] : meta.items()) {
    if (name == "__metadata__") continue;
    try {
      const std::string dtype = info.at("dtype").get<std::string>();
      const std::size_t width = DtypeSize(dtype);
      if (width == 0) {
        throw Error(ErrorCode::kSchema,
                    path.string() + ": unsupported dtype " + dtype + " for " +
                        name);
      }
      Tensor t;
      t.shape = info.at("shape").get<std::vector<std::int64_t>>();
      const auto offsets = info.at("data_offsets").get<std::vector<std::uint64_t>>();
      if (offsets.size() != 2 || offsets[0] > offsets[1] ||
          offsets[1] > data_size ||
          offsets[1] - offsets[0] !=
              static_cast<std::uint64_t>(t.numel()) * width) {
        throw Error(ErrorCode::kSchema,
                    path.string() + ": inconsistent offsets for " + name);
      }
      buffer.resize(offsets[1] - offsets[0]);
      in.seekg(static_cast<std::streamoff>(data_start + offsets[0]));
      if (!in.read(reinterpret_cast<char *>(buffer.data()),
                   static_cast<std::streamsize>(buffer.size()))) {
        throw Error(ErrorCode::kIo, path.string() + ": short read for " + name);
      }
      t.data.resize(static_cast<std::size_t>(t.numel()));
      Convert(dtype, buffer.data(), t.data.size(), t.data.data());
      out.tensors_.emplace(name, std::move(t));
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::kSchema,
                  path.string() + ": bad entry for " + name + ": " + e.what());
    }
  }
  return out;
}

bool SafeTensors::Contains(const std::string &name) const {
  return tensors_.contains(name);
}

const Tensor &SafeTensors::Get(const std::string &name) const {
  const auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw Error(ErrorCode::kSchema, "missing tensor " + name);
  }
  return it->second;
}

}  // namespace estime
