#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trady/tensor.hpp"

namespace trady {

struct Dataset {
  Tensor4 images;           // [N,C,H,W], values in [0,1] (u8/255)
  std::vector<int> labels;  // length N
  int classes = 0;
};

// IDX container: big-endian magic 0x0000'08'<ndim> (unsigned-byte payload),
// then ndim big-endian u32 dims, then the row-major payload.
struct IdxData {
  std::vector<std::size_t> dims;
  std::vector<std::uint8_t> payload;
};

IdxData load_idx(const std::string& path);
void save_idx(const IdxData& data, const std::string& path);

// ndim 3 [N,H,W] -> [N,1,H,W]; ndim 4 [N,C,H,W]. u8 promoted to f64/255.
Tensor4 load_idx_images(const std::string& path);
std::vector<int> load_idx_labels(const std::string& path);

void save_idx_images(const Tensor4& images, const std::string& path);
void save_idx_labels(const std::vector<int>& labels, const std::string& path);

struct SyntheticTaskConfig {
  std::uint64_t task_seed = 0;
  int classes = 4;
  int samples_per_class = 200;
  int channels = 1;
  int height = 16;
  int width = 16;
  double noise_sigma = 0.1;
};

// Class templates are sums of 3 seeded Gaussian bumps; samples add iid pixel
// noise, clamp to [0,1] and quantize to the u8 grid (so IDX round-trips are
// exact). Distinct task seeds give distinct downstream tasks; noise_stream
// separates train/test draws of the same task.
Dataset gen_synthetic_task(const SyntheticTaskConfig& cfg, std::uint64_t noise_stream = 0);

// Input standardization used by all training paths: (x - 0.5) / 0.5.
Tensor4 standardize(const Tensor4& images);

}  // namespace trady
