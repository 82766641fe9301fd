#include "trady/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "trady/rng.hpp"

namespace trady {

namespace {

std::uint32_t read_be32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void write_be32(std::uint32_t v, std::ofstream& out) {
  const char bytes[4] = {static_cast<char>((v >> 24) & 0xff), static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 8) & 0xff), static_cast<char>(v & 0xff)};
  out.write(bytes, 4);
}

}  // namespace

IdxData load_idx(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_idx: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 4) throw std::runtime_error("load_idx: " + path + ": truncated magic");
  const std::uint32_t magic = read_be32(bytes.data());
  if ((magic >> 16) != 0) {
    std::ostringstream oss;
    oss << "load_idx: " << path << ": bad magic 0x" << std::hex << magic;
    throw std::runtime_error(oss.str());
  }
  const std::uint32_t dtype = (magic >> 8) & 0xff;
  if (dtype != 0x08) {
    std::ostringstream oss;
    oss << "load_idx: " << path << ": unsupported dtype code 0x" << std::hex << dtype
        << " (only 0x08 unsigned byte)";
    throw std::runtime_error(oss.str());
  }
  const std::uint32_t ndim = magic & 0xff;
  if (bytes.size() < 4 + 4 * static_cast<std::size_t>(ndim)) {
    throw std::runtime_error("load_idx: " + path + ": truncated dimension header");
  }
  IdxData data;
  std::size_t total = 1;
  for (std::uint32_t d = 0; d < ndim; ++d) {
    const std::size_t dim = read_be32(bytes.data() + 4 + 4 * d);
    data.dims.push_back(dim);
    total *= dim;
  }
  const std::size_t expected = 4 + 4 * static_cast<std::size_t>(ndim) + total;
  if (bytes.size() != expected) {
    std::ostringstream oss;
    oss << "load_idx: " << path << ": expected " << expected << " bytes, file has "
        << bytes.size();
    throw std::runtime_error(oss.str());
  }
  data.payload.assign(bytes.begin() + 4 + 4 * static_cast<std::ptrdiff_t>(ndim), bytes.end());
  return data;
}

void save_idx(const IdxData& data, const std::string& path) {
  std::size_t total = 1;
  for (std::size_t d : data.dims) total *= d;
  if (total != data.payload.size()) {
    throw std::invalid_argument("save_idx: payload size does not match dims");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_idx: cannot open " + path);
  write_be32(0x00000800u | static_cast<std::uint32_t>(data.dims.size()), out);
  for (std::size_t d : data.dims) write_be32(static_cast<std::uint32_t>(d), out);
  out.write(reinterpret_cast<const char*>(data.payload.data()),
            static_cast<std::streamsize>(data.payload.size()));
  if (!out) throw std::runtime_error("save_idx: write failed for " + path);
}

Tensor4 load_idx_images(const std::string& path) {
  const IdxData data = load_idx(path);
  std::size_t n, c, h, w;
  if (data.dims.size() == 3) {
    n = data.dims[0], c = 1, h = data.dims[1], w = data.dims[2];
  } else if (data.dims.size() == 4) {
    n = data.dims[0], c = data.dims[1], h = data.dims[2], w = data.dims[3];
  } else {
    std::ostringstream oss;
    oss << "load_idx_images: " << path << ": expected 3 or 4 dims, got " << data.dims.size();
    throw std::runtime_error(oss.str());
  }
  Tensor4 images(n, c, h, w);
  for (std::size_t i = 0; i < data.payload.size(); ++i) {
    images.raw()[i] = static_cast<double>(data.payload[i]) / 255.0;
  }
  return images;
}

std::vector<int> load_idx_labels(const std::string& path) {
  const IdxData data = load_idx(path);
  if (data.dims.size() != 1) {
    std::ostringstream oss;
    oss << "load_idx_labels: " << path << ": expected 1 dim, got " << data.dims.size();
    throw std::runtime_error(oss.str());
  }
  return std::vector<int>(data.payload.begin(), data.payload.end());
}

void save_idx_images(const Tensor4& images, const std::string& path) {
  IdxData data;
  if (images.dim(1) == 1) {
    data.dims = {images.dim(0), images.dim(2), images.dim(3)};
  } else {
    data.dims = {images.dim(0), images.dim(1), images.dim(2), images.dim(3)};
  }
  data.payload.resize(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const double v = images.raw()[i];
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("save_idx_images: pixel outside [0,1]");
    data.payload[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  save_idx(data, path);
}

void save_idx_labels(const std::vector<int>& labels, const std::string& path) {
  IdxData data;
  data.dims = {labels.size()};
  data.payload.reserve(labels.size());
  for (int l : labels) {
    if (l < 0 || l > 255) throw std::invalid_argument("save_idx_labels: label outside u8 range");
    data.payload.push_back(static_cast<std::uint8_t>(l));
  }
  save_idx(data, path);
}

Dataset gen_synthetic_task(const SyntheticTaskConfig& cfg, std::uint64_t noise_stream) {
  if (cfg.classes < 2) throw std::invalid_argument("gen_synthetic_task: need >= 2 classes");
  const int C = cfg.channels, H = cfg.height, W = cfg.width;
  const std::size_t plane = static_cast<std::size_t>(H) * W;

  // Per-class smooth templates, fully determined by the task seed.
  Rng template_rng(Rng::derive(cfg.task_seed, 0x7e3));
  std::vector<std::vector<double>> templates;
  for (int k = 0; k < cfg.classes; ++k) {
    std::vector<double> tpl(static_cast<std::size_t>(C) * plane, 0.2);
    for (int c = 0; c < C; ++c) {
      for (int bump = 0; bump < 3; ++bump) {
        const double cy = template_rng.next_uniform(0.0, H);
        const double cx = template_rng.next_uniform(0.0, W);
        const double amp = template_rng.next_uniform(0.35, 0.8);
        const double s = template_rng.next_uniform(std::min(H, W) / 6.0, std::min(H, W) / 3.0);
        for (int y = 0; y < H; ++y) {
          for (int x = 0; x < W; ++x) {
            const double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
            tpl[static_cast<std::size_t>(c) * plane + static_cast<std::size_t>(y) * W + x] +=
                amp * std::exp(-d2 / (2.0 * s * s));
          }
        }
      }
    }
    templates.push_back(std::move(tpl));
  }

  Rng noise_rng(Rng::derive(cfg.task_seed, 0x1000 + noise_stream));
  const std::size_t n = static_cast<std::size_t>(cfg.classes) * cfg.samples_per_class;
  Dataset ds;
  ds.classes = cfg.classes;
  ds.images = Tensor4(n, static_cast<std::size_t>(C), static_cast<std::size_t>(H),
                      static_cast<std::size_t>(W));
  ds.labels.reserve(n);
  std::size_t idx = 0;
  for (int k = 0; k < cfg.classes; ++k) {
    for (int s = 0; s < cfg.samples_per_class; ++s) {
      const std::vector<double>& tpl = templates[static_cast<std::size_t>(k)];
      for (std::size_t p = 0; p < tpl.size(); ++p) {
        double v = tpl[p];
        if (cfg.noise_sigma > 0.0) v += cfg.noise_sigma * noise_rng.next_normal();
        v = std::min(1.0, std::max(0.0, v));
        // Quantize onto the u8 grid so in-memory data equals an IDX round-trip.
        v = static_cast<double>(std::lround(v * 255.0)) / 255.0;
        ds.images.raw()[idx * tpl.size() + p] = v;
      }
      ds.labels.push_back(k);
      ++idx;
    }
  }
  return ds;
}

Tensor4 standardize(const Tensor4& images) {
  Tensor4 out = images;
  for (double& v : out.raw()) v = (v - 0.5) / 0.5;
  return out;
}

}  // namespace trady
