#pragma once

#include <map>
#include <string>
#include <vector>

#include "trady/network.hpp"

namespace trady {

// Named f64 tensor of arbitrary rank, the checkpoint unit.
struct NamedTensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

// Writes <prefix>.manifest.json (name/shape/dtype/byte offsets) and
// <prefix>.blob (little-endian f64, contiguous in manifest order).
void checkpoint_save(const std::map<std::string, NamedTensor>& tensors,
                     const std::string& prefix);
std::map<std::string, NamedTensor> checkpoint_load(const std::string& prefix);

// Parameters <-> named tensors: conv<layer_index>.weight, fc.weight, fc.bias.
std::map<std::string, NamedTensor> params_to_tensors(const NetworkSpec& spec,
                                                     const Parameters& params);
Parameters params_from_tensors(const NetworkSpec& spec,
                               const std::map<std::string, NamedTensor>& tensors);

void save_params(const NetworkSpec& spec, const Parameters& params, const std::string& prefix);
Parameters load_params(const NetworkSpec& spec, const std::string& prefix);

}  // namespace trady
