#include "trady/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace trady {

namespace {

void write_f64_le(double v, std::ofstream& out) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

double read_f64_le(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void checkpoint_save(const std::map<std::string, NamedTensor>& tensors,
                     const std::string& prefix) {
  nlohmann::json manifest;
  manifest["tensors"] = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& [name, t] : tensors) {
    std::size_t count = 1;
    for (std::size_t d : t.shape) count *= d;
    if (count != t.values.size()) {
      throw std::invalid_argument("checkpoint_save: tensor " + name +
                                  " shape product != value count");
    }
    nlohmann::json entry;
    entry["name"] = name;
    entry["shape"] = t.shape;
    entry["dtype"] = "f64";
    entry["byte_offset"] = offset;
    entry["byte_length"] = count * 8;
    manifest["tensors"].push_back(entry);
    offset += count * 8;
  }
  {
    std::ofstream mf(prefix + ".manifest.json");
    if (!mf) throw std::runtime_error("checkpoint_save: cannot open " + prefix + ".manifest.json");
    mf << manifest.dump(2) << "\n";
  }
  std::ofstream blob(prefix + ".blob", std::ios::binary);
  if (!blob) throw std::runtime_error("checkpoint_save: cannot open " + prefix + ".blob");
  for (const auto& [name, t] : tensors) {
    (void)name;
    for (double v : t.values) write_f64_le(v, blob);
  }
  if (!blob) throw std::runtime_error("checkpoint_save: blob write failed");
}

std::map<std::string, NamedTensor> checkpoint_load(const std::string& prefix) {
  nlohmann::json manifest;
  {
    std::ifstream mf(prefix + ".manifest.json");
    if (!mf) throw std::runtime_error("checkpoint_load: cannot open " + prefix + ".manifest.json");
    mf >> manifest;
  }
  std::ifstream blob_in(prefix + ".blob", std::ios::binary);
  if (!blob_in) throw std::runtime_error("checkpoint_load: cannot open " + prefix + ".blob");
  std::vector<std::uint8_t> blob((std::istreambuf_iterator<char>(blob_in)),
                                 std::istreambuf_iterator<char>());

  std::map<std::string, NamedTensor> tensors;
  std::size_t expected_offset = 0;
  for (const auto& entry : manifest.at("tensors")) {
    const std::string name = entry.at("name").get<std::string>();
    NamedTensor t;
    t.shape = entry.at("shape").get<std::vector<std::size_t>>();
    if (entry.at("dtype").get<std::string>() != "f64") {
      throw std::runtime_error("checkpoint_load: tensor " + name + " has non-f64 dtype");
    }
    const std::size_t offset = entry.at("byte_offset").get<std::size_t>();
    const std::size_t length = entry.at("byte_length").get<std::size_t>();
    if (offset != expected_offset) {
      throw std::runtime_error("checkpoint_load: tensor " + name +
                               " offset breaks contiguity of the blob layout");
    }
    std::size_t count = 1;
    for (std::size_t d : t.shape) count *= d;
    if (count * 8 != length) {
      throw std::runtime_error("checkpoint_load: tensor " + name +
                               " shape product does not match byte length");
    }
    if (offset + length > blob.size()) {
      std::ostringstream oss;
      oss << "checkpoint_load: tensor " << name << " extends to byte " << (offset + length)
          << " but blob has " << blob.size();
      throw std::runtime_error(oss.str());
    }
    t.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      t.values[i] = read_f64_le(blob.data() + offset + 8 * i);
    }
    tensors.emplace(name, std::move(t));
    expected_offset = offset + length;
  }
  if (expected_offset != blob.size()) {
    std::ostringstream oss;
    oss << "checkpoint_load: blob has " << blob.size() << " bytes, manifest covers "
        << expected_offset;
    throw std::runtime_error(oss.str());
  }
  return tensors;
}

std::map<std::string, NamedTensor> params_to_tensors(const NetworkSpec& spec,
                                                     const Parameters& params) {
  std::map<std::string, NamedTensor> tensors;
  const std::vector<int> convs = spec.conv_layer_indices();
  for (std::size_t ci = 0; ci < convs.size(); ++ci) {
    NamedTensor t;
    const Tensor4& w = params.conv_w[ci];
    t.shape = {w.dim(0), w.dim(1), w.dim(2), w.dim(3)};
    t.values = w.raw();
    tensors.emplace("conv" + std::to_string(convs[ci]) + ".weight", std::move(t));
  }
  tensors.emplace("fc.weight",
                  NamedTensor{{params.fc_w.rows, params.fc_w.cols}, params.fc_w.data});
  tensors.emplace("fc.bias", NamedTensor{{params.fc_b.size()}, params.fc_b});
  return tensors;
}

Parameters params_from_tensors(const NetworkSpec& spec,
                               const std::map<std::string, NamedTensor>& tensors) {
  Parameters p;
  for (int li : spec.conv_layer_indices()) {
    const std::string name = "conv" + std::to_string(li) + ".weight";
    auto it = tensors.find(name);
    if (it == tensors.end()) {
      throw std::runtime_error("checkpoint: missing tensor " + name);
    }
    const ConvGeometry& g = spec.layers[static_cast<std::size_t>(li)].geom;
    const std::vector<std::size_t> expect = {
        static_cast<std::size_t>(g.out_channels), static_cast<std::size_t>(g.in_per_group()),
        static_cast<std::size_t>(g.kernel), static_cast<std::size_t>(g.kernel)};
    if (it->second.shape != expect) {
      throw std::runtime_error("checkpoint: tensor " + name + " shape mismatch with network");
    }
    p.conv_w.push_back(Tensor4::from_data({expect[0], expect[1], expect[2], expect[3]},
                                          it->second.values));
  }
  const LayerSpec& fc = spec.layers.back();
  auto wit = tensors.find("fc.weight");
  auto bit = tensors.find("fc.bias");
  if (wit == tensors.end() || bit == tensors.end()) {
    throw std::runtime_error("checkpoint: missing classifier tensors");
  }
  const std::size_t out = static_cast<std::size_t>(fc.out_features);
  const std::size_t in = static_cast<std::size_t>(fc.in_features);
  if (wit->second.shape != std::vector<std::size_t>{out, in} ||
      bit->second.shape != std::vector<std::size_t>{out}) {
    throw std::runtime_error("checkpoint: classifier shape mismatch with network");
  }
  p.fc_w = Matrix(out, in);
  p.fc_w.data = wit->second.values;
  p.fc_b = bit->second.values;
  return p;
}

void save_params(const NetworkSpec& spec, const Parameters& params, const std::string& prefix) {
  checkpoint_save(params_to_tensors(spec, params), prefix);
}

Parameters load_params(const NetworkSpec& spec, const std::string& prefix) {
  return params_from_tensors(spec, checkpoint_load(prefix));
}

}  // namespace trady
