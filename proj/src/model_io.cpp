#include "relay/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace relay {

namespace {

constexpr const char* kMagic = "relaymodel";
constexpr int kVersion = 1;

void put_le64(std::string& out, uint64_t u) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>(u >> (8 * b)));
}

uint64_t get_le64(const unsigned char* p) {
  uint64_t u = 0;
  for (int b = 0; b < 8; ++b) u |= static_cast<uint64_t>(p[b]) << (8 * b);
  return u;
}

}  // namespace

void save_model(const std::string& path, const ModelParams& p,
                const std::vector<std::pair<std::string, std::string>>& meta) {
  std::string payload;
  payload.reserve(p.n_parameters() * 8);
  for (const Tensor* t : p.tensors())
    for (double w : t->v) put_le64(payload, std::bit_cast<uint64_t>(w));

  std::ostringstream h;
  h << kMagic << ' ' << kVersion << '\n';
  h << "k " << p.cfg.k << '\n';
  h << "y " << p.cfg.y << '\n';
  h << "x " << p.cfg.x << '\n';
  h << "c1 " << p.cfg.c1 << '\n';
  h << "c2 " << p.cfg.c2 << '\n';
  h << "fc " << p.cfg.fc << '\n';
  h << "actions " << p.cfg.n_actions << '\n';
  for (const auto& [key, value] : meta)
    h << "meta " << key << ' ' << value << '\n';
  const auto names = ModelParams::tensor_names();
  const auto tensors = p.tensors();
  for (int i = 0; i < ModelParams::kNumTensors; ++i) {
    h << "tensor " << names[i];
    for (int d : tensors[i]->shape) h << ' ' << d;
    h << '\n';
  }
  char sum[32];
  std::snprintf(sum, sizeof sum, "%016llx",
                static_cast<unsigned long long>(
                    fnv1a(payload.data(), payload.size())));
  h << "checksum " << sum << '\n';
  h << "data\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  const std::string header = h.str();
  f.write(header.data(), static_cast<std::streamsize>(header.size()));
  f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

ModelParams load_model(
    const std::string& path,
    std::vector<std::pair<std::string, std::string>>* meta) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::string content((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());

  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line))
    throw model_format_error("empty model file: " + path);
  {
    std::istringstream ls(line);
    std::string magic;
    int version = -1;
    ls >> magic >> version;
    if (magic != kMagic)
      throw model_format_error("not a model file: " + path);
    if (version != kVersion)
      throw model_format_error("unsupported model version " +
                               std::to_string(version));
  }

  NetConfig cfg;
  std::vector<std::pair<std::string, std::vector<int>>> shapes;
  std::string checksum;
  while (std::getline(in, line)) {
    if (line == "data") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "k") ls >> cfg.k;
    else if (key == "y") ls >> cfg.y;
    else if (key == "x") ls >> cfg.x;
    else if (key == "c1") ls >> cfg.c1;
    else if (key == "c2") ls >> cfg.c2;
    else if (key == "fc") ls >> cfg.fc;
    else if (key == "actions") ls >> cfg.n_actions;
    else if (key == "meta") {
      std::string mk;
      ls >> mk;
      std::string mv;
      std::getline(ls, mv);
      if (!mv.empty() && mv.front() == ' ') mv.erase(0, 1);
      if (meta) meta->emplace_back(mk, mv);
    } else if (key == "tensor") {
      std::string name;
      ls >> name;
      std::vector<int> shape;
      int d;
      while (ls >> d) shape.push_back(d);
      shapes.emplace_back(name, shape);
    } else if (key == "checksum") {
      ls >> checksum;
    } else {
      throw model_format_error("unknown header line: " + line);
    }
    if (ls.fail() && key != "meta" && key != "tensor")
      throw model_format_error("malformed header line: " + line);
  }
  if (line != "data")
    throw model_format_error("missing data section: " + path);

  ModelParams p = ModelParams::zeros(cfg);
  const auto names = ModelParams::tensor_names();
  const auto tensors = p.tensors();
  if (shapes.size() != ModelParams::kNumTensors)
    throw model_format_error("wrong tensor count in header");
  for (int i = 0; i < ModelParams::kNumTensors; ++i) {
    if (shapes[i].first != names[i] || shapes[i].second != tensors[i]->shape)
      throw model_format_error("tensor shape mismatch: " + shapes[i].first);
  }

  const size_t offset = static_cast<size_t>(in.tellg());
  const size_t expect = p.n_parameters() * 8;
  if (content.size() - offset < expect)
    throw model_truncated_error("model payload truncated: " + path);

  const char* payload = content.data() + offset;
  char sum[32];
  std::snprintf(sum, sizeof sum, "%016llx",
                static_cast<unsigned long long>(fnv1a(payload, expect)));
  if (!checksum.empty() && checksum != sum)
    throw model_checksum_error("model checksum mismatch: " + path);

  const unsigned char* bytes =
      reinterpret_cast<const unsigned char*>(payload);
  for (Tensor* t : tensors)
    for (double& w : t->v) {
      w = std::bit_cast<double>(get_le64(bytes));
      bytes += 8;
    }
  return p;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

}  // namespace relay
