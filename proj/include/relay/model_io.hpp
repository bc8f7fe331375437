#pragma once

#include <string>
#include <utility>
#include <vector>

#include "relay/policy_net.hpp"

namespace relay {

struct model_format_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct model_truncated_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct model_checksum_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model file: text header (magic+version, net dims, meta lines, tensor
// shapes, payload checksum), then "data\n" and the tensors as
// little-endian IEEE-754 doubles in fixed order.
void save_model(const std::string& path, const ModelParams& p,
                const std::vector<std::pair<std::string, std::string>>& meta =
                    {});
ModelParams load_model(
    const std::string& path,
    std::vector<std::pair<std::string, std::string>>* meta = nullptr);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace relay
