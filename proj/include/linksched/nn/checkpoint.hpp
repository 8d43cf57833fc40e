#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "linksched/nn/params.hpp"

namespace linksched::nn {

/// On-disk model: architecture id, a human-readable key/value block, the
/// tensor layout, and the flat parameter vector written as hex floats so a
/// save/load round trip is exact.
///
///   linksched-checkpoint 1
///   arch transgnn
///   meta hidden_dim 16
///   tensor in_W 7 16
///   ...
///   flat 1234
///   0x1.8p+0
///   ...
///   end
struct Checkpoint {
  std::string arch;
  std::vector<std::pair<std::string, std::string>> meta;
  ParamSet params;

  const std::string* find_meta(const std::string& key) const;
};

inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& is);  // throws LoadError

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace linksched::nn
