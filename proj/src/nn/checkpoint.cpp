#include "linksched/nn/checkpoint.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "linksched/errors.hpp"

namespace linksched::nn {

const std::string* Checkpoint::find_meta(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return &v;
  return nullptr;
}

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  os << "linksched-checkpoint " << kCheckpointVersion << '\n';
  os << "arch " << ckpt.arch << '\n';
  for (const auto& [k, v] : ckpt.meta) os << "meta " << k << ' ' << v << '\n';
  for (std::size_t i = 0; i < ckpt.params.count(); ++i)
    os << "tensor " << ckpt.params.name(i) << ' ' << ckpt.params.tensor(i).rows() << ' '
       << ckpt.params.tensor(i).cols() << '\n';
  const auto flat = ckpt.params.flatten();
  os << "flat " << flat.size() << '\n';
  os << std::hexfloat;
  for (double x : flat) os << x << '\n';
  os << std::defaultfloat << "end\n";
}

Checkpoint read_checkpoint(std::istream& is) {
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(is, line)) throw LoadError(std::string("checkpoint: missing ") + what);
    return std::istringstream(line);
  };

  {
    auto ls = next_line("header");
    std::string magic;
    int version = 0;
    ls >> magic >> version;
    if (magic != "linksched-checkpoint") throw LoadError("checkpoint: bad magic '" + magic + "'");
    if (version != kCheckpointVersion)
      throw LoadError("checkpoint: unsupported version " + std::to_string(version));
  }

  Checkpoint ckpt;
  std::size_t flat_len = 0;
  bool have_flat = false;
  while (!have_flat) {
    auto ls = next_line("flat section");
    std::string tag;
    ls >> tag;
    if (tag == "arch") {
      ls >> ckpt.arch;
    } else if (tag == "meta") {
      std::string key, value;
      ls >> key;
      std::getline(ls >> std::ws, value);
      ckpt.meta.emplace_back(key, value);
    } else if (tag == "tensor") {
      std::string name;
      std::size_t rows = 0, cols = 0;
      if (!(ls >> name >> rows >> cols)) throw LoadError("checkpoint: malformed tensor line");
      ckpt.params.add(name, rows, cols);
    } else if (tag == "flat") {
      if (!(ls >> flat_len)) throw LoadError("checkpoint: malformed flat line");
      have_flat = true;
    } else {
      throw LoadError("checkpoint: unexpected line '" + line + "'");
    }
  }
  if (flat_len != ckpt.params.flat_size())
    throw LoadError("checkpoint: flat length " + std::to_string(flat_len) +
                    " disagrees with tensor layout " + std::to_string(ckpt.params.flat_size()));

  std::vector<double> flat(flat_len);
  for (auto& x : flat) {
    if (!std::getline(is, line)) throw LoadError("checkpoint: truncated parameter vector");
    char* end = nullptr;
    x = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) throw LoadError("checkpoint: bad value '" + line + "'");
  }
  if (!std::getline(is, line) || line != "end") throw LoadError("checkpoint: missing end marker");
  ckpt.params.unflatten(flat);
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream os(path);
  if (!os) throw LoadError("checkpoint: cannot open '" + path.string() + "' for writing");
  write_checkpoint(os, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw LoadError("checkpoint: cannot open '" + path.string() + "'");
  return read_checkpoint(is);
}

}  // namespace linksched::nn
