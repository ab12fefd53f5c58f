#ifndef FINSENT_TOOLS_MANIFEST_H_
#define FINSENT_TOOLS_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace finsent::cli {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

struct FileDigest {
  std::string path;  // as given on the command line
  std::string sha256;
};

// Everything needed to re-run one invocation. Contains no timestamps, so
// a replay writes a byte-identical manifest.
struct RunManifest {
  std::string version;
  std::string subcommand;
  std::vector<std::string> argv;  // without the program name
  std::string cwd;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::string stdout_sha256;

  std::string to_json() const;
  // Throws ValidationError on a malformed manifest.
  static RunManifest parse(std::string_view text);
};

// Records every file a subcommand reads and writes.
class RunContext {
 public:
  // Reads and digests an input. Throws IoError.
  std::string read(const std::filesystem::path& path);
  // Atomic write; digests the contents. Throws IoError.
  void write(const std::filesystem::path& path, std::string_view contents);

  const std::vector<FileDigest>& inputs() const { return inputs_; }
  const std::vector<FileDigest>& outputs() const { return outputs_; }

 private:
  std::vector<FileDigest> inputs_;
  std::vector<FileDigest> outputs_;
};

}  // namespace finsent::cli

#endif  // FINSENT_TOOLS_MANIFEST_H_
