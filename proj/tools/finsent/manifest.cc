#include "manifest.h"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

#include "finsent/error.h"
#include "finsent/io.h"

namespace finsent::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json digests_to_json(const std::vector<FileDigest>& files) {
  ordered_json out = ordered_json::array();
  for (const auto& f : files) out.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return out;
}

std::vector<FileDigest> digests_from_json(const ordered_json& j) {
  std::vector<FileDigest> out;
  for (const auto& item : j) {
    out.push_back({item.at("path").get<std::string>(),
                   item.at("sha256").get<std::string>()});
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string RunManifest::to_json() const {
  ordered_json j;
  j["toolkit"] = "finsent";
  j["version"] = version;
  j["subcommand"] = subcommand;
  j["argv"] = argv;
  j["cwd"] = cwd;
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["parameters"] = parameters;
  j["inputs"] = digests_to_json(inputs);
  j["outputs"] = digests_to_json(outputs);
  j["stdout_sha256"] = stdout_sha256;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::parse(std::string_view text) {
  const auto j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ValidationError("manifest is not a JSON object");
  }
  try {
    RunManifest m;
    m.version = j.at("version").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.cwd = j.at("cwd").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.jobs = j.at("jobs").get<std::size_t>();
    m.parameters = j.at("parameters");
    m.inputs = digests_from_json(j.at("inputs"));
    m.outputs = digests_from_json(j.at("outputs"));
    m.stdout_sha256 = j.at("stdout_sha256").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
}

std::string RunContext::read(const std::filesystem::path& path) {
  std::string bytes = read_file(path);
  inputs_.push_back({path.string(), sha256_hex(bytes)});
  return bytes;
}

void RunContext::write(const std::filesystem::path& path, std::string_view contents) {
  write_file_atomic(path, contents);
  outputs_.push_back({path.string(), sha256_hex(contents)});
}

}  // namespace finsent::cli
