#ifndef FINSENT_IO_H_
#define FINSENT_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace finsent {

// Whole file as raw bytes. Throws IoError.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file then renames over `path`, so readers never
// observe a partial artifact. Throws IoError.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace finsent

#endif  // FINSENT_IO_H_
