#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace repaudit {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

// Collects output files in memory and publishes them together. Nothing is
// visible in the target directory until commit() succeeds; a failed commit
// removes whatever it had staged on disk.
class OutputTransaction {
 public:
  explicit OutputTransaction(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void stage(std::string name, std::string contents);
  void stage(std::string name, const std::vector<std::uint8_t>& contents);

  // Returns the final paths, in staging order.
  std::vector<std::filesystem::path> commit();

  const std::vector<std::pair<std::string, std::string>>& staged() const {
    return files_;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace repaudit
