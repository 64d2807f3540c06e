#include "repaudit/io.hpp"

#include <fstream>
#include <iterator>
#include <system_error>

#include "repaudit/error.hpp"

namespace repaudit {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

namespace {

fs::path temp_sibling(const fs::path& path) {
  fs::path tmp = path;
  tmp += ".tmp";
  return tmp;
}

void write_raw(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open for writing: " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view contents) {
  const fs::path tmp = temp_sibling(path);
  try {
    write_raw(tmp, contents);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::kIo, "rename failed: " + path.string());
  }
}

void OutputTransaction::stage(std::string name, std::string contents) {
  files_.emplace_back(std::move(name), std::move(contents));
}

void OutputTransaction::stage(std::string name,
                              const std::vector<std::uint8_t>& contents) {
  stage(std::move(name), std::string(contents.begin(), contents.end()));
}

std::vector<fs::path> OutputTransaction::commit() {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create directory " + dir_.string());

  std::vector<fs::path> temps;
  auto cleanup = [&temps] {
    std::error_code ignored;
    for (const auto& t : temps) fs::remove(t, ignored);
  };
  try {
    for (const auto& [name, contents] : files_) {
      temps.push_back(temp_sibling(dir_ / name));
      write_raw(temps.back(), contents);
    }
  } catch (...) {
    cleanup();
    throw;
  }

  std::vector<fs::path> published;
  for (std::size_t i = 0; i < files_.size(); ++i) {
    const fs::path target = dir_ / files_[i].first;
    fs::rename(temps[i], target, ec);
    if (ec) {
      cleanup();
      for (const auto& p : published) fs::remove(p, ec);
      fail(ErrorCode::kIo, "rename failed: " + target.string());
    }
    published.push_back(target);
  }
  return published;
}

}  // namespace repaudit
