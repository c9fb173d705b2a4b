#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace scdim::cli {

// Provenance block written at the top of every output.
struct RunHeader {
  std::string version;
  std::string config;  // echoed command line
  std::uint64_t seed = 0;
  bool timestamp = true;

  /// Lines starting with `prefix` ("# " for text formats).
  std::string lines(std::string_view prefix = "# ") const;
};

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, std::string_view text);

/// `path` unchanged when absolute or present; otherwise resolved against
/// the directory of the file that referenced it.
std::filesystem::path resolve_relative(const std::string& path, const std::filesystem::path& referencing_file);

// Destination of a command's main output: a file, or stdout when unset.
class Sink {
 public:
  explicit Sink(std::optional<std::filesystem::path> path) : path_(std::move(path)) {}
  void write(std::string_view text) const;
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  std::optional<std::filesystem::path> path_;
};

}  // namespace scdim::cli
