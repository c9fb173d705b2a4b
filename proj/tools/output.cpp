#include "output.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "scdim/errors.hpp"

namespace scdim::cli {

std::string RunHeader::lines(std::string_view prefix) const {
  std::string out;
  auto line = [&](const std::string& text) {
    out += prefix;
    out += text;
    out += '\n';
  };
  line("scdim " + version);
  line("config: " + config);
  line("seed: " + std::to_string(seed));
  if (timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    line(std::string("timestamp: ") + buf);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw InvalidInput("cannot write " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InvalidInput("cannot write " + path.string() + ": " + ec.message());
  }
}

std::filesystem::path resolve_relative(const std::string& path, const std::filesystem::path& referencing_file) {
  std::filesystem::path p(path);
  if (p.is_absolute() || std::filesystem::exists(p)) return p;
  auto candidate = referencing_file.parent_path() / p;
  return std::filesystem::exists(candidate) ? candidate : p;
}

void Sink::write(std::string_view text) const {
  if (path_) {
    write_atomic(*path_, text);
  } else {
    std::cout << text;
    std::cout.flush();
  }
}

}  // namespace scdim::cli
