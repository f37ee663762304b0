#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace seedstm::io {

// %.17g — round-trips doubles and is byte-stable across runs.
std::string fmt_double(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);
void ensure_dir(const std::string& path);

// Quote a CSV field when it contains separators, quotes or newlines.
std::string csv_field(std::string_view s);

// Split one CSV line into fields, honoring double-quoted cells.
std::vector<std::string> csv_split(std::string_view line);

// FNV-1a over bytes; used to fingerprint the vocabulary in model files.
uint64_t fnv1a(std::string_view bytes);

// Minimal deterministic ustar archive writer (mtime 0, uid/gid 0, mode 0644).
class TarWriter {
 public:
  void add_file(const std::string& name, std::string_view content);
  // Finalize (two zero blocks) and return the archive bytes.
  std::string finish();

 private:
  std::string buf_;
};

}  // namespace seedstm::io
