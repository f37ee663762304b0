#include "seedstm/io.hpp"

#include <sys/stat.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "seedstm/error.hpp"

namespace seedstm::io {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError("write failed: " + path);
}

bool file_exists(const std::string& path) {
  struct stat st;
  return ::stat(path.c_str(), &st) == 0;
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw InputError("cannot create directory: " + path);
}

std::string csv_field(std::string_view s) {
  bool needs_quote = s.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quote) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

uint64_t fnv1a(std::string_view bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

void octal_field(char* dst, size_t width, uint64_t value) {
  // width includes the trailing NUL; values are small enough to fit.
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%0*llo", static_cast<int>(width - 1),
                static_cast<unsigned long long>(value));
  std::memcpy(dst, buf, width - 1);
  dst[width - 1] = '\0';
}

}  // namespace

void TarWriter::add_file(const std::string& name, std::string_view content) {
  if (name.size() > 99)
    throw ComputeError("tar entry name too long: " + name);
  char hdr[512];
  std::memset(hdr, 0, sizeof(hdr));
  std::memcpy(hdr, name.data(), name.size());
  octal_field(hdr + 100, 8, 0644);                 // mode
  octal_field(hdr + 108, 8, 0);                    // uid
  octal_field(hdr + 116, 8, 0);                    // gid
  octal_field(hdr + 124, 12, content.size());      // size
  octal_field(hdr + 136, 12, 0);                   // mtime
  std::memset(hdr + 148, ' ', 8);                  // checksum placeholder
  hdr[156] = '0';                                  // regular file
  std::memcpy(hdr + 257, "ustar", 5);              // magic
  hdr[263] = '0';
  hdr[264] = '0';
  unsigned chk = 0;
  for (unsigned char c : hdr) chk += c;
  octal_field(hdr + 148, 7, chk);
  hdr[155] = ' ';
  buf_.append(hdr, sizeof(hdr));
  buf_.append(content);
  size_t pad = (512 - content.size() % 512) % 512;
  buf_.append(pad, '\0');
}

std::string TarWriter::finish() {
  buf_.append(1024, '\0');
  return std::move(buf_);
}

}  // namespace seedstm::io
