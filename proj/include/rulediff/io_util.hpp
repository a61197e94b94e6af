#pragma once

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "rulediff/errors.hpp"

namespace rulediff {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw ParseError("error while reading '" + path + "'");
  return std::move(ss).str();
}

inline bool is_gzip(const std::string& bytes) {
  return bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
         static_cast<unsigned char>(bytes[1]) == 0x8b;
}

inline std::string gzip_inflate(const std::string& bytes, const std::string& origin) {
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  // 15 + 32: accept both zlib and gzip framing.
  if (inflateInit2(&zs, 15 + 32) != Z_OK)
    throw ParseError("cannot initialise decompression for '" + origin + "'");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
  zs.avail_in = static_cast<uInt>(bytes.size());

  std::string out;
  char buf[1 << 16];
  int ret = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    ret = inflate(&zs, Z_NO_FLUSH);
    if (ret != Z_OK && ret != Z_STREAM_END) {
      inflateEnd(&zs);
      throw ParseError("corrupt gzip data in '" + origin + "'");
    }
    out.append(buf, sizeof(buf) - zs.avail_out);
  } while (ret != Z_STREAM_END);
  inflateEnd(&zs);
  return out;
}

// Whole file, transparently decompressed when gzip-framed.
inline std::string read_input_file(const std::string& path) {
  std::string bytes = read_file(path);
  if (is_gzip(bytes)) return gzip_inflate(bytes, path);
  return bytes;
}

}  // namespace rulediff
