#pragma once

#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace autochemo::io {

namespace fs = std::filesystem;
using nlohmann::json;

inline std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), std::streamsize(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), std::size_t(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

struct BinMeta {
  std::vector<std::size_t> shape;
  double ell = 0.0;
  double t = 0.0;
  std::string field;
};

inline fs::path sidecar_path(const fs::path& bin) {
  fs::path s = bin;
  s.replace_extension(".json");
  return s;
}

// Little-endian float64 array plus a JSON sidecar next to it.
inline void write_bin(const fs::path& path, const std::vector<double>& data, const BinMeta& meta) {
  std::size_t count = 1;
  for (auto s : meta.shape) count *= s;
  if (count != data.size()) throw std::invalid_argument("shape does not match data size for " + path.string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size() * sizeof(double)));
  } else {
    for (double v : data) {
      std::uint64_t u;
      std::memcpy(&u, &v, 8);
      u = __builtin_bswap64(u);
      out.write(reinterpret_cast<const char*>(&u), 8);
    }
  }
  json side = {{"shape", meta.shape}, {"ell", meta.ell}, {"t", meta.t}, {"field", meta.field},
               {"dtype", "float64"}, {"endian", "little"}};
  std::ofstream js(sidecar_path(path));
  js << side.dump(2) << "\n";
}

inline std::vector<double> read_bin(const fs::path& path, BinMeta* meta = nullptr) {
  std::ifstream js(sidecar_path(path));
  if (!js) throw std::runtime_error("missing sidecar for " + path.string());
  json side = json::parse(js);
  BinMeta m;
  m.shape = side.at("shape").get<std::vector<std::size_t>>();
  m.ell = side.at("ell").get<double>();
  m.t = side.at("t").get<double>();
  m.field = side.at("field").get<std::string>();
  std::size_t count = 1;
  for (auto s : m.shape) count *= s;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<double> data(count);
  in.read(reinterpret_cast<char*>(data.data()), std::streamsize(count * sizeof(double)));
  if (std::size_t(in.gcount()) != count * sizeof(double))
    throw std::runtime_error(path.string() + " is shorter than its sidecar shape");
  if constexpr (std::endian::native != std::endian::little) {
    for (double& v : data) {
      std::uint64_t u;
      std::memcpy(&u, &v, 8);
      u = __builtin_bswap64(u);
      std::memcpy(&v, &u, 8);
    }
  }
  if (meta) *meta = m;
  return data;
}

// Minimal CSV writer; numbers at full round-trip precision.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }
  template <class... T>
  void row(const T&... v) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << v), ...);
    out_ << "\n";
  }
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

inline json file_entry(const fs::path& root, const fs::path& file) {
  return {{"path", fs::relative(file, root).generic_string()},
          {"sha256", sha256_file(file)},
          {"bytes", fs::file_size(file)}};
}

}  // namespace autochemo::io
