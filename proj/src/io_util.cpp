#include "sosaf/io_util.hpp"

#include "sosaf/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace sosaf {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big)
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  return v;
}

} // namespace

std::map<std::string, std::string> read_key_values(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::io, "cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::io, "malformed header line '" + t + "' in " + path.string());
    out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

const std::string &require_key(const std::map<std::string, std::string> &keys,
                               const std::string &key) {
  const auto it = keys.find(key);
  if (it == keys.end())
    throw Error(ErrorKind::io, "missing header key '" + key + "'");
  return it->second;
}

void write_float32_le(const std::filesystem::path &path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorKind::io, "cannot write " + path.string());
  std::vector<std::uint32_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    words[i] = to_little(std::bit_cast<std::uint32_t>(static_cast<float>(values[i])));
  out.write(reinterpret_cast<const char *>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!out)
    throw Error(ErrorKind::io, "failed writing " + path.string());
}

std::vector<double> read_float32_le(const std::filesystem::path &path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::io, "cannot open " + path.string());
  std::vector<std::uint32_t> words(count);
  in.read(reinterpret_cast<char *>(words.data()),
          static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(std::uint32_t))
    throw Error(ErrorKind::io, "short read from " + path.string());
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::bit_cast<float>(to_little(words[i]));
  return out;
}

} // namespace sosaf
