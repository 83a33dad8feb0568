#include "covaug/npy.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace covaug {

static_assert(std::endian::native == std::endian::little,
              "float64 payloads are written natively and assume a little-endian host");

namespace {

constexpr char kMagic[] = "\x93NUMPY";

std::string shape_literal(const std::vector<std::size_t>& shape) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << ", ";
    out << shape[i];
  }
  if (shape.size() == 1) out << ',';
  out << ')';
  return out.str();
}

[[noreturn]] void malformed(const std::string& what) {
  throw std::runtime_error("npy: " + what);
}

/// Extracts the python literal following "'key':" in the header dict.
std::string dict_value(const std::string& header, const std::string& key) {
  const std::string needle = "'" + key + "':";
  const auto pos = header.find(needle);
  if (pos == std::string::npos) malformed("header lacks key '" + key + "'");
  std::size_t start = pos + needle.size();
  while (start < header.size() && header[start] == ' ') ++start;
  if (start >= header.size()) malformed("truncated header value");
  if (header[start] == '\'') {
    const auto end = header.find('\'', start + 1);
    if (end == std::string::npos) malformed("unterminated string in header");
    return header.substr(start + 1, end - start - 1);
  }
  if (header[start] == '(') {
    const auto end = header.find(')', start);
    if (end == std::string::npos) malformed("unterminated tuple in header");
    return header.substr(start, end - start + 1);
  }
  auto end = header.find_first_of(",}", start);
  if (end == std::string::npos) end = header.size();
  auto value = header.substr(start, end - start);
  while (!value.empty() && value.back() == ' ') value.pop_back();
  return value;
}

std::vector<std::size_t> parse_shape(const std::string& literal) {
  if (literal.size() < 2 || literal.front() != '(' || literal.back() != ')')
    malformed("shape is not a tuple");
  std::vector<std::size_t> shape;
  std::string body = literal.substr(1, literal.size() - 2);
  std::istringstream in(body);
  std::string token;
  while (std::getline(in, token, ',')) {
    std::size_t begin = token.find_first_not_of(' ');
    if (begin == std::string::npos) continue;  // trailing comma of a 1-tuple
    std::size_t len = token.find_last_not_of(' ') - begin + 1;
    shape.push_back(std::stoull(token.substr(begin, len)));
  }
  return shape;
}

}  // namespace

std::size_t NpyArray::element_count() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::size_t b) { return a * b; });
}

void write_npy(const std::filesystem::path& path, const NpyArray& array) {
  if (array.shape.empty()) throw std::invalid_argument("npy: refusing to write a 0-d array");
  if (array.data.size() != array.element_count())
    throw std::invalid_argument("npy: data size does not match the shape");

  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': " +
                       shape_literal(array.shape) + ", }";
  // Pad with spaces so magic + version + length + header is a multiple of 64,
  // with a final newline, matching numpy's writer byte for byte.
  const std::size_t unpadded = 6 + 2 + 2 + header.size() + 1;
  const std::size_t padded = (unpadded + 63) / 64 * 64;
  header.append(padded - unpadded, ' ');
  header.push_back('\n');
  if (header.size() > 0xffff) malformed("header too large for format version 1.0");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) malformed("cannot open '" + path.string() + "' for writing");
  out.write(kMagic, 6);
  out.put('\x01');
  out.put('\x00');
  const std::uint16_t header_len = static_cast<std::uint16_t>(header.size());
  const unsigned char len_bytes[2] = {static_cast<unsigned char>(header_len & 0xff),
                                      static_cast<unsigned char>(header_len >> 8)};
  out.write(reinterpret_cast<const char*>(len_bytes), 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(array.data.data()),
            static_cast<std::streamsize>(array.data.size() * sizeof(double)));
  if (!out) malformed("write to '" + path.string() + "' failed");
}

NpyArray read_npy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) malformed("cannot open '" + path.string() + "'");
  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, kMagic, 6) != 0) malformed("bad magic");
  unsigned char version[2];
  in.read(reinterpret_cast<char*>(version), 2);
  if (!in || version[0] < 1 || version[0] > 2) malformed("unsupported format version");

  std::size_t header_len = 0;
  if (version[0] == 1) {
    unsigned char len_bytes[2];
    in.read(reinterpret_cast<char*>(len_bytes), 2);
    if (!in) malformed("truncated header length");
    header_len = len_bytes[0] | (std::size_t{len_bytes[1]} << 8);
  } else {
    unsigned char len_bytes[4];
    in.read(reinterpret_cast<char*>(len_bytes), 4);
    if (!in) malformed("truncated header length");
    for (int i = 3; i >= 0; --i) header_len = (header_len << 8) | len_bytes[i];
  }

  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  if (!in) malformed("truncated header");

  if (dict_value(header, "descr") != "<f8") malformed("only '<f8' arrays are supported");
  if (dict_value(header, "fortran_order") != "False")
    malformed("only C-order arrays are supported");

  NpyArray array;
  array.shape = parse_shape(dict_value(header, "shape"));
  if (array.shape.empty()) malformed("0-d arrays are not supported");
  array.data.resize(array.element_count());
  in.read(reinterpret_cast<char*>(array.data.data()),
          static_cast<std::streamsize>(array.data.size() * sizeof(double)));
  if (!in) malformed("truncated data section");
  in.peek();
  if (!in.eof()) malformed("trailing bytes after the data section");
  return array;
}

}  // namespace covaug
