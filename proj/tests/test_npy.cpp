/// @file
/// @brief Binary .npy reader/writer, byte-compatible with numpy's own files.

#include "covaug/npy.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

using namespace covaug;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>());
}

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& b) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(b.data()),
            static_cast<std::streamsize>(b.size()));
}

// numpy.save output for array([1.5, -2.0, 3.25]), captured byte for byte.
const std::vector<unsigned char> kGoldenVector = {
    0x93, 0x4e, 0x55, 0x4d, 0x50, 0x59, 0x01, 0x00, 0x76, 0x00, 0x7b, 0x27, 0x64, 0x65,
    0x73, 0x63, 0x72, 0x27, 0x3a, 0x20, 0x27, 0x3c, 0x66, 0x38, 0x27, 0x2c, 0x20, 0x27,
    0x66, 0x6f, 0x72, 0x74, 0x72, 0x61, 0x6e, 0x5f, 0x6f, 0x72, 0x64, 0x65, 0x72, 0x27,
    0x3a, 0x20, 0x46, 0x61, 0x6c, 0x73, 0x65, 0x2c, 0x20, 0x27, 0x73, 0x68, 0x61, 0x70,
    0x65, 0x27, 0x3a, 0x20, 0x28, 0x33, 0x2c, 0x29, 0x2c, 0x20, 0x7d, 0x20, 0x20, 0x20,
    0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20,
    0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20,
    0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20,
    0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20,
    0x20, 0x0a, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xf8, 0x3f, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0xc0, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x0a, 0x40};

// numpy.save output for array([[0.1, 1.0, -0.0], [1e-310, 1e308, -7.25]]).
const std::vector<unsigned char> kGoldenMatrix = {
    0x93, 0x4e, 0x55, 0x4d, 0x50, 0x59, 0x01, 0x00, 0x76, 0x00, 0x7b, 0x27, 0x64, 0x65,
    0x73, 0x63, 0x72, 0x27, 0x3a, 0x20, 0x27, 0x3c, 0x66, 0x38, 0x27, 0x2c, 0x20, 0x27,
    0x66, 0x6f, 0x72, 0x74, 0x72, 0x61, 0x6e, 0x5f, 0x6f, 0x72, 0x64, 0x65, 0x72, 0x27,
    0x3a, 0x20, 0x46, 0x61, 0x6c, 0x73, 0x65, 0x2c, 0x20, 0x27, 0x73, 0x68, 0x61, 0x70,
    0x65, 0x27, 0x3a, 0x20, 0x28, 0x32, 0x2c, 0x20, 0x33, 0x29, 0x2c, 0x20, 0x7d, 0x20,
    0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20,
    0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20,
    0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20,
    0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20,
    0x20, 0x0a, 0x9a, 0x99, 0x99, 0x99, 0x99, 0x99, 0xb9, 0x3f, 0x00, 0x00, 0x00, 0x00,
    0x00, 0x00, 0xf0, 0x3f, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x80, 0x2b, 0xe6,
    0x70, 0x8b, 0x68, 0x12, 0x00, 0x00, 0xa0, 0xc8, 0xeb, 0x85, 0xf3, 0xcc, 0xe1, 0x7f,
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1d, 0xc0};

TEST_CASE("writer output is byte-identical to numpy's for a vector") {
  const auto path = temp_file("covaug_npy_vec.npy");
  write_npy(path, NpyArray{{3}, {1.5, -2.0, 3.25}});
  CHECK(read_bytes(path) == kGoldenVector);
  std::filesystem::remove(path);
}

TEST_CASE("writer output is byte-identical to numpy's for a matrix") {
  const auto path = temp_file("covaug_npy_mat.npy");
  write_npy(path, NpyArray{{2, 3}, {0.1, 1.0, -0.0, 1e-310, 1e308, -7.25}});
  CHECK(read_bytes(path) == kGoldenMatrix);
  std::filesystem::remove(path);
}

TEST_CASE("round trip preserves shape and exact bit patterns") {
  const auto path = temp_file("covaug_npy_roundtrip.npy");
  const NpyArray original{{2, 3, 4}, [] {
                            std::vector<double> d(24);
                            for (int i = 0; i < 24; ++i) d[i] = 0.1 * (i - 12) + 1e-13 * i;
                            d[0] = -0.0;
                            d[1] = 1e-310;  // subnormal
                            d[2] = 1e308;
                            return d;
                          }()};
  write_npy(path, original);
  const NpyArray loaded = read_npy(path);
  CHECK(loaded.shape == original.shape);
  REQUIRE(loaded.data.size() == original.data.size());
  for (std::size_t i = 0; i < loaded.data.size(); ++i) {
    std::uint64_t a, b;
    std::memcpy(&a, &loaded.data[i], 8);
    std::memcpy(&b, &original.data[i], 8);
    CHECK(a == b);
  }
  std::filesystem::remove(path);
}

TEST_CASE("rewriting the same array produces identical files") {
  const auto p1 = temp_file("covaug_npy_det1.npy");
  const auto p2 = temp_file("covaug_npy_det2.npy");
  NpyArray arr{{5, 2}, std::vector<double>(10)};
  for (int i = 0; i < 10; ++i) arr.data[i] = std::sin(i * 0.7);
  write_npy(p1, arr);
  write_npy(p2, arr);
  CHECK(read_bytes(p1) == read_bytes(p2));
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("reader accepts numpy's own golden bytes") {
  const auto path = temp_file("covaug_npy_golden_in.npy");
  write_bytes(path, kGoldenMatrix);
  const NpyArray arr = read_npy(path);
  CHECK(arr.shape == std::vector<std::size_t>{2, 3});
  CHECK(arr.data[0] == 0.1);
  CHECK(arr.data[4] == 1e308);
  CHECK(arr.data[5] == -7.25);
  std::filesystem::remove(path);
}

TEST_CASE("reader rejects malformed files") {
  const auto path = temp_file("covaug_npy_bad.npy");

  SUBCASE("bad magic") {
    auto bytes = kGoldenVector;
    bytes[0] = 0x00;
    write_bytes(path, bytes);
    CHECK_THROWS_AS(read_npy(path), std::runtime_error);
  }
  SUBCASE("unsupported dtype") {
    auto bytes = kGoldenVector;
    bytes[23] = '4';  // '<f8' -> '<f4'
    write_bytes(path, bytes);
    CHECK_THROWS_AS(read_npy(path), std::runtime_error);
  }
  SUBCASE("fortran order") {
    auto bytes = kGoldenVector;
    // 'False' -> 'True ' keeps the header length intact.
    const char t[] = {'T', 'r', 'u', 'e', ' '};
    for (int i = 0; i < 5; ++i) bytes[44 + i] = static_cast<unsigned char>(t[i]);
    write_bytes(path, bytes);
    CHECK_THROWS_AS(read_npy(path), std::runtime_error);
  }
  SUBCASE("truncated data") {
    auto bytes = kGoldenVector;
    bytes.resize(bytes.size() - 3);
    write_bytes(path, bytes);
    CHECK_THROWS_AS(read_npy(path), std::runtime_error);
  }
  SUBCASE("trailing bytes") {
    auto bytes = kGoldenVector;
    bytes.push_back(0x00);
    write_bytes(path, bytes);
    CHECK_THROWS_AS(read_npy(path), std::runtime_error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_npy(temp_file("covaug_npy_does_not_exist.npy")),
                    std::runtime_error);
  }
  std::filesystem::remove(path);
}

TEST_CASE("writer validates its input") {
  const auto path = temp_file("covaug_npy_invalid.npy");
  CHECK_THROWS_AS(write_npy(path, NpyArray{{}, {1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(write_npy(path, NpyArray{{3}, {1.0}}), std::invalid_argument);
}

}  // namespace
