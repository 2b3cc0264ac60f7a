#include "sp3d/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "sp3d/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "image io assumes a little-endian host");

namespace sp3d {

namespace {

// Next whitespace-delimited token, PGM/PFM style.
std::string next_token(std::istream& in) {
  std::string tok;
  in >> tok;
  if (!in) throw IoError("image read: truncated header");
  return tok;
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const Image& img) {
  if (img.rows() == 0 || img.cols() == 0) throw SizeError("write_pfm: empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_pfm: cannot open " + path.string());
  out << "Pf\n" << img.cols() << " " << img.rows() << "\n-1.0\n";
  // PFM stores rows bottom-to-top.
  std::vector<float> row(static_cast<std::size_t>(img.cols()));
  for (Index p = img.rows() - 1; p >= 0; --p) {
    for (Index q = 0; q < img.cols(); ++q) row[static_cast<std::size_t>(q)] = static_cast<float>(img(p, q));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw IoError("write_pfm: write failed for " + path.string());
}

Image read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_pfm: cannot open " + path.string());
  const std::string magic = next_token(in);
  if (magic != "Pf")
    throw IoError("read_pfm: expected grayscale 'Pf', got '" + magic + "'");
  const Index cols = std::stoll(next_token(in));
  const Index rows = std::stoll(next_token(in));
  const double scale = std::stod(next_token(in));
  if (cols <= 0 || rows <= 0) throw IoError("read_pfm: bad dimensions");
  if (scale >= 0.0) throw IoError("read_pfm: big-endian PFM not supported");
  in.get();  // single whitespace byte after the header
  Image img(rows, cols);
  std::vector<float> row(static_cast<std::size_t>(cols));
  for (Index p = rows - 1; p >= 0; --p) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw IoError("read_pfm: truncated pixel data in " + path.string());
    for (Index q = 0; q < cols; ++q) img(p, q) = row[static_cast<std::size_t>(q)];
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const Image& img, double lo, double hi) {
  if (img.rows() == 0 || img.cols() == 0) throw SizeError("write_pgm: empty image");
  if (!(hi > lo)) throw SizeError("write_pgm: need hi > lo");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_pgm: cannot open " + path.string());
  out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
  std::vector<std::uint8_t> row(static_cast<std::size_t>(img.cols()));
  for (Index p = 0; p < img.rows(); ++p) {
    for (Index q = 0; q < img.cols(); ++q) {
      const double v = std::clamp((img(p, q) - lo) / (hi - lo), 0.0, 1.0);
      row[static_cast<std::size_t>(q)] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("write_pgm: write failed for " + path.string());
}

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_pgm: cannot open " + path.string());
  const std::string magic = next_token(in);
  if (magic != "P5") throw IoError("read_pgm: expected binary 'P5', got '" + magic + "'");
  const Index cols = std::stoll(next_token(in));
  const Index rows = std::stoll(next_token(in));
  const long maxval = std::stol(next_token(in));
  if (cols <= 0 || rows <= 0) throw IoError("read_pgm: bad dimensions");
  if (maxval <= 0 || maxval > 255) throw IoError("read_pgm: only 8-bit PGM supported");
  in.get();
  Image img(rows, cols);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(cols));
  for (Index p = 0; p < rows; ++p) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
    if (!in) throw IoError("read_pgm: truncated pixel data in " + path.string());
    for (Index q = 0; q < cols; ++q) img(p, q) = row[static_cast<std::size_t>(q)];
  }
  return img;
}

}  // namespace sp3d
