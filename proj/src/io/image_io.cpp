#include "pvd/io/image_io.hpp"

#include <cstdint>
#include <fstream>

#include "pvd/core/errors.hpp"

namespace pvd {

namespace {

std::uint8_t to_byte(float v) {
  const float c = std::clamp(v, 0.f, 1.f);
  return static_cast<std::uint8_t>(c * 255.f + 0.5f);
}

void skip_pnm_whitespace(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

}  // namespace

void write_pgm(const std::string& path, const Grid& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for write: " + path);
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  std::vector<std::uint8_t> row(image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) row[x] = to_byte(image.at(x, y));
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
}

Grid read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw Error("not a binary PGM: " + path);
  skip_pnm_whitespace(in);
  int w = 0, h = 0, maxval = 0;
  in >> w;
  skip_pnm_whitespace(in);
  in >> h;
  skip_pnm_whitespace(in);
  in >> maxval;
  if (w <= 0 || h <= 0 || maxval != 255) throw Error("unsupported PGM header: " + path);
  in.get();  // single whitespace before raster
  Grid image(w, h);
  std::vector<std::uint8_t> row(w);
  for (int y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()), row.size());
    if (!in) throw Error("truncated PGM: " + path);
    for (int x = 0; x < w; ++x) image.at(x, y) = static_cast<float>(row[x]) / 255.f;
  }
  return image;
}

void write_ppm(const std::string& path, const RgbImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for write: " + path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  std::vector<std::uint8_t> row(static_cast<size_t>(image.width) * 3);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const auto& px = image.at(x, y);
      row[3 * x + 0] = to_byte(px[0]);
      row[3 * x + 1] = to_byte(px[1]);
      row[3 * x + 2] = to_byte(px[2]);
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
}

}  // namespace pvd
