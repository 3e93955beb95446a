#include "pvd/flow/field.hpp"

#include <cstdint>
#include <fstream>

#include "pvd/core/errors.hpp"

namespace pvd {

namespace {
constexpr float kFloMagic = 202021.25f;
constexpr float kInvalidFlow = 1e9f;
}  // namespace

void write_flo(const std::string& path, const FlowField& flow) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for write: " + path);
  const std::int32_t w = flow.width(), h = flow.height();
  out.write(reinterpret_cast<const char*>(&kFloMagic), 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  std::vector<float> row(static_cast<size_t>(w) * 2);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool ok = flow.valid.at(x, y) != 0;
      row[2 * x + 0] = ok ? flow.du.at(x, y) : kInvalidFlow;
      row[2 * x + 1] = ok ? flow.dv.at(x, y) : kInvalidFlow;
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size() * 4);
  }
}

FlowField read_flo(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  float magic = 0.f;
  std::int32_t w = 0, h = 0;
  in.read(reinterpret_cast<char*>(&magic), 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  if (!in || magic != kFloMagic || w <= 0 || h <= 0) throw Error("not a .flo file: " + path);
  FlowField flow(w, h);
  std::vector<float> row(static_cast<size_t>(w) * 2);
  for (int y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()), row.size() * 4);
    if (!in) throw Error("truncated .flo: " + path);
    for (int x = 0; x < w; ++x) {
      const float u = row[2 * x + 0], v = row[2 * x + 1];
      if (std::abs(u) > 1e8f || std::abs(v) > 1e8f) {
        flow.valid.at(x, y) = 0;
      } else {
        flow.du.at(x, y) = u;
        flow.dv.at(x, y) = v;
      }
    }
  }
  return flow;
}

}  // namespace pvd
