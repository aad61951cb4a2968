#include <bit>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "spoofsim/errors.h"
#include "spoofsim/features.h"

namespace spoofsim::features {
namespace {

constexpr char kMagic[4] = {'S', 'P', 'F', 'T'};

static_assert(std::endian::native == std::endian::little,
              "feature files are written in host order, which must be little-endian");

}  // namespace

void WriteFeatures(const std::filesystem::path& path, const FeatureMatrix& f) {
  if (f.values.size() != f.frames * f.dims) throw ArgumentError("malformed feature matrix");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const auto dims = static_cast<std::uint32_t>(f.dims);
  const auto frames = static_cast<std::uint32_t>(f.frames);
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&dims), 4);
  out.write(reinterpret_cast<const char*>(&frames), 4);
  std::vector<float> data(f.values.begin(), f.values.end());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!out) throw IoError("write failed for " + path.string());
}

FeatureMatrix ReadFeatures(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  std::uint32_t dims = 0, frames = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&dims), 4);
  in.read(reinterpret_cast<char*>(&frames), 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(path.string() + ": not a feature file");
  }
  std::vector<float> data(static_cast<std::size_t>(dims) * frames);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!in) throw FormatError(path.string() + ": truncated feature data");
  FeatureMatrix f(frames, dims);
  std::copy(data.begin(), data.end(), f.values.begin());
  return f;
}

void WriteFeaturesCsv(const std::filesystem::path& path, const FeatureMatrix& f) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t t = 0; t < f.frames; ++t) {
    for (std::size_t d = 0; d < f.dims; ++d) {
      out << (d ? "," : "") << fmt::format("{:.9g}", f.at(t, d));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace spoofsim::features
