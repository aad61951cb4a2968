#include <bit>
#include <cstring>
#include <fstream>

#include "spoofsim/errors.h"
#include "spoofsim/gmm.h"

namespace spoofsim::gmm {
namespace {

constexpr char kMagic[4] = {'S', 'P', 'G', 'M'};

static_assert(std::endian::native == std::endian::little,
              "model files are written in host order, which must be little-endian");

void WriteDoubles(std::ofstream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void ReadDoubles(std::ifstream& in, std::vector<double>& v) {
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
}

}  // namespace

void WriteGmm(const std::filesystem::path& path, const GmmModel& m) {
  m.Validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const auto k = static_cast<std::uint32_t>(m.components);
  const auto d = static_cast<std::uint32_t>(m.dims);
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&k), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  WriteDoubles(out, m.weights);
  WriteDoubles(out, m.means);
  WriteDoubles(out, m.variances);
  if (!out) throw IoError("write failed for " + path.string());
}

GmmModel ReadGmm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  std::uint32_t k = 0, d = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&k), 4);
  in.read(reinterpret_cast<char*>(&d), 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(path.string() + ": not a GMM file");
  }
  GmmModel m;
  m.components = k;
  m.dims = d;
  m.weights.resize(k);
  m.means.resize(static_cast<std::size_t>(k) * d);
  m.variances.resize(static_cast<std::size_t>(k) * d);
  ReadDoubles(in, m.weights);
  ReadDoubles(in, m.means);
  ReadDoubles(in, m.variances);
  if (!in) throw FormatError(path.string() + ": truncated GMM file");
  m.Validate();
  return m;
}

}  // namespace spoofsim::gmm
