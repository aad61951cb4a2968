#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "spoofsim/embed.h"
#include "spoofsim/errors.h"

namespace spoofsim::embed {

EmbeddingSet ReadEmbeddingsCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  EmbeddingSet e;
  std::string line;
  int n = 0;
  bool have_dims = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (n == 1 && line.rfind("utt_id", 0) == 0)) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() < 4) {
      throw FormatError(fmt::format("{}:{}: expected utt_id,speaker_id,class_id,v0,...",
                                    path.string(), n));
    }
    const std::size_t dims = cells.size() - 3;
    if (!have_dims) {
      e.dims = dims;
      have_dims = true;
    } else if (dims != e.dims) {
      throw FormatError(fmt::format("{}:{}: {} values, expected {}", path.string(), n, dims, e.dims));
    }
    e.utt_ids.push_back(cells[0]);
    e.speaker_ids.push_back(cells[1]);
    e.class_ids.push_back(cells[2]);
    for (std::size_t i = 3; i < cells.size(); ++i) {
      try {
        std::size_t used = 0;
        e.values.push_back(std::stod(cells[i], &used));
        if (used != cells[i].size()) throw std::invalid_argument("trailing text");
      } catch (const std::exception&) {
        throw FormatError(fmt::format("{}:{}: bad value '{}'", path.string(), n, cells[i]));
      }
    }
  }
  e.Validate();
  return e;
}

void WriteEmbeddingsCsv(const std::filesystem::path& path, const EmbeddingSet& e) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "utt_id,speaker_id,class_id";
  for (std::size_t d = 0; d < e.dims; ++d) out << ",v" << d;
  out << '\n';
  for (std::size_t i = 0; i < e.size(); ++i) {
    out << e.utt_ids[i] << ',' << e.speaker_ids[i] << ',' << e.class_ids[i];
    for (double v : e.Row(i)) out << fmt::format(",{:.17g}", v);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void WriteDistanceCsv(const std::filesystem::path& path, const DistanceMatrix& d) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "class";
  for (const auto& l : d.labels) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << d.labels[i];
    for (std::size_t j = 0; j < d.size(); ++j) out << fmt::format(",{:.17g}", d.at(i, j));
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace spoofsim::embed
