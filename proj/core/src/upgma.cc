#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "spoofsim/embed.h"
#include "spoofsim/errors.h"

namespace spoofsim::embed {

Dendrogram Upgma(const DistanceMatrix& d) {
  const std::size_t m = d.size();
  if (m < 2) throw ArgumentError("UPGMA needs at least two classes");
  if (d.values.size() != m * m) throw ArgumentError("distance matrix is not square");
  for (double v : d.values) {
    if (std::isnan(v)) throw ArgumentError("NaN in distance matrix");
  }

  // Active clusters: id, size, smallest member label, distances to the others.
  std::vector<std::size_t> id(m), size(m, 1);
  std::vector<std::string> key(d.labels);
  std::vector<std::vector<double>> dist(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    id[i] = i;
    for (std::size_t j = 0; j < m; ++j) dist[i][j] = 0.5 * (d.at(i, j) + d.at(j, i));
  }

  Dendrogram out;
  out.labels = d.labels;
  std::size_t next_id = m;
  while (id.size() > 1) {
    const std::size_t n = id.size();
    std::size_t ba = 0, bb = 1;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double cur = dist[ba][bb], cand = dist[a][b];
        if (cand < cur) {
          ba = a;
          bb = b;
        } else if (cand == cur) {
          auto pair_key = [&](std::size_t x, std::size_t y) {
            return key[x] < key[y] ? std::pair(key[x], key[y]) : std::pair(key[y], key[x]);
          };
          if (pair_key(a, b) < pair_key(ba, bb)) {
            ba = a;
            bb = b;
          }
        }
      }
    }
    if (key[bb] < key[ba]) std::swap(ba, bb);
    Merge merge{id[ba], id[bb], dist[ba][bb], size[ba] + size[bb]};
    out.merges.push_back(merge);

    // Size-weighted average into slot ba, then drop bb.
    for (std::size_t k = 0; k < n; ++k) {
      if (k == ba || k == bb) continue;
      const double v = (size[ba] * dist[ba][k] + size[bb] * dist[bb][k]) / (size[ba] + size[bb]);
      dist[ba][k] = dist[k][ba] = v;
    }
    id[ba] = next_id++;
    size[ba] = merge.size;
    key[ba] = std::min(key[ba], key[bb]);
    id.erase(id.begin() + static_cast<std::ptrdiff_t>(bb));
    size.erase(size.begin() + static_cast<std::ptrdiff_t>(bb));
    key.erase(key.begin() + static_cast<std::ptrdiff_t>(bb));
    dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(bb));
    for (auto& row : dist) row.erase(row.begin() + static_cast<std::ptrdiff_t>(bb));
  }
  return out;
}

std::string Dendrogram::ToNewick() const {
  const std::size_t m = labels.size();
  if (merges.empty()) return m == 1 ? labels[0] + ";" : ";";
  auto height = [&](std::size_t node) { return node < m ? 0.0 : merges[node - m].height; };
  std::function<std::string(std::size_t)> render = [&](std::size_t node) -> std::string {
    if (node < m) return labels[node];
    const Merge& mg = merges[node - m];
    return fmt::format("({}:{:.6g},{}:{:.6g})", render(mg.left),
                       (mg.height - height(mg.left)) / 2.0, render(mg.right),
                       (mg.height - height(mg.right)) / 2.0);
  };
  return render(m + merges.size() - 1) + ";";
}

std::string Dendrogram::ToJson() const {
  nlohmann::json j;
  j["labels"] = labels;
  j["merges"] = nlohmann::json::array();
  for (const auto& mg : merges) {
    j["merges"].push_back(
        {{"left", mg.left}, {"right", mg.right}, {"height", mg.height}, {"size", mg.size}});
  }
  j["newick"] = ToNewick();
  return j.dump(2);
}

}  // namespace spoofsim::embed
