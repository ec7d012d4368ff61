#include "bestofn/analysis/embedding.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace bestofn::analysis {

double knn_label_agreement(const std::vector<std::array<double, 3>>& points,
                           const std::vector<int>& labels, int k) {
  if (points.size() != labels.size()) throw std::invalid_argument("points/labels size mismatch");
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) pool.push_back(i);
  }
  if (static_cast<int>(pool.size()) < k + 1) {
    throw std::invalid_argument("not enough labeled points for k neighbors");
  }

  double agreement_sum = 0.0;
  for (std::size_t qi : pool) {
    std::vector<std::pair<double, std::size_t>> dists;
    dists.reserve(pool.size() - 1);
    for (std::size_t pj : pool) {
      if (pj == qi) continue;
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double diff = points[qi][static_cast<std::size_t>(c)] -
                            points[pj][static_cast<std::size_t>(c)];
        d2 += diff * diff;
      }
      dists.emplace_back(d2, pj);
    }
    std::partial_sort(dists.begin(), dists.begin() + k, dists.end());
    int same = 0;
    for (int j = 0; j < k; ++j) {
      if (labels[dists[static_cast<std::size_t>(j)].second] == labels[qi]) ++same;
    }
    agreement_sum += static_cast<double>(same) / static_cast<double>(k);
  }
  return agreement_sum / static_cast<double>(pool.size());
}

double majority_class_share(const std::vector<int>& labels) {
  std::map<int, long> counts;
  long total = 0;
  for (int label : labels) {
    if (label < 0) continue;
    counts[label] += 1;
    total += 1;
  }
  if (total == 0) throw std::invalid_argument("no labeled points");
  long best = 0;
  for (const auto& [label, count] : counts) best = std::max(best, count);
  return static_cast<double>(best) / static_cast<double>(total);
}

}  // namespace bestofn::analysis
