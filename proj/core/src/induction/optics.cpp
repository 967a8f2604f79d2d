// Copyright 2026 The RuleFuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rulefuse/induction/optics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include "rulefuse/core/error.hpp"
#include "rulefuse/induction/embed.hpp"

namespace rulefuse::induction {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rounds to 15 decimals the way the reference implementation does, which
// makes near-equal reachabilities compare equal.
double round15(double x) {
  if (!std::isfinite(x)) return x;
  return std::nearbyint(x * 1e15) / 1e15;
}

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::size_t extend_region(const std::vector<bool>& steep, const std::vector<bool>& xward, std::size_t start,
                          std::size_t min_samples) {
  const std::size_t n = steep.size();
  std::size_t non_xward = 0;
  std::size_t end = start;
  for (std::size_t index = start; index < n; ++index) {
    if (steep[index]) {
      non_xward = 0;
      end = index;
    } else if (!xward[index]) {
      ++non_xward;
      if (non_xward > min_samples) break;
    } else {
      return end;
    }
  }
  return end;
}

struct SteepDownArea {
  std::size_t start;
  std::size_t end;
  double mib;
};

void update_filter_sdas(std::vector<SteepDownArea>& sdas, double mib, double xi_complement,
                        const std::vector<double>& plot) {
  if (std::isinf(mib)) {
    sdas.clear();
    return;
  }
  std::vector<SteepDownArea> kept;
  for (auto sda : sdas) {
    if (mib <= plot[sda.start] * xi_complement) {
      sda.mib = std::max(sda.mib, mib);
      kept.push_back(sda);
    }
  }
  sdas = std::move(kept);
}

std::optional<std::pair<std::size_t, std::size_t>> correct_predecessor(const std::vector<double>& plot,
                                                                       const std::vector<long>& pred_plot,
                                                                       const std::vector<std::size_t>& ordering,
                                                                       std::size_t s, std::size_t e) {
  while (s < e) {
    if (plot[s] > plot[e]) return std::make_pair(s, e);
    const long p_e = pred_plot[e];
    for (std::size_t i = s; i < e; ++i) {
      if (p_e == static_cast<long>(ordering[i])) return std::make_pair(s, e);
    }
    --e;
  }
  return std::nullopt;
}

}  // namespace

OpticsGraph compute_optics_graph(const std::vector<std::vector<double>>& points, std::size_t min_samples) {
  const std::size_t n = points.size();
  if (min_samples < 2) throw ValidationError("OPTICS: min_samples must be at least 2");
  if (min_samples > n) throw ValidationError("OPTICS: min_samples exceeds the number of points");

  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = euclidean(points[i], points[j]);
  }

  OpticsGraph g;
  g.core_distances.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row = dist[i];
    std::nth_element(row.begin(), row.begin() + static_cast<long>(min_samples - 1), row.end());
    g.core_distances[i] = round15(row[min_samples - 1]);
  }
  g.reachability.assign(n, kInf);
  g.predecessor.assign(n, -1);
  std::vector<bool> processed(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t point = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (processed[i]) continue;
      if (point == n || g.reachability[i] < g.reachability[point]) point = i;
    }
    processed[point] = true;
    g.ordering.push_back(point);
    if (std::isinf(g.core_distances[point])) continue;
    for (std::size_t u = 0; u < n; ++u) {
      if (processed[u]) continue;
      const double rd = round15(std::max(dist[point][u], g.core_distances[point]));
      if (rd < g.reachability[u]) {
        g.reachability[u] = rd;
        g.predecessor[u] = static_cast<long>(point);
      }
    }
  }
  return g;
}

std::vector<std::pair<std::size_t, std::size_t>> xi_clusters(const OpticsGraph& graph, std::size_t min_samples,
                                                             std::size_t min_cluster_size, double xi,
                                                             bool predecessor_correction) {
  const std::size_t n = graph.ordering.size();
  std::vector<double> plot(n + 1, kInf);
  std::vector<long> pred_plot(n);
  for (std::size_t i = 0; i < n; ++i) {
    plot[i] = graph.reachability[graph.ordering[i]];
    pred_plot[i] = graph.predecessor[graph.ordering[i]];
  }
  const double xi_complement = 1.0 - xi;
  std::vector<bool> steep_up(n), steep_down(n), down(n), up(n);
  std::vector<std::size_t> steep_indices;
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = plot[i] / plot[i + 1];  // NaN compares false
    steep_up[i] = ratio <= xi_complement;
    steep_down[i] = ratio >= 1.0 / xi_complement;
    down[i] = ratio > 1.0;
    up[i] = ratio < 1.0;
    if (steep_up[i] || steep_down[i]) steep_indices.push_back(i);
  }

  std::vector<std::pair<std::size_t, std::size_t>> clusters;
  std::vector<SteepDownArea> sdas;
  std::size_t index = 0;
  double mib = 0.0;
  for (const std::size_t steep_index : steep_indices) {
    if (steep_index < index) continue;
    mib = std::max(mib, *std::max_element(plot.begin() + static_cast<long>(index),
                                          plot.begin() + static_cast<long>(steep_index) + 1));
    if (steep_down[steep_index]) {
      update_filter_sdas(sdas, mib, xi_complement, plot);
      const std::size_t d_end = extend_region(steep_down, up, steep_index, min_samples);
      sdas.push_back({steep_index, d_end, 0.0});
      index = d_end + 1;
      mib = plot[index];
      continue;
    }
    update_filter_sdas(sdas, mib, xi_complement, plot);
    const std::size_t u_start = steep_index;
    const std::size_t u_end = extend_region(steep_up, down, u_start, min_samples);
    index = u_end + 1;
    mib = plot[index];
    std::vector<std::pair<std::size_t, std::size_t>> u_clusters;
    for (const auto& d : sdas) {
      std::size_t c_start = d.start;
      std::size_t c_end = u_end;
      if (plot[c_end + 1] * xi_complement < d.mib) continue;
      const double d_max = plot[d.start];
      if (d_max * xi_complement >= plot[c_end + 1]) {
        while (plot[c_start + 1] > plot[c_end + 1] && c_start < d.end) ++c_start;
      } else if (plot[c_end + 1] * xi_complement >= d_max) {
        while (plot[c_end - 1] > d_max && c_end > u_start) --c_end;
      }
      if (predecessor_correction) {
        const auto corrected = correct_predecessor(plot, pred_plot, graph.ordering, c_start, c_end);
        if (!corrected) continue;
        std::tie(c_start, c_end) = *corrected;
      }
      if (c_end - c_start + 1 < min_cluster_size) continue;
      if (c_start > d.end) continue;
      if (c_end < u_start) continue;
      u_clusters.emplace_back(c_start, c_end);
    }
    clusters.insert(clusters.end(), u_clusters.rbegin(), u_clusters.rend());
  }
  return clusters;
}

std::vector<int> xi_labels(const OpticsGraph& graph,
                           const std::vector<std::pair<std::size_t, std::size_t>>& clusters) {
  const std::size_t n = graph.ordering.size();
  std::vector<int> plot_labels(n, -1);
  int label = 0;
  for (const auto& [s, e] : clusters) {
    bool free = true;
    for (std::size_t i = s; i <= e; ++i) free = free && plot_labels[i] == -1;
    if (!free) continue;
    for (std::size_t i = s; i <= e; ++i) plot_labels[i] = label;
    ++label;
  }
  std::vector<int> labels(n, -1);
  for (std::size_t i = 0; i < n; ++i) labels[graph.ordering[i]] = plot_labels[i];
  return labels;
}

std::vector<int> optics_xi(const std::vector<std::vector<double>>& points, const ClusterParams& params) {
  const std::size_t n = points.size();
  if (n < params.min_samples || n < 2) return std::vector<int>(n, -1);
  const std::size_t min_cluster_size =
      std::max<std::size_t>(2, static_cast<std::size_t>(params.min_cluster_fraction * static_cast<double>(n)));
  const OpticsGraph g = compute_optics_graph(points, params.min_samples);
  return xi_labels(g, xi_clusters(g, params.min_samples, min_cluster_size, params.xi));
}

std::vector<Cluster> cluster_cases(const std::vector<std::vector<double>>& embeddings, CaseField field,
                                   const ClusterParams& params) {
  const std::vector<int> labels = optics_xi(embeddings, params);
  const int count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<Cluster> out(static_cast<std::size_t>(std::max(count, 0)));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) out[static_cast<std::size_t>(labels[i])].members.push_back(i);
  }
  for (auto& c : out) {
    c.field = field;
    double best = kInf;
    for (const std::size_t a : c.members) {
      double sum = 0.0;
      for (const std::size_t b : c.members) sum += euclidean(embeddings[a], embeddings[b]);
      if (sum < best) {
        best = sum;
        c.medoid = a;
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    return a.members.front() < b.members.front();
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

std::vector<Cluster> cluster_all_fields(const std::vector<ErrorCase>& cases, const ClusterParams& params) {
  std::vector<Cluster> all;
  if (cases.size() < 2) return all;
  std::set<std::vector<std::size_t>> seen;
  for (const CaseField field : kAllCaseFields) {
    const CaseEmbeddings emb = embed_cases(cases, field);
    if (emb.degenerate) continue;
    for (auto& c : cluster_cases(emb.vectors, field, params)) {
      if (seen.insert(c.members).second) all.push_back(std::move(c));
    }
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Cluster& a, const Cluster& b) { return a.members.size() > b.members.size(); });
  for (std::size_t i = 0; i < all.size(); ++i) all[i].id = static_cast<int>(i);
  return all;
}

}  // namespace rulefuse::induction
