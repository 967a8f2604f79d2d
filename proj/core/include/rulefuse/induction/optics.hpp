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

// OPTICS ordering with xi-steep cluster extraction (Euclidean metric,
// unbounded eps). Behaviour, tie-breaking and rounding follow the reference
// description by Ankerst et al. as implemented in scikit-learn, so labels can
// be compared one to one.

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rulefuse/induction/cases.hpp"

namespace rulefuse::induction {

struct OpticsGraph {
  std::vector<std::size_t> ordering;
  std::vector<double> core_distances;
  std::vector<double> reachability;  // +inf when unreached
  std::vector<long> predecessor;     // -1 for seeds
};

// Throws ValidationError when min_samples < 2 or exceeds the point count.
OpticsGraph compute_optics_graph(const std::vector<std::vector<double>>& points, std::size_t min_samples);

// Clusters as [start, end] ranges over the ordering, smaller clusters first
// within each steep-up area.
std::vector<std::pair<std::size_t, std::size_t>> xi_clusters(const OpticsGraph& graph, std::size_t min_samples,
                                                             std::size_t min_cluster_size, double xi,
                                                             bool predecessor_correction = true);

// Flat labels per point (-1 = noise); leaf clusters win.
std::vector<int> xi_labels(const OpticsGraph& graph,
                           const std::vector<std::pair<std::size_t, std::size_t>>& clusters);

struct ClusterParams {
  std::size_t min_samples = 3;
  double xi = 0.05;
  // Fraction of the point count; the effective size is max(2, floor(f * n)).
  double min_cluster_fraction = 0.1;
};

std::vector<int> optics_xi(const std::vector<std::vector<double>>& points, const ClusterParams& params = {});

struct Cluster {
  std::vector<std::size_t> members;  // case indices, ascending
  CaseField field = CaseField::kQuestion;
  std::size_t medoid = 0;  // case index with minimal summed distance
  int id = 0;
};

// Clusters of one embedding; sorted by size descending, ties by first member.
std::vector<Cluster> cluster_cases(const std::vector<std::vector<double>>& embeddings, CaseField field,
                                   const ClusterParams& params = {});

// Embeds and clusters each field, concatenates the lists, drops clusters
// whose member set was already seen, sorts by size (stable) and numbers them.
std::vector<Cluster> cluster_all_fields(const std::vector<ErrorCase>& cases, const ClusterParams& params = {});

}  // namespace rulefuse::induction
