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

// Text embeddings for clustering error cases.
//
// Each text becomes a tf-idf vector over lower-cased word unigrams and
// bigrams, concatenated with hashed character 3- to 5-gram counts (both
// L2-normalised). The stacked matrix is reduced with an exact truncated SVD
// to 50 dimensions and then to 5.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rulefuse/induction/cases.hpp"

namespace rulefuse::induction {

struct EmbedOptions {
  std::size_t hashed_features = 4096;
  std::size_t first_dims = 50;
  std::size_t final_dims = 5;
};

struct TruncatedSvd {
  // n x dims; columns past the matrix rank are zero.
  std::vector<std::vector<double>> coordinates;
  // dims unit vectors in feature space (zero vectors past the rank).
  std::vector<std::vector<double>> components;
  std::vector<double> singular_values;
  std::size_t rank = 0;
};

// Exact truncated SVD of the rows of `x` (no centring). Signs are fixed so
// that each coordinate column's largest-magnitude entry is positive.
TruncatedSvd truncated_svd(const std::vector<std::vector<double>>& x, std::size_t dims);

// Sparse-free feature matrix (tf-idf words | hashed char n-grams).
std::vector<std::vector<double>> text_features(const std::vector<std::string>& texts, const EmbedOptions& options = {});

struct CaseEmbeddings {
  CaseField field = CaseField::kQuestion;
  std::vector<std::vector<double>> vectors;
  // Set when the corpus has no variance (e.g. every text identical); all
  // vectors are then zero.
  bool degenerate = false;
};

CaseEmbeddings embed_texts(const std::vector<std::string>& texts, const EmbedOptions& options = {});
// Throws ValidationError with fewer than 2 cases.
CaseEmbeddings embed_cases(const std::vector<ErrorCase>& cases, CaseField field, const EmbedOptions& options = {});

}  // namespace rulefuse::induction
