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

#include "rulefuse/induction/embed.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "rulefuse/core/error.hpp"
#include "rulefuse/core/text.hpp"

namespace rulefuse::induction {

namespace {

bool word_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

// Lower-cased runs of word characters of length >= 2, like the usual
// "\b\w\w+\b" token pattern.
std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!word_byte(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && word_byte(static_cast<unsigned char>(s[j]))) ++j;
    if (j - i >= 2) out.push_back(text::to_lower(s.substr(i, j - i)));
    i = j;
  }
  return out;
}

std::vector<std::string> word_ngrams(std::string_view s) {
  const std::vector<std::string> tokens = word_tokens(s);
  std::vector<std::string> grams = tokens;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) grams.push_back(tokens[i] + " " + tokens[i + 1]);
  return grams;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool space = false;
  for (const char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

void l2_normalize(std::vector<double>& v, std::size_t begin, std::size_t end) {
  double norm = 0.0;
  for (std::size_t i = begin; i < end; ++i) norm += v[i] * v[i];
  if (norm <= 0.0) return;
  norm = std::sqrt(norm);
  for (std::size_t i = begin; i < end; ++i) v[i] /= norm;
}

}  // namespace

std::vector<std::vector<double>> text_features(const std::vector<std::string>& texts, const EmbedOptions& options) {
  const std::size_t n = texts.size();
  std::vector<std::map<std::string, double>> counts(n);
  std::map<std::string, std::size_t> df;
  for (std::size_t d = 0; d < n; ++d) {
    for (auto& g : word_ngrams(texts[d])) counts[d][g] += 1.0;
    for (const auto& [g, _] : counts[d]) ++df[g];
  }
  std::map<std::string, std::size_t> column;
  for (const auto& [g, _] : df) column.emplace(g, column.size());
  const std::size_t vocab = column.size();
  const std::size_t width = vocab + options.hashed_features;

  std::vector<std::vector<double>> rows(n, std::vector<double>(width, 0.0));
  for (std::size_t d = 0; d < n; ++d) {
    auto& row = rows[d];
    for (const auto& [g, tf] : counts[d]) {
      const double idf = std::log((1.0 + static_cast<double>(n)) / (1.0 + static_cast<double>(df[g]))) + 1.0;
      row[column[g]] = tf * idf;
    }
    l2_normalize(row, 0, vocab);
    if (options.hashed_features > 0) {
      const std::string s = collapse_whitespace(texts[d]);
      for (std::size_t len = 3; len <= 5; ++len) {
        for (std::size_t i = 0; i + len <= s.size(); ++i) {
          const std::uint64_t h = text::fnv1a64(std::string_view(s).substr(i, len));
          row[vocab + static_cast<std::size_t>(h % options.hashed_features)] += 1.0;
        }
      }
      l2_normalize(row, vocab, width);
    }
  }
  return rows;
}

TruncatedSvd truncated_svd(const std::vector<std::vector<double>>& x, std::size_t dims) {
  const std::size_t n = x.size();
  const std::size_t d = n ? x.front().size() : 0;
  TruncatedSvd out;
  out.coordinates.assign(n, std::vector<double>(dims, 0.0));
  out.components.assign(dims, std::vector<double>(d, 0.0));
  out.singular_values.assign(dims, 0.0);
  if (n == 0 || d == 0) return out;

  Eigen::MatrixXd m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i].size() != d) throw ValidationError("truncated_svd: ragged input");
    for (std::size_t j = 0; j < d; ++j) m(i, j) = x[i][j];
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double top = s.size() ? s(0) : 0.0;
  const double tol = std::max(top * 1e-10 * static_cast<double>(std::max(n, d)), 1e-300);
  const std::size_t keep = std::min<std::size_t>(dims, static_cast<std::size_t>(s.size()));
  for (std::size_t c = 0; c < keep; ++c) {
    if (!(s(static_cast<Eigen::Index>(c)) > tol)) break;
    ++out.rank;
    Eigen::VectorXd u = svd.matrixU().col(static_cast<Eigen::Index>(c));
    Eigen::VectorXd v = svd.matrixV().col(static_cast<Eigen::Index>(c));
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0) {
      u = -u;
      v = -v;
    }
    const double sv = s(static_cast<Eigen::Index>(c));
    out.singular_values[c] = sv;
    for (std::size_t i = 0; i < n; ++i) out.coordinates[i][c] = u(static_cast<Eigen::Index>(i)) * sv;
    for (std::size_t j = 0; j < d; ++j) out.components[c][j] = v(static_cast<Eigen::Index>(j));
  }
  return out;
}

CaseEmbeddings embed_texts(const std::vector<std::string>& texts, const EmbedOptions& options) {
  CaseEmbeddings out;
  const std::size_t n = texts.size();
  const bool identical = std::all_of(texts.begin(), texts.end(), [&](const std::string& t) { return t == texts[0]; });
  if (n == 0 || identical) {
    out.degenerate = true;
    out.vectors.assign(n, std::vector<double>(options.final_dims, 0.0));
    return out;
  }
  const TruncatedSvd first = truncated_svd(text_features(texts, options), options.first_dims);
  const TruncatedSvd second = truncated_svd(first.coordinates, options.final_dims);
  out.vectors = second.coordinates;
  out.degenerate = second.rank == 0;
  // Equal texts get bit-identical vectors (the SVD may differ in the last ulp).
  std::map<std::string_view, std::size_t> first_seen;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [it, inserted] = first_seen.emplace(texts[i], i);
    if (!inserted) out.vectors[i] = out.vectors[it->second];
  }
  return out;
}

CaseEmbeddings embed_cases(const std::vector<ErrorCase>& cases, CaseField field, const EmbedOptions& options) {
  if (cases.size() < 2) throw ValidationError("embed_cases needs at least 2 cases");
  std::vector<std::string> texts;
  texts.reserve(cases.size());
  for (const auto& c : cases) texts.push_back(c.field(field));
  CaseEmbeddings out = embed_texts(texts, options);
  out.field = field;
  return out;
}

}  // namespace rulefuse::induction
