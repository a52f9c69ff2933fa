#include "lexinduce/kmeans.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "lexinduce/error.hpp"

namespace lexinduce {

void WordVectors::add(const std::string& word, std::vector<double> vec) {
  if (dim == 0) dim = static_cast<int>(vec.size());
  if (static_cast<int>(vec.size()) != dim) throw InputError("vector dimension mismatch for '" + word + "'");
  table[word] = std::move(vec);
}

WordVectors WordVectors::load_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read vectors file: " + path);
  WordVectors out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    std::vector<double> vec;
    double x;
    while (ss >> x) vec.push_back(x);
    if (lineno == 1 && vec.size() == 1) continue;  // "<count> <dim>" header
    if (vec.empty()) throw InputError(path + ":" + std::to_string(lineno) + ": vector has no components");
    try {
      out.add(word, std::move(vec));
    } catch (const InputError& e) {
      throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

int nearest(const std::vector<double>& p, const std::vector<std::vector<double>>& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    double d = sq_dist(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed,
                    int max_iter, double tol) {
  if (points.empty()) throw InputError("k-means on an empty point set");
  if (k < 1) throw ConfigError("k must be >= 1");
  const std::size_t n = points.size();
  std::mt19937_64 rng(seed);

  KMeansResult r;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  r.centroids.push_back(points[pick(rng)]);
  std::vector<double> d2(n);
  while (static_cast<int>(r.centroids.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = sq_dist(points[i], r.centroids[static_cast<std::size_t>(nearest(points[i], r.centroids))]);
      total += d2[i];
    }
    if (total <= 0.0) {
      // fewer distinct points than k; duplicate centroids are harmless
      r.centroids.push_back(points[pick(rng)]);
      continue;
    }
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    std::size_t chosen = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      u -= d2[i];
      if (u < 0.0) {
        chosen = i;
        break;
      }
    }
    r.centroids.push_back(points[chosen]);
  }

  const std::size_t dim = points.front().size();
  r.assignment.assign(n, 0);
  for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
    const auto& centroids = r.centroids;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
      r.assignment[static_cast<std::size_t>(i)] = nearest(points[static_cast<std::size_t>(i)], centroids);

    std::vector<std::vector<double>> sums(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = static_cast<std::size_t>(r.assignment[i]);
      ++counts[c];
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[i][d];
    }
    double moved = 0.0;
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] /= counts[c];
      moved = std::max(moved, std::sqrt(sq_dist(sums[c], r.centroids[c])));
      r.centroids[c] = std::move(sums[c]);
    }
    if (moved < tol) break;
  }
  r.iterations = std::min(r.iterations, max_iter);
  for (std::size_t i = 0; i < n; ++i) r.assignment[i] = nearest(points[i], r.centroids);
  return r;
}

std::vector<int> cluster_vocabulary(const Vocabulary& vocab, const WordVectors& vectors, int k,
                                    std::uint64_t seed) {
  if (vectors.table.empty()) throw InputError("empty word-vector table");
  const auto dim = static_cast<std::size_t>(vectors.dim);
  std::vector<double> mean(dim, 0.0);
  int present = 0;
  for (const auto& w : vocab.words()) {
    auto it = vectors.table.find(w);
    if (it == vectors.table.end()) continue;
    for (std::size_t d = 0; d < dim; ++d) mean[d] += it->second[d];
    ++present;
  }
  if (present == 0) {
    // no vocabulary overlap: fall back to the mean of the whole table
    for (const auto& [w, v] : vectors.table)
      for (std::size_t d = 0; d < dim; ++d) mean[d] += v[d];
    present = static_cast<int>(vectors.table.size());
  }
  for (double& x : mean) x /= present;

  std::vector<std::vector<double>> points;
  points.reserve(static_cast<std::size_t>(vocab.size()));
  for (const auto& w : vocab.words()) {
    auto it = vectors.table.find(w);
    points.push_back(it == vectors.table.end() ? mean : it->second);
  }
  return kmeans(points, k, seed).assignment;
}

LexGrammar init_emissions_from_clusters(const LexGrammar& grammar, const WordVectors& vectors,
                                        int k, double bonus, std::uint64_t seed) {
  const auto& s = grammar.shape();
  if (k != s.preterminals) throw ConfigError("k must equal the number of preterminals");
  if (vectors.table.empty()) throw InputError("empty word-vector table");
  LexGrammar out = grammar;
  if (bonus == 0.0) return out;
  auto assignment = cluster_vocabulary(grammar.vocab(), vectors, k, seed);
  auto& logits = out.mutable_logits();
  for (int w = 0; w < s.vocab; ++w) {
    Symbol t = s.nonterminals + assignment[static_cast<std::size_t>(w)];
    logits.emit[s.emit_index(t, w)] += bonus;
  }
  return out;
}

}  // namespace lexinduce
