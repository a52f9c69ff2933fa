#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexinduce/grammar.hpp"

namespace lexinduce {

struct WordVectors {
  int dim = 0;
  std::unordered_map<std::string, std::vector<double>> table;

  // word2vec/FastText text format; an optional "<count> <dim>" header line is skipped.
  static WordVectors load_text(const std::string& path);
  void add(const std::string& word, std::vector<double> vec);
};

struct KMeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<int> assignment;
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Stops after max_iter rounds or
// once no centroid moves more than `tol`.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed,
                    int max_iter = 50, double tol = 1e-6);

// Cluster id per vocabulary entry. Words lacking a vector get the mean of the
// vectors that are present.
std::vector<int> cluster_vocabulary(const Vocabulary& vocab, const WordVectors& vectors, int k,
                                    std::uint64_t seed);

// emit_logits[T_c][w] += bonus for every word w in cluster c.
LexGrammar init_emissions_from_clusters(const LexGrammar& grammar, const WordVectors& vectors,
                                        int k, double bonus, std::uint64_t seed);

}  // namespace lexinduce
