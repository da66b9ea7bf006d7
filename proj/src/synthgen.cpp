#include "fgw/synthgen.hpp"

#include <cmath>

namespace fgw {

namespace {

void check_x(double x) {
  if (!(x >= 1.0 && x <= 6.0))
    fail(ErrorKind::OutOfRange, "x must lie in [1,6]");
}

constexpr double kIntraProb = 0.9;
constexpr double kInterProb = 0.01;

}  // namespace

double split_probability(double x) {
  check_x(x);
  double frac = x - std::floor(x);
  return 0.889 * frac + 0.01;
}

LabeledGraph sample_sbm_graph(double x, Rng& rng, bool one_hot,
                              int one_hot_dim) {
  check_x(x);
  int base_blocks = static_cast<int>(std::floor(x));
  double frac = x - std::floor(x);
  bool emerging = frac > 0.0;

  std::uniform_int_distribution<int> size_dist(40, 45);
  int n = size_dist(rng);

  // Even split, remainder to the lowest-index blocks; block 0 is largest.
  std::vector<int> block(n);
  std::vector<int> block_size(base_blocks, n / base_blocks);
  for (int b = 0; b < n % base_blocks; ++b) ++block_size[b];
  {
    int node = 0;
    for (int b = 0; b < base_blocks; ++b)
      for (int k = 0; k < block_size[b]; ++k) block[node++] = b;
  }

  // Emerging block: the last floor(size/2) nodes of the largest block,
  // deterministically by node index.
  int split_block = 0;
  int emerging_block = base_blocks;
  if (emerging) {
    int carved = block_size[split_block] / 2;
    int start = block_size[split_block] - carved;
    for (int k = start; k < block_size[split_block]; ++k)
      block[k] = emerging_block;
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double p_split = split_probability(x);
  Matrix C = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double p;
      if (block[i] == block[j]) {
        p = kIntraProb;
      } else if ((block[i] == split_block && block[j] == emerging_block) ||
                 (block[i] == emerging_block && block[j] == split_block)) {
        p = p_split;
      } else {
        p = kInterProb;
      }
      if (unif(rng) < p) C(i, j) = C(j, i) = 1.0;
    }

  // Labels: block index; emerging members take the new label w.p. frac,
  // else the splitting block's label.
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    if (block[i] == emerging_block)
      labels[i] = unif(rng) < frac ? emerging_block : split_block;
    else
      labels[i] = block[i];
  }

  Matrix F;
  if (one_hot) {
    F = one_hot_features(labels, one_hot_dim);
  } else {
    F = Matrix(n, 1);
    for (int i = 0; i < n; ++i) F(i, 0) = static_cast<double>(labels[i]);
  }
  return LabeledGraph{C, F};
}

Dataset make_sbm_dataset(int N, std::uint64_t seed, bool one_hot) {
  if (N < 1) fail(ErrorKind::OutOfRange, "N must be >= 1");
  Dataset ds;
  Rng master(seed);
  std::uniform_real_distribution<double> xdist(1.0, 6.0);
  for (int i = 0; i < N; ++i) {
    double x = xdist(master);
    Rng sample_rng(master());  // per-sample derived seed
    Vector xv(1);
    xv(0) = x;
    ds.inputs.push_back(xv);
    ds.graphs.push_back(sample_sbm_graph(x, sample_rng, one_hot));
  }
  return ds;
}

}  // namespace fgw
