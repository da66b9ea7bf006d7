#pragma once

#include "fgw/io.hpp"

namespace fgw {

// Connection probability between the splitting block and its offshoot.
double split_probability(double x);

// Stochastic block model with floor(x) blocks; the largest block splits into
// an emerging block as x moves between integers. Labels are block indices
// stored as 1-D features (or one-hot over max_blocks when one_hot is set).
LabeledGraph sample_sbm_graph(double x, Rng& rng, bool one_hot = false,
                              int one_hot_dim = 7);

Dataset make_sbm_dataset(int N, std::uint64_t seed, bool one_hot = false);

}  // namespace fgw
