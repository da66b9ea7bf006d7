#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fgw/graph.hpp"

namespace fgw {

// Graph document (.fgwg): JSON object with version, n, d, C and F row-major.
std::string serialize_graph(const RelaxedGraph& g);
RelaxedGraph deserialize_graph(const std::string& text);

void save_graph(const RelaxedGraph& g, const std::filesystem::path& path);
RelaxedGraph load_graph(const std::filesystem::path& path);

struct Dataset {
  std::vector<Vector> inputs;
  std::vector<LabeledGraph> graphs;

  int size() const { return static_cast<int>(inputs.size()); }
};

// Manifest: one line per sample, "input<TAB>graph_path". The input column is
// either a comma-separated numeric vector or a path to a text file of numbers.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& manifest);

// Candidate manifest: "input_id<TAB>graph_path", several rows per id.
std::vector<std::vector<RelaxedGraph>> load_candidate_sets(
    const std::filesystem::path& manifest, int num_inputs);

}  // namespace fgw
