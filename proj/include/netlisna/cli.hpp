#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netlisna/autocorr.hpp"
#include "netlisna/intensity.hpp"
#include "netlisna/weights.hpp"

namespace netlisna {

enum class SimModel : std::uint8_t { homogeneous, inhomogeneous, doubly_stochastic };

struct RunConfig {
  std::string command;
  std::vector<std::string> invocation;  // arguments after the program name

  std::filesystem::path nodes;
  std::filesystem::path edges;
  std::filesystem::path events;
  std::filesystem::path rates;  // inhomogeneous simulation: `edge,rate`
  std::optional<std::filesystem::path> out_dir;

  double max_snap_distance = 0.0;  // 0 disables the cutoff
  std::optional<Replicate> replicate;
  std::string level = "cg_node";
  std::vector<std::string> paths;

  std::vector<std::string> pair_a;
  std::vector<std::string> pair_b;
  int max_lag = 0;  // second-order: lag estimator for k = 1..max_lag; correlogram default 8

  std::vector<std::string> stats;
  int order = 1;
  AdjacencyFlavor flavor = AdjacencyFlavor::partial;
  Traversal mode = Traversal::undirected;
  Standardization standardization = Standardization::binary;
  InferenceMethod method = InferenceMethod::permutation;
  LocalGearyForm geary_form = LocalGearyForm::weighted;
  std::size_t permutations = 999;
  std::optional<std::uint64_t> seed;
  bool geojson = false;
  bool export_weights = false;

  SimModel model = SimModel::homogeneous;
  double rate = 1.0;
  double log_sd = 0.5;
  std::size_t replicates = 1;
};

/// Resolves the output directory: `--out`, else $NETLISNA_OUT, else ".".
std::filesystem::path output_dir(const RunConfig& config);

/// Executes one command. Writes `<command>_<table>.csv` files plus
/// `<command>_manifest.json` and returns 0; on error prints one diagnostic
/// line to `err` and returns nonzero.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line arguments (argv[0] is the program name) and runs.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace netlisna
