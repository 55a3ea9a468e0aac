#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "amodal/pipeline.hpp"

namespace amodal::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct SynthOptions {
  SynthConfig config;  // config.seed is the base seed
  int count = 10;
  int jobs = 1;
  std::filesystem::path out;
};

struct DecomposeOptions {
  std::filesystem::path input;  // dataset directory or a single PNG
  ComponentSpec components;
  EngineConfig engine;
  bool dump_steps = false;
  int jobs = 1;
  std::filesystem::path out;
};

struct EvalOptions {
  std::filesystem::path gt;                   // dataset directory
  std::optional<std::filesystem::path> pred;  // decompose output directory
  bool baselines = false;
  long overlap_threshold = 1;
  int jobs = 1;
  std::filesystem::path out;
};

struct RecomposeOptions {
  std::optional<std::filesystem::path> trace;
  std::optional<std::filesystem::path> dataset;
  int scene_id = 0;
  std::filesystem::path edits;  // JSON list of edits
  std::filesystem::path out;    // PNG
};

// Seed of scene `index` given the base seed.
std::uint64_t scene_seed(std::uint64_t base, int index);

// Each writes its outputs plus a run manifest and returns the manifest.
// `argv` is recorded verbatim.
nlohmann::json cmd_synth(const SynthOptions& o, const std::vector<std::string>& argv);
nlohmann::json cmd_decompose(const DecomposeOptions& o, const std::vector<std::string>& argv);
nlohmann::json cmd_eval(const EvalOptions& o, const std::vector<std::string>& argv,
                        std::ostream& table);
nlohmann::json cmd_recompose(const RecomposeOptions& o,
                             const std::vector<std::string>& argv,
                             std::ostream& log);

}  // namespace amodal::cli
