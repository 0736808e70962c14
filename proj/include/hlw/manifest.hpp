#pragma once

// Manifest-driven experiment runner behind the CLI: every numerical value in
// the emitted CSV comes from a module operation, the runner only dispatches
// and serializes.

#include <cstdint>
#include <string>

#include <json.hpp>

namespace hlw {

inline constexpr const char* kToolVersion = "0.1.0";

struct Manifest {
  std::string experiment;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 1;
  int resolution = 128;
  std::string output = "hlw-out";
  bool deterministic = false;
  int jobs = 0;
};

// Exit statuses of run_manifest.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitUnknownExperiment = 64;
inline constexpr int kExitInvalidParams = 65;

Manifest manifest_from_json(const nlohmann::json& doc);

// Writes results.csv and meta.json under manifest.output.
int run_manifest(const Manifest& manifest);

bool is_known_experiment(const std::string& name);

}  // namespace hlw
