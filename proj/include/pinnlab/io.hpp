#pragma once

#include "pinnlab/field.hpp"
#include "pinnlab/mlp.hpp"
#include "pinnlab/reference.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace pinnlab {

// Checkpoint schema (JSON):
//   {"format": "pinnlab-mlp", "version": 1, "architecture": [..], "activation": "tanh",
//    "activate_output": false, "params": [..flat, see flatten()..]}
std::string checkpoint_to_json(const MlpParams& net);
MlpParams checkpoint_from_json(std::string_view text);
void save_checkpoint(const MlpParams& net, const std::filesystem::path& file);
MlpParams load_checkpoint(const std::filesystem::path& file);

// CSV with header "x,t,u", x varying fastest.
std::string field_to_csv(const SolutionField& field);
void save_field_csv(const SolutionField& field, const std::filesystem::path& file);

// Little-endian binary: magic, grid, metadata, values (column-major).
void save_field_binary(const SolutionField& field, const std::filesystem::path& file);
SolutionField load_field_binary(const std::filesystem::path& file);

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull);
std::string hex64(std::uint64_t v);

// Content hash of every parameter that affects the Burgers reference field.
std::string burgers_cache_key(const BurgersSettings& settings, const Grid& grid);

// Loads cache_dir/burgers-<key>.bin, or solves and stores it.
SolutionField cached_burgers_reference(const BurgersSettings& settings, const Grid& grid,
                                       const std::filesystem::path& cache_dir, bool* was_cached = nullptr);

void write_text(const std::filesystem::path& file, std::string_view text);
std::string read_text(const std::filesystem::path& file);

}  // namespace pinnlab
