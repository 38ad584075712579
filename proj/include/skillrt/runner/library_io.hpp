#pragma once

#include "skillrt/skill_store/library.hpp"

#include <filesystem>

namespace skillrt::io {

// Loads every `<dir>/*/SKILL.md`. Throws ConfigError when the directory is missing.
LibraryState load_library_dir(const std::filesystem::path& dir, std::size_t max_size = kDefaultLibrarySize);

// Writes `<base>__v<N>/SKILL.md` and metadata.json per stored version, plus
// library_history.json with the admission log.
void save_library_dir(const LibraryState& lib, const std::filesystem::path& dir);

}  // namespace skillrt::io
