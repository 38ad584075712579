#include "skillrt/runner/library_io.hpp"

#include "skillrt/errors.hpp"
#include "skillrt/io/json_io.hpp"

#include <algorithm>

namespace skillrt::io {

LibraryState load_library_dir(const std::filesystem::path& dir, std::size_t max_size) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ConfigError("skill library directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory() && fs::exists(entry.path() / "SKILL.md")) files.push_back(entry.path() / "SKILL.md");
    std::sort(files.begin(), files.end());
    std::vector<std::string> docs;
    for (const auto& f : files) docs.push_back(read_text(f));
    return load_library(docs, max_size);
}

void save_library_dir(const LibraryState& lib, const std::filesystem::path& dir) {
    for (const auto& [base, versions] : lib.entries()) {
        for (const auto& p : versions) {
            const auto vdir = dir / (base + "__v" + std::to_string(p->version));
            write_text(vdir / "SKILL.md", p->doc_text);
            write_json(vdir / "metadata.json", {{"skill_id", p->skill_id},
                                                {"base_id", p->base_id},
                                                {"version", p->version},
                                                {"priority", p->priority},
                                                {"error_category", p->error_category},
                                                {"has_rule", p->rule != nullptr},
                                                {"has_handler", p->has_handler()},
                                                {"needs_teacher", p->needs_teacher},
                                                {"prompt_equivalent", p->prompt_equivalent}});
        }
    }
    write_json(dir / "library_history.json", Json(lib.history()));
}

}  // namespace skillrt::io
