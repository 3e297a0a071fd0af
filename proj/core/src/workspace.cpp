#include "memrepair/workspace.hpp"

#include <filesystem>
#include <fstream>

#include "memrepair/error.hpp"

namespace fs = std::filesystem;

namespace memrepair::replay {

std::string ProjectWorkspace::binary_path() const {
    return (fs::path(root) / binary).string();
}

ProjectWorkspace load_workspace(const std::string& root) {
    fs::path root_path(root);
    if (!fs::is_directory(root_path))
        throw UsageError("workspace root is not a directory: " + root);
    fs::path manifest_path = root_path / "memrepair.json";
    std::ifstream in(manifest_path);
    if (!in) throw UsageError("workspace manifest not found: " + manifest_path.string());

    nlohmann::json m;
    try {
        in >> m;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("invalid manifest " + manifest_path.string() + ": " + e.what());
    }

    ProjectWorkspace ws;
    ws.root = fs::weakly_canonical(root_path).string();
    try {
        ws.build_cmd = m.at("build_cmd").get<std::string>();
        ws.binary = m.at("binary").get<std::string>();
        ws.run_cmd_template = m.value("run_cmd_template", "");
        ws.test_cmd = m.value("test_cmd", "");
        ws.alloc_wrappers = m.value("alloc_wrappers", std::vector<std::string>{});
        ws.free_wrappers = m.value("free_wrappers", std::vector<std::string>{});
        if (m.contains("poc")) ws.default_poc = m["poc"].get<PocInput>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("invalid manifest " + manifest_path.string() + ": " + e.what());
    }

    for (const auto& f : ws.default_poc.input_files) {
        if (!fs::exists(root_path / f))
            throw UsageError("PoC input file missing from workspace: " + f);
    }
    if (!ws.default_poc.stdin_file.empty() && !fs::exists(root_path / ws.default_poc.stdin_file))
        throw UsageError("PoC stdin file missing from workspace: " + ws.default_poc.stdin_file);
    return ws;
}

void to_json(nlohmann::json& j, const PocInput& v) {
    j = {{"argv", v.argv}, {"input_files", v.input_files}};
    if (!v.stdin_file.empty()) j["stdin_file"] = v.stdin_file;
}

void from_json(const nlohmann::json& j, PocInput& v) {
    v.argv = j.value("argv", std::vector<std::string>{});
    v.stdin_file = j.value("stdin_file", "");
    v.input_files = j.value("input_files", std::vector<std::string>{});
}

} // namespace memrepair::replay
