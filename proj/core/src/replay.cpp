#include "memrepair/replay.hpp"

#include <filesystem>
#include <optional>
#include <regex>

#include "memrepair/error.hpp"
#include "memrepair/subprocess.hpp"

namespace fs = std::filesystem;

namespace memrepair::replay {

const char* to_string(Tool t) { return t == Tool::Asan ? "asan" : "valgrind"; }

Tool tool_from_string(const std::string& s) {
    if (s == "asan") return Tool::Asan;
    if (s == "valgrind") return Tool::Valgrind;
    throw UsageError("unknown analysis tool: '" + s + "' (expected asan or valgrind)");
}

namespace {

struct RawFrame {
    std::string function;
    std::string file;
    int line = 0;
};

// "path/to/file.c:12" or "path:12:34" (asan appends a column).
bool split_file_line(const std::string& text, std::string& file, int& line) {
    static const std::regex re(R"(^(.+?):(\d+)(?::\d+)?$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) return false;
    file = m[1];
    line = std::stoi(m[2]);
    return line >= 1;
}

std::vector<RawFrame> asan_stack_after(const std::string& raw, size_t from) {
    static const std::regex frame_re(R"(#(\d+) 0x[0-9a-f]+ in (\S+) (.+?)\s*$)");
    std::vector<RawFrame> frames;
    size_t pos = from;
    bool in_stack = false;
    while (pos < raw.size()) {
        size_t eol = raw.find('\n', pos);
        if (eol == std::string::npos) eol = raw.size();
        std::string line = raw.substr(pos, eol - pos);
        std::smatch m;
        if (std::regex_search(line, m, frame_re)) {
            in_stack = true;
            RawFrame f;
            f.function = m[2];
            split_file_line(m[3], f.file, f.line);
            frames.push_back(std::move(f));
        } else if (in_stack) {
            break; // stack block ended
        }
        pos = eol + 1;
    }
    return frames;
}

std::vector<RawFrame> valgrind_stack_after(const std::string& raw, size_t from) {
    static const std::regex frame_re(R"((at|by) 0x[0-9A-Fa-f]+: (\S+) \(([^)]+)\))");
    std::vector<RawFrame> frames;
    size_t pos = from;
    bool in_stack = false;
    while (pos < raw.size()) {
        size_t eol = raw.find('\n', pos);
        if (eol == std::string::npos) eol = raw.size();
        std::string line = raw.substr(pos, eol - pos);
        std::smatch m;
        if (std::regex_search(line, m, frame_re)) {
            in_stack = true;
            RawFrame f;
            f.function = m[2];
            split_file_line(m[3], f.file, f.line); // "(in /usr/lib/...)" yields no file:line
            frames.push_back(std::move(f));
        } else if (in_stack) {
            break;
        }
        pos = eol + 1;
    }
    return frames;
}

/// Resolves the innermost frame whose file lies inside the workspace and
/// returns its location with a root-relative path.
std::optional<trace::SourceLocation> innermost_workspace_frame(const std::vector<RawFrame>& frames,
                                                               const std::string& workspace_root) {
    fs::path root = fs::weakly_canonical(workspace_root);
    for (const auto& f : frames) {
        if (f.file.empty() || f.line < 1) continue;
        fs::path p(f.file);
        if (p.is_relative()) p = root / p;
        p = fs::weakly_canonical(p);
        auto rel = fs::path(p).lexically_relative(root);
        if (rel.empty() || rel.native().starts_with("..")) continue;
        return trace::SourceLocation{rel.string(), f.line};
    }
    return std::nullopt;
}

struct PatternHit {
    size_t pos = std::string::npos;
    fta::ErrorKind kind = fta::ErrorKind::UAF;
    std::uint64_t address = 0;
};

std::optional<PatternHit> earliest_asan_error(const std::string& raw) {
    struct Probe {
        std::regex re;
        fta::ErrorKind kind;
        bool address_in_match;
    };
    static const std::vector<Probe> probes = {
        {std::regex(R"(AddressSanitizer: heap-use-after-free on address 0x([0-9a-f]+))"), fta::ErrorKind::UAF, true},
        {std::regex(R"(AddressSanitizer: attempting double-free on 0x([0-9a-f]+))"), fta::ErrorKind::DF, true},
        {std::regex(R"(AddressSanitizer: attempting free on address which was not malloc\(\)-ed: 0x([0-9a-f]+))"),
         fta::ErrorKind::DF, true},
        {std::regex(R"(LeakSanitizer: detected memory leaks)"), fta::ErrorKind::ML, false},
    };
    std::optional<PatternHit> best;
    for (const auto& probe : probes) {
        std::smatch m;
        if (!std::regex_search(raw, m, probe.re)) continue;
        PatternHit hit;
        hit.pos = static_cast<size_t>(m.position(0));
        hit.kind = probe.kind;
        if (probe.address_in_match) hit.address = trace::parse_hex(m[1]);
        if (!best || hit.pos < best->pos) best = hit;
    }
    if (best && best->kind == fta::ErrorKind::ML) {
        // LSAN_OPTIONS=report_objects=1 appends the leaked bases.
        static const std::regex obj_re(R"(Objects leaked above:\s*\n0x([0-9a-f]+))");
        std::smatch m;
        if (std::regex_search(raw, m, obj_re)) best->address = trace::parse_hex(m[1]);
    }
    return best;
}

std::optional<PatternHit> earliest_valgrind_error(const std::string& raw) {
    struct Probe {
        std::regex re;
        fta::ErrorKind kind;
    };
    static const std::vector<Probe> probes = {
        {std::regex(R"(Invalid (read|write) of size \d+)"), fta::ErrorKind::UAF},
        {std::regex(R"(Invalid free\(\))"), fta::ErrorKind::DF},
        {std::regex(R"([\d,]+ bytes in [\d,]+ blocks are definitely lost)"), fta::ErrorKind::ML},
    };
    std::optional<PatternHit> best;
    for (const auto& probe : probes) {
        std::smatch m;
        if (!std::regex_search(raw, m, probe.re)) continue;
        PatternHit hit;
        hit.pos = static_cast<size_t>(m.position(0));
        hit.kind = probe.kind;
        if (!best || hit.pos < best->pos) best = hit;
    }
    if (!best) return best;
    if (best->kind != fta::ErrorKind::ML) {
        // "Address 0x... is N bytes inside a block of size M free'd"
        static const std::regex addr_re(R"(Address 0x([0-9a-fA-F]+) is .*free'd)");
        std::smatch m;
        std::string tail = raw.substr(best->pos);
        if (std::regex_search(tail, m, addr_re)) best->address = trace::parse_hex(m[1]);
        if (best->kind == fta::ErrorKind::UAF && best->address == 0)
            return std::nullopt; // invalid access, but not of freed memory
    }
    return best;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

} // namespace

ErrorReport parse_sanitizer_report(const std::string& raw, Tool tool,
                                   const std::string& workspace_root) {
    if (raw.empty()) throw ReportParseError("empty analysis-tool output", raw);

    std::optional<PatternHit> hit =
        tool == Tool::Asan ? earliest_asan_error(raw) : earliest_valgrind_error(raw);
    if (!hit) throw ReportParseError("no recognized memory-error pattern in tool output", raw);

    std::vector<RawFrame> frames = tool == Tool::Asan ? asan_stack_after(raw, hit->pos)
                                                      : valgrind_stack_after(raw, hit->pos);
    auto location = innermost_workspace_frame(frames, workspace_root);
    if (!location)
        throw ReportParseError("no stack frame inside the workspace in tool output", raw);

    ErrorReport report;
    report.kind = hit->kind;
    report.location = *location;
    report.error_address = hit->address;
    report.raw_report = raw;
    return report;
}

BuildArtifact build_instrumented(const ProjectWorkspace& ws, Tool tool, int timeout_seconds) {
    if (ws.build_cmd.empty()) throw UsageError("workspace has no build_cmd");

    subprocess::RunSpec spec;
    spec.shell_command = ws.build_cmd;
    spec.cwd = ws.root;
    spec.timeout_seconds = timeout_seconds;
    spec.env = {{"MEMREPAIR_CC", "cc"}};
    if (tool == Tool::Asan)
        spec.env.emplace_back("MEMREPAIR_CFLAGS", "-fsanitize=address -g -O0 -fno-omit-frame-pointer");
    else
        spec.env.emplace_back("MEMREPAIR_CFLAGS", "-g -O0");

    subprocess::RunResult run = subprocess::run_process(spec);
    if (!run.ok())
        throw BuildError("build command failed in " + ws.root +
                             (run.timed_out ? " (timeout)" : " (exit " + std::to_string(run.exit_code) + ")"),
                         run.stderr_text);

    BuildArtifact artifact{ws, tool, ws.binary_path()};
    if (!fs::exists(artifact.binary_path))
        throw BuildError("build succeeded but binary is missing: " + artifact.binary_path, run.stderr_text);
    return artifact;
}

ErrorReport replay_error(const BuildArtifact& artifact, const PocInput& poc, int timeout_seconds) {
    subprocess::RunSpec spec;
    spec.cwd = artifact.workspace.root;
    spec.timeout_seconds = timeout_seconds;
    spec.disable_aslr = true;
    if (!poc.stdin_file.empty())
        spec.stdin_file = (fs::path(artifact.workspace.root) / poc.stdin_file).string();

    if (artifact.tool == Tool::Asan) {
        spec.env = {{"ASAN_OPTIONS", "detect_leaks=1:halt_on_error=1:abort_on_error=0:exitcode=23"},
                    {"LSAN_OPTIONS", "report_objects=1"}};
    }

    std::string program = artifact.binary_path;
    if (!artifact.workspace.run_cmd_template.empty()) {
        std::string cmd = artifact.workspace.run_cmd_template;
        if (artifact.tool == Tool::Valgrind)
            program = "valgrind --error-exitcode=97 --leak-check=full " + shell_quote(program);
        else
            program = shell_quote(program);
        std::string args;
        for (const auto& a : poc.argv) {
            if (!args.empty()) args += ' ';
            args += shell_quote(a);
        }
        if (auto at = cmd.find("{binary}"); at != std::string::npos) cmd.replace(at, 8, program);
        if (auto at = cmd.find("{args}"); at != std::string::npos) cmd.replace(at, 6, args);
        spec.shell_command = cmd;
    } else {
        if (artifact.tool == Tool::Valgrind)
            spec.argv = {"valgrind", "--error-exitcode=97", "--leak-check=full", program};
        else
            spec.argv = {program};
        spec.argv.insert(spec.argv.end(), poc.argv.begin(), poc.argv.end());
    }

    subprocess::RunResult run = subprocess::run_process(spec);
    if (run.timed_out)
        throw ReplayTimeout("PoC run exceeded " + std::to_string(timeout_seconds) + " s");

    const std::string raw = run.stderr_text.empty() ? run.stdout_text : run.stderr_text;
    try {
        return parse_sanitizer_report(raw, artifact.tool, artifact.workspace.root);
    } catch (const ReportParseError&) {
        if (run.exit_code == 0)
            throw NoErrorDetected("PoC ran cleanly under " + std::string(to_string(artifact.tool)));
        throw;
    }
}

} // namespace memrepair::replay
