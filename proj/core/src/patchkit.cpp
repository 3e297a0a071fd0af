#include "memrepair/patchkit.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "memrepair/error.hpp"
#include "memrepair/subprocess.hpp"

namespace fs = std::filesystem;

namespace memrepair::patchkit {

namespace {

std::string strip_diff_prefix(std::string path) {
    if (path.starts_with("a/") || path.starts_with("b/")) path = path.substr(2);
    return path;
}

void check_target_path(const std::string& path) {
    if (path.empty()) throw MalformedDiff("diff hunk with empty target path");
    fs::path p(path);
    if (p.is_absolute())
        throw PathEscapesWorkspace("diff targets an absolute path: " + path);
    fs::path normal = p.lexically_normal();
    if (normal.empty() || normal.native() == ".." || normal.native().starts_with("../"))
        throw PathEscapesWorkspace("diff target escapes the workspace: " + path);
}

// "@@ -l[,c] +l[,c] @@"
bool parse_hunk_header(const std::string& line, Hunk& hunk) {
    if (!line.starts_with("@@ -")) return false;
    const char* s = line.c_str() + 4;
    char* end = nullptr;
    hunk.old_start = std::strtol(s, &end, 10);
    if (end == s) return false;
    hunk.old_lines = 1;
    if (*end == ',') {
        s = end + 1;
        hunk.old_lines = std::strtol(s, &end, 10);
    }
    while (*end == ' ') ++end;
    if (*end != '+') return false;
    s = end + 1;
    hunk.new_start = std::strtol(s, &end, 10);
    if (end == s) return false;
    hunk.new_lines = 1;
    if (*end == ',') {
        s = end + 1;
        hunk.new_lines = std::strtol(s, &end, 10);
    }
    while (*end == ' ') ++end;
    return std::string_view(end).starts_with("@@");
}

std::vector<std::string> split_lines(const std::string& text, bool& trailing_newline) {
    std::vector<std::string> lines;
    trailing_newline = text.empty() || text.back() == '\n';
    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, eol - pos));
        pos = eol + 1;
    }
    return lines;
}

std::string strip_ws(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

// Matches the hunk's old side (context + removals) against the file at
// 0-based position pos; ws_insensitive relaxes the comparison.
bool old_side_matches(const std::vector<std::string>& file_lines, long pos, const Hunk& hunk,
                      bool ws_insensitive) {
    long i = pos;
    for (const auto& hl : hunk.lines) {
        if (hl.tag == '+') continue;
        if (i >= static_cast<long>(file_lines.size())) return false;
        const std::string& have = file_lines[static_cast<size_t>(i)];
        if (ws_insensitive ? strip_ws(have) != strip_ws(hl.text) : have != hl.text) return false;
        ++i;
    }
    return true;
}

long locate_hunk(const std::vector<std::string>& file_lines, const Hunk& hunk, long expected_pos) {
    for (bool ws_insensitive : {false, true}) {
        for (long delta : {0L, -1L, 1L, -2L, 2L, -3L, 3L}) {
            long pos = expected_pos + delta;
            if (pos < 0 || pos > static_cast<long>(file_lines.size())) continue;
            if (old_side_matches(file_lines, pos, hunk, ws_insensitive)) return pos;
        }
    }
    return -1;
}

std::string unique_copy_root(const std::string& hint) {
    fs::path base = hint.empty() ? fs::temp_directory_path() : fs::path(hint);
    std::mt19937_64 rng(std::random_device{}());
    for (int attempt = 0; attempt < 64; ++attempt) {
        fs::path candidate = base / ("memrepair-ws-" + std::to_string(rng()));
        std::error_code ec;
        if (fs::create_directories(candidate, ec) && !ec) return candidate.string();
    }
    throw Error("cannot create a workspace copy directory under " + base.string(), ExitCode::Internal);
}

} // namespace

Patch parse_unified_diff(const std::string& diff_text) {
    Patch patch;
    bool ignored_trailing_newline = false;
    std::vector<std::string> lines = split_lines(diff_text, ignored_trailing_newline);

    std::string current_file;
    size_t i = 0;
    auto diag = [&](size_t line_no, const std::string& what) {
        return MalformedDiff("diff line " + std::to_string(line_no + 1) + ": " + what);
    };

    while (i < lines.size()) {
        const std::string& line = lines[i];
        if (line.starts_with("--- ")) {
            if (i + 1 >= lines.size() || !lines[i + 1].starts_with("+++ "))
                throw diag(i, "'---' header without matching '+++'");
            std::string target = lines[i + 1].substr(4);
            if (auto tab = target.find('\t'); tab != std::string::npos) target.resize(tab);
            if (target == "/dev/null") {
                std::string old_side = lines[i].substr(4);
                if (auto tab = old_side.find('\t'); tab != std::string::npos) old_side.resize(tab);
                target = old_side; // deletion: keep the old path as target
            }
            current_file = strip_diff_prefix(target);
            check_target_path(current_file);
            i += 2;
            continue;
        }
        if (line.starts_with("@@")) {
            Hunk hunk;
            if (!parse_hunk_header(line, hunk)) throw diag(i, "malformed hunk header '" + line + "'");
            if (current_file.empty()) throw diag(i, "hunk before any file header");
            hunk.file = current_file;
            ++i;
            long old_seen = 0;
            long new_seen = 0;
            while (i < lines.size() && (old_seen < hunk.old_lines || new_seen < hunk.new_lines)) {
                const std::string& body = lines[i];
                if (body.starts_with("\\ No newline")) {
                    ++i;
                    continue;
                }
                char tag = body.empty() ? ' ' : body[0];
                if (tag != ' ' && tag != '-' && tag != '+')
                    throw diag(i, "unexpected line inside hunk: '" + body + "'");
                HunkLine hl{tag, body.empty() ? "" : body.substr(1)};
                if (tag != '+') ++old_seen;
                if (tag != '-') ++new_seen;
                if (old_seen > hunk.old_lines || new_seen > hunk.new_lines)
                    throw diag(i, "hunk body exceeds header counts");
                hunk.lines.push_back(std::move(hl));
                ++i;
            }
            if (old_seen != hunk.old_lines || new_seen != hunk.new_lines)
                throw diag(i - 1, "hunk body shorter than header counts (" + std::to_string(old_seen) +
                                      "/" + std::to_string(hunk.old_lines) + " old, " +
                                      std::to_string(new_seen) + "/" + std::to_string(hunk.new_lines) +
                                      " new)");
            patch.hunks.push_back(std::move(hunk));
            continue;
        }
        ++i; // "diff --git", "index", prose between blocks
    }
    if (patch.hunks.empty()) throw MalformedDiff("no hunks in diff text");
    return patch;
}

Patch parse_patch(const llmgw::PatchProposal& proposal) {
    if (proposal.diff_blocks.empty()) throw MalformedDiff("proposal carries no diff block");
    Patch merged;
    for (const auto& block : proposal.diff_blocks) {
        Patch p = parse_unified_diff(block);
        merged.hunks.insert(merged.hunks.end(), p.hunks.begin(), p.hunks.end());
    }
    return merged;
}

Patch reverse(const Patch& p) {
    Patch out;
    out.hunks.reserve(p.hunks.size());
    for (const auto& h : p.hunks) {
        Hunk r;
        r.file = h.file;
        r.old_start = h.new_start;
        r.old_lines = h.new_lines;
        r.new_start = h.old_start;
        r.new_lines = h.old_lines;
        r.lines.reserve(h.lines.size());
        for (const auto& hl : h.lines) {
            char tag = hl.tag == '+' ? '-' : hl.tag == '-' ? '+' : ' ';
            r.lines.push_back({tag, hl.text});
        }
        out.hunks.push_back(std::move(r));
    }
    return out;
}

PatchedWorkspace apply_patch(const replay::ProjectWorkspace& ws, const Patch& p,
                             const std::string& dest_root) {
    std::string copy_root = unique_copy_root(dest_root);
    fs::copy(ws.root, copy_root,
             fs::copy_options::recursive | fs::copy_options::copy_symlinks);

    // Hunks apply per file in order with a running offset.
    std::map<std::string, std::vector<const Hunk*>> by_file;
    for (const auto& h : p.hunks) by_file[h.file].push_back(&h);

    size_t hunk_no = 0;
    for (const auto& [file, hunks] : by_file) {
        fs::path path = fs::path(copy_root) / file;
        if (!fs::exists(path)) {
            bool creates_file = hunks.front()->old_lines == 0 && hunks.front()->old_start <= 1;
            if (!creates_file)
                throw ContextMismatch("patch target does not exist in workspace: " + file);
            fs::create_directories(path.parent_path());
            std::ofstream(path).flush();
        }
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        bool trailing_newline = true;
        std::vector<std::string> file_lines = split_lines(buf.str(), trailing_newline);
        in.close();

        long offset = 0;
        for (const Hunk* hunk : hunks) {
            ++hunk_no;
            // An old_lines==0 hunk inserts after line old_start.
            long expected = hunk->old_lines == 0 ? hunk->old_start : hunk->old_start - 1;
            long pos = locate_hunk(file_lines, *hunk, expected + offset);
            if (pos < 0)
                throw ContextMismatch("hunk #" + std::to_string(hunk_no) + " for " + file +
                                      " does not match the file near line " +
                                      std::to_string(expected + offset + 1));
            std::vector<std::string> replacement;
            for (const auto& hl : hunk->lines)
                if (hl.tag != '-') replacement.push_back(hl.text);
            file_lines.erase(file_lines.begin() + pos,
                             file_lines.begin() + pos + hunk->old_lines);
            file_lines.insert(file_lines.begin() + pos, replacement.begin(), replacement.end());
            offset += hunk->new_lines - hunk->old_lines;
        }

        std::ofstream out(path, std::ios::trunc);
        for (size_t k = 0; k < file_lines.size(); ++k) {
            out << file_lines[k];
            if (k + 1 < file_lines.size() || trailing_newline) out << '\n';
        }
    }

    PatchedWorkspace out;
    out.workspace = ws;
    out.workspace.root = copy_root;
    out.original_root = ws.root;
    return out;
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::CorrectCandidate: return "Correct-candidate";
    case Verdict::FailsPoC: return "FailsPoC";
    case Verdict::BreaksTests: return "BreaksTests";
    case Verdict::IntroducesError: return "IntroducesError";
    }
    return "?";
}

Verdict derive_verdict(bool poc_clean, bool tests_pass, bool has_new_error) {
    if (has_new_error) return Verdict::IntroducesError;
    if (!poc_clean) return Verdict::FailsPoC;
    if (!tests_pass) return Verdict::BreaksTests;
    return Verdict::CorrectCandidate;
}

ValidationResult validate(const PatchedWorkspace& ws2, const PocInput& poc,
                          const replay::ErrorReport& original, replay::Tool tool,
                          const ValidateOptions& options) {
    ValidationResult result;
    result.poc_only = ws2.workspace.test_cmd.empty();

    replay::BuildArtifact artifact;
    try {
        artifact = replay::build_instrumented(ws2.workspace, tool, options.build_timeout_seconds);
    } catch (const BuildError& e) {
        result.poc_clean = false;
        result.tests_pass = false;
        result.detail = std::string("patched tree does not build: ") + e.what() + "\n" + e.captured_stderr;
        result.verdict = derive_verdict(false, false, false);
        return result;
    }

    try {
        replay::ErrorReport report = replay::replay_error(artifact, poc, options.replay_timeout_seconds);
        if (report.kind == original.kind) {
            result.poc_clean = false;
            result.detail = "the " + std::string(fta::to_string(original.kind)) +
                            " error persists at " + report.location.str();
        } else {
            result.poc_clean = true;
            result.new_error = report;
            result.detail = "patch introduces a " + std::string(fta::to_string(report.kind)) +
                            " error at " + report.location.str();
        }
    } catch (const NoErrorDetected&) {
        result.poc_clean = true;
    } catch (const Error& e) {
        result.poc_clean = false;
        result.detail = std::string("PoC rerun failed: ") + e.what();
    }

    if (result.poc_only) {
        result.tests_pass = true; // vacuously; flagged via poc_only
    } else {
        subprocess::RunSpec spec;
        spec.shell_command = ws2.workspace.test_cmd;
        spec.cwd = ws2.workspace.root;
        spec.timeout_seconds = options.test_timeout_seconds;
        subprocess::RunResult run = subprocess::run_process(spec);
        result.tests_pass = run.ok();
        if (!result.tests_pass && result.detail.empty())
            result.detail = "test command failed (exit " + std::to_string(run.exit_code) + ")";
    }

    result.verdict = derive_verdict(result.poc_clean, result.tests_pass, result.new_error.has_value());
    return result;
}

GroundTruthMatch compare_to_ground_truth(const Patch& candidate, const std::string& ground_truth_diff) {
    if (ground_truth_diff.empty()) return GroundTruthMatch::NotProvided;
    if (render_patch(candidate) == ground_truth_diff) return GroundTruthMatch::ByteEqual;
    try {
        Patch truth = parse_unified_diff(ground_truth_diff);
        auto key = [](const Patch& p) {
            std::vector<Hunk> hunks = p.hunks;
            std::sort(hunks.begin(), hunks.end(), [](const Hunk& a, const Hunk& b) {
                return std::tie(a.file, a.old_start, a.new_start) < std::tie(b.file, b.old_start, b.new_start);
            });
            return hunks;
        };
        if (key(candidate) == key(truth)) return GroundTruthMatch::HunkEqual;
    } catch (const Error&) {
    }
    return GroundTruthMatch::Differs;
}

const char* to_string(GroundTruthMatch m) {
    switch (m) {
    case GroundTruthMatch::ByteEqual: return "byte-equal";
    case GroundTruthMatch::HunkEqual: return "hunk-equal";
    case GroundTruthMatch::Differs: return "differs";
    case GroundTruthMatch::NotProvided: return "not-provided";
    }
    return "?";
}

std::string render_patch(const Patch& p) {
    std::ostringstream out;
    std::string last_file;
    for (const auto& h : p.hunks) {
        if (h.file != last_file) {
            out << "--- a/" << h.file << "\n+++ b/" << h.file << "\n";
            last_file = h.file;
        }
        out << "@@ -" << h.old_start << "," << h.old_lines << " +" << h.new_start << ","
            << h.new_lines << " @@\n";
        for (const auto& hl : h.lines) out << hl.tag << hl.text << "\n";
    }
    return out.str();
}

void to_json(nlohmann::json& j, const ValidationResult& v) {
    j = {{"poc_clean", v.poc_clean},
         {"tests_pass", v.tests_pass},
         {"verdict", to_string(v.verdict)},
         {"poc_only", v.poc_only},
         {"detail", v.detail}};
    if (v.new_error) j["new_error"] = *v.new_error;
}

} // namespace memrepair::patchkit
