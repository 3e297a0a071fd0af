#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "memrepair/llmgw.hpp"
#include "memrepair/replay.hpp"

namespace memrepair::patchkit {

struct HunkLine {
    char tag = ' '; // ' ' context, '-' removal, '+' addition
    std::string text;

    bool operator==(const HunkLine&) const = default;
};

struct Hunk {
    std::string file; // workspace-relative target
    long old_start = 0;
    long old_lines = 0;
    long new_start = 0;
    long new_lines = 0;
    std::vector<HunkLine> lines;

    bool operator==(const Hunk&) const = default;
};

struct Patch {
    std::vector<Hunk> hunks;

    bool operator==(const Patch&) const = default;
};

/// Parses one unified-diff text. Rejects hunks whose line counts disagree
/// with their headers (MalformedDiff, with line diagnostics) and targets
/// outside the workspace root (PathEscapesWorkspace).
Patch parse_unified_diff(const std::string& diff_text);

/// Merges all of a proposal's diff blocks into one patch.
Patch parse_patch(const llmgw::PatchProposal& proposal);

/// Swaps additions and removals; apply(reverse(p)) undoes apply(p).
Patch reverse(const Patch& p);

/// A disposable copy of the workspace with the patch applied. The original
/// tree is never touched.
struct PatchedWorkspace {
    replay::ProjectWorkspace workspace; // rooted at the copy
    std::string original_root;
};

/// Copies the workspace tree and applies the hunks there. Context matching
/// is exact first, then whitespace-insensitive, within a +/-3 line window.
/// Throws ContextMismatch naming the first failing hunk.
PatchedWorkspace apply_patch(const replay::ProjectWorkspace& ws, const Patch& p,
                             const std::string& dest_root = "");

enum class Verdict { CorrectCandidate, FailsPoC, BreaksTests, IntroducesError };

const char* to_string(Verdict v);

struct ValidationResult {
    bool poc_clean = false;  // constraint (1): the original error is gone
    bool tests_pass = false; // constraint (2): the test suite still passes
    std::optional<replay::ErrorReport> new_error;
    Verdict verdict = Verdict::FailsPoC;
    bool poc_only = false; // no test suite defined; tests_pass is vacuous
    std::string detail;
};

/// Verdict precedence: IntroducesError > FailsPoC > BreaksTests >
/// CorrectCandidate; a pure function of the other fields.
Verdict derive_verdict(bool poc_clean, bool tests_pass, bool has_new_error);

struct ValidateOptions {
    int build_timeout_seconds = 300;
    int replay_timeout_seconds = 120;
    int test_timeout_seconds = 300;
};

/// Rebuilds the patched tree, reruns the PoC under the tool, and runs the
/// test suite when one is defined. A report of the original kind at any
/// location means the PoC is not clean; a report of a different kind is a
/// newly introduced error.
ValidationResult validate(const PatchedWorkspace& ws2, const PocInput& poc,
                          const replay::ErrorReport& original, replay::Tool tool,
                          const ValidateOptions& options = {});

enum class GroundTruthMatch { ByteEqual, HunkEqual, Differs, NotProvided };

const char* to_string(GroundTruthMatch m);

/// Automates the automatable part of correctness judgment: byte or hunk
/// equality against the fixture's ground-truth diff. Anything else is
/// out-of-band human judgment.
GroundTruthMatch compare_to_ground_truth(const Patch& candidate, const std::string& ground_truth_diff);

std::string render_patch(const Patch& p);

void to_json(nlohmann::json& j, const ValidationResult& v);

} // namespace memrepair::patchkit
