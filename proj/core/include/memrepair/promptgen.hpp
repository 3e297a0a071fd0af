#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "memrepair/pathex.hpp"
#include "memrepair/report.hpp"

namespace memrepair::promptgen {

enum class SegmentKind { RoleTask, ErrorReport, ContextTrace, PropagationPath };

const char* to_string(SegmentKind k);

struct PromptSegment {
    SegmentKind kind = SegmentKind::RoleTask;
    std::string text;

    bool operator==(const PromptSegment&) const = default;
};

/// The four segments in canonical order plus a vendor-neutral token
/// estimate (character count / 4) of their concatenation.
struct PromptBundle {
    std::vector<PromptSegment> segments;
    long token_estimate = 0;

    bool operator==(const PromptBundle&) const = default;
    const PromptSegment& segment(SegmentKind k) const;
};

struct PromptConfig {
    int path_line_budget = 2000; // minimum 16
    int backtrace_depth = 32;
    bool chain_of_thought = true;
    // Single-message delivery by default; multi_turn sends one message per
    // segment instead.
    bool multi_turn = false;

    bool operator==(const PromptConfig&) const = default;
};

long estimate_tokens(const std::string& text);

/// Renders one program context: the transition, the location, and the
/// backtrace innermost-first with each frame's source line.
std::string render_context(const trace::ProgramContext& ctx, int backtrace_depth = 32);

/// Renders the propagation path within a line budget. Paths longer than the
/// budget keep the first ceil(budget/4) and last floor(3*budget/4) step
/// lines around a single marker recording the omitted count.
std::string elide_path(const pathex::ErrorPropagationPath& pe, int budget_lines);

/// Assembles the four-segment bundle from the replay report, the context
/// trace, and the error-propagation path. Deterministic in its inputs.
PromptBundle build_prompts(const replay::ErrorReport& report,
                           const pathex::ContextTrace& trace,
                           const pathex::ErrorPropagationPath& pe,
                           const PromptConfig& cfg = {});

/// Counterfactual comparison bundle: the context segment carries a per-step
/// context block for every step of the full path instead of the selected
/// context trace. Used only to quantify what the typestate-guided
/// selection saves.
PromptBundle build_full_context_prompts(const replay::ErrorReport& report,
                                        const trace::FullExecutionPath& pi,
                                        const trace::TypestateContextMap& tmap,
                                        const pathex::ErrorPropagationPath& pe,
                                        const PromptConfig& cfg = {});

void to_json(nlohmann::json& j, const PromptSegment& v);
void from_json(const nlohmann::json& j, PromptSegment& v);
void to_json(nlohmann::json& j, const PromptBundle& v);
void from_json(const nlohmann::json& j, PromptBundle& v);

} // namespace memrepair::promptgen
