#include "memrepair/promptgen.hpp"

#include <sstream>

#include "memrepair/error.hpp"

namespace memrepair::promptgen {

const char* to_string(SegmentKind k) {
    switch (k) {
    case SegmentKind::RoleTask: return "role_task";
    case SegmentKind::ErrorReport: return "error_report";
    case SegmentKind::ContextTrace: return "context_trace";
    case SegmentKind::PropagationPath: return "propagation_path";
    }
    return "?";
}

namespace {

SegmentKind segment_kind_from_string(const std::string& s) {
    if (s == "role_task") return SegmentKind::RoleTask;
    if (s == "error_report") return SegmentKind::ErrorReport;
    if (s == "context_trace") return SegmentKind::ContextTrace;
    if (s == "propagation_path") return SegmentKind::PropagationPath;
    throw DomainError("unknown prompt segment kind: '" + s + "'");
}

const char* kind_phrase(fta::ErrorKind k) {
    switch (k) {
    case fta::ErrorKind::UAF: return "use-after-free";
    case fta::ErrorKind::DF: return "double-free";
    case fta::ErrorKind::ML: return "memory-leak";
    }
    return "memory";
}

std::string state_label(const fta::Typestate& s) {
    std::string d = fta::describe_state(s);
    if (d == s.name) return s.name;
    return s.name + "(" + d + ")";
}

std::string step_line(const trace::ExecutionStep& s) {
    return "s_" + std::to_string(s.index) + " " + s.location.str() + ": " + s.source;
}

constexpr size_t kMaxRawReportChars = 4000;

std::string role_task_text(const PromptConfig& cfg) {
    std::string text =
        "You are an automated program repair tool specializing in C memory errors "
        "(use-after-free, double-free, memory leak). You are given the error report "
        "of a confirmed memory error, the typestate context trace of the erroneous "
        "memory object, and the error-propagation path of the execution that "
        "triggered it. Analyze how the object's typestate evolves along the path, "
        "find the root cause, and produce a patch for the repository that removes "
        "the error while preserving the program's intended behavior.\n"
        "Respond with the complete patch as a unified diff in a fenced code block, "
        "followed by a concise explanation of each change.";
    if (cfg.chain_of_thought)
        text += "\nThink step-by-step through the typestate transitions before writing the patch.";
    return text;
}

std::string error_report_text(const replay::ErrorReport& report) {
    std::ostringstream out;
    out << "Here is the location of the " << kind_phrase(report.kind)
        << " error in the provided code snippet: " << report.location.str() << ".";
    if (report.error_address != 0)
        out << "\nThe erroneously accessed heap address is " << trace::hex_string(report.error_address) << ".";
    if (!report.raw_report.empty()) {
        out << "\n\nTool report:\n";
        if (report.raw_report.size() > kMaxRawReportChars)
            out << report.raw_report.substr(0, kMaxRawReportChars) << "\n... (report truncated)";
        else
            out << report.raw_report;
    }
    return out.str();
}

PromptBundle assemble(std::string role, std::string report, std::string ctx, std::string path) {
    PromptBundle bundle;
    bundle.segments = {{SegmentKind::RoleTask, std::move(role)},
                       {SegmentKind::ErrorReport, std::move(report)},
                       {SegmentKind::ContextTrace, std::move(ctx)},
                       {SegmentKind::PropagationPath, std::move(path)}};
    std::string concat;
    for (const auto& s : bundle.segments) concat += s.text;
    bundle.token_estimate = estimate_tokens(concat);
    return bundle;
}

} // namespace

const PromptSegment& PromptBundle::segment(SegmentKind k) const {
    for (const auto& s : segments)
        if (s.kind == k) return s;
    throw DomainError(std::string("bundle lacks segment ") + to_string(k));
}

long estimate_tokens(const std::string& text) {
    return static_cast<long>(text.size() / 4);
}

std::string render_context(const trace::ProgramContext& ctx, int backtrace_depth) {
    std::ostringstream out;
    out << "typestate: " << state_label(ctx.transition.pre) << " -> "
        << state_label(ctx.transition.post) << " via " << fta::to_string(ctx.transition.op) << "\n";
    out << "at " << ctx.location.str() << "\n";
    out << "backtrace:\n";
    int shown = 0;
    for (const auto& frame : ctx.backtrace) {
        if (shown >= backtrace_depth) break;
        out << "  #" << shown << " " << frame.function << " at " << frame.location.str();
        if (!frame.source.empty()) out << ": " << frame.source;
        out << "\n";
        ++shown;
    }
    size_t omitted = ctx.backtrace.size() - static_cast<size_t>(shown);
    if (omitted > 0) out << "  ... " << omitted << " frames omitted\n";
    return out.str();
}

std::string elide_path(const pathex::ErrorPropagationPath& pe, int budget_lines) {
    if (budget_lines < 16) throw DomainError("path line budget must be at least 16");
    std::ostringstream out;
    const long total = static_cast<long>(pe.steps.size());
    if (total <= budget_lines) {
        for (const auto& s : pe.steps) out << step_line(s) << "\n";
        return out.str();
    }
    // Tail-weighted: the error trigger and the nearest allocation dominate
    // repair relevance.
    const long head = (budget_lines + 3) / 4;
    const long tail = (3L * budget_lines) / 4;
    for (long i = 0; i < head; ++i) out << step_line(pe.steps[static_cast<size_t>(i)]) << "\n";
    out << "... " << (total - head - tail) << " steps omitted ...\n";
    for (long i = total - tail; i < total; ++i) out << step_line(pe.steps[static_cast<size_t>(i)]) << "\n";
    return out.str();
}

PromptBundle build_prompts(const replay::ErrorReport& report,
                           const pathex::ContextTrace& trace,
                           const pathex::ErrorPropagationPath& pe,
                           const PromptConfig& cfg) {
    if (trace.entries.empty()) throw DomainError("cannot build prompts from an empty context trace");
    if (pe.empty()) throw DomainError("cannot build prompts from an empty propagation path");

    std::ostringstream ctx;
    ctx << "Typestate evolution of the erroneous memory object, with the program "
           "context captured at each typestate change:\n\n";
    int counter = 1;
    for (const auto& entry : trace.entries) {
        ctx << "[context " << counter++ << ", step s_" << entry.index << "]\n"
            << render_context(entry.context, cfg.backtrace_depth) << "\n";
    }

    std::ostringstream path;
    path << "Error-propagation path (execution from the nearest allocation of the "
            "error address, s_" << pe.first_index() << ", to the error trigger, s_"
         << pe.last_index() << "):\n\n"
         << elide_path(pe, cfg.path_line_budget);

    return assemble(role_task_text(cfg), error_report_text(report), ctx.str(), path.str());
}

PromptBundle build_full_context_prompts(const replay::ErrorReport& report,
                                        const trace::FullExecutionPath& pi,
                                        const trace::TypestateContextMap& tmap,
                                        const pathex::ErrorPropagationPath& pe,
                                        const PromptConfig& cfg) {
    std::ostringstream ctx;
    ctx << "Program context at every executed step:\n\n";
    for (const auto& step : pi.steps) {
        auto it = tmap.entries.find(step.index);
        if (it != tmap.entries.end()) {
            ctx << "[step s_" << step.index << "]\n" << render_context(it->second, cfg.backtrace_depth) << "\n";
        } else {
            ctx << "[step s_" << step.index << "]\n"
                << "typestate: unchanged\n"
                << "at " << step.location.str() << "\n"
                << "backtrace:\n  #0 at " << step.location.str() << ": " << step.source << "\n\n";
        }
    }

    std::ostringstream path;
    path << "Error-propagation path (execution from the nearest allocation of the "
            "error address, s_" << pe.first_index() << ", to the error trigger, s_"
         << pe.last_index() << "):\n\n"
         << elide_path(pe, cfg.path_line_budget);

    return assemble(role_task_text(cfg), error_report_text(report), ctx.str(), path.str());
}

void to_json(nlohmann::json& j, const PromptSegment& v) {
    j = {{"kind", to_string(v.kind)}, {"text", v.text}};
}
void from_json(const nlohmann::json& j, PromptSegment& v) {
    v.kind = segment_kind_from_string(j.at("kind").get<std::string>());
    j.at("text").get_to(v.text);
}

void to_json(nlohmann::json& j, const PromptBundle& v) {
    j = nlohmann::json::array();
    for (const auto& s : v.segments) j.push_back(s);
}
void from_json(const nlohmann::json& j, PromptBundle& v) {
    v.segments.clear();
    std::string concat;
    for (const auto& item : j) {
        v.segments.push_back(item.get<PromptSegment>());
        concat += v.segments.back().text;
    }
    v.token_estimate = estimate_tokens(concat);
}

} // namespace memrepair::promptgen
