#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "memrepair/fta.hpp"

namespace memrepair::trace {

struct SourceLocation {
    std::string file;
    int line = 0; // 1-based

    bool operator==(const SourceLocation&) const = default;
    auto operator<=>(const SourceLocation&) const = default;
    std::string str() const { return file + ":" + std::to_string(line); }
};

/// One executed statement: its position in the execution order and the
/// source line it corresponds to.
struct ExecutionStep {
    int index = 0; // 1-based execution order
    SourceLocation location;
    std::string source;

    bool operator==(const ExecutionStep&) const = default;
};

/// Chronological statement sequence from the session anchor (program entry,
/// or the error block's first allocation in fast-start mode) to the
/// error-triggering statement. Indices are exactly 1..n.
struct FullExecutionPath {
    std::vector<ExecutionStep> steps;

    bool operator==(const FullExecutionPath&) const = default;
    int length() const { return static_cast<int>(steps.size()); }
    const ExecutionStep& at_index(int index) const { return steps.at(static_cast<size_t>(index - 1)); }
};

struct StackFrame {
    std::string function;
    SourceLocation location;
    std::string source;

    bool operator==(const StackFrame&) const = default;
};

/// Pre/post typestates around one memory operation; only recorded when
/// pre != post.
struct TypestateTransition {
    fta::Typestate pre;
    fta::MemOp op = fta::MemOp::Use;
    fta::Typestate post;

    bool operator==(const TypestateTransition&) const = default;
};

/// <location, transition, backtrace> captured at a typestate-changing step.
/// backtrace is innermost-first and backtrace[0].location == location.
struct ProgramContext {
    SourceLocation location;
    TypestateTransition transition;
    std::vector<StackFrame> backtrace;

    bool operator==(const ProgramContext&) const = default;
};

/// Ordered map from step index to the context captured there. Every keyed
/// step touches the error block and records a genuine typestate change.
struct TypestateContextMap {
    std::map<int, ProgramContext> entries;

    bool operator==(const TypestateContextMap&) const = default;
    std::vector<int> keys() const;
};

/// Serialized form of one debugger step. Non-event steps carry no op and an
/// empty backtrace. alloc events carry address and size; free/use carry
/// address.
struct TraceEvent {
    int index = 0;
    SourceLocation location;
    std::string source;
    std::optional<fta::MemOp> op;
    std::optional<std::uint64_t> address;
    std::optional<std::uint64_t> size;
    std::vector<StackFrame> backtrace;

    bool operator==(const TraceEvent&) const = default;
};

/// Allocation extent of the error object; aliasing is address-range
/// membership in this block.
struct MemoryBlock {
    std::uint64_t base = 0;
    std::uint64_t size = 0;
    int alloc_step = 0;

    bool operator==(const MemoryBlock&) const = default;
    bool contains(std::uint64_t address) const { return address >= base && address < base + size; }
};

std::string hex_string(std::uint64_t value);
std::uint64_t parse_hex(const std::string& text);

void to_json(nlohmann::json& j, const SourceLocation& v);
void from_json(const nlohmann::json& j, SourceLocation& v);
void to_json(nlohmann::json& j, const ExecutionStep& v);
void from_json(const nlohmann::json& j, ExecutionStep& v);
void to_json(nlohmann::json& j, const FullExecutionPath& v);
void from_json(const nlohmann::json& j, FullExecutionPath& v);
void to_json(nlohmann::json& j, const StackFrame& v);
void from_json(const nlohmann::json& j, StackFrame& v);
void to_json(nlohmann::json& j, const TypestateTransition& v);
void from_json(const nlohmann::json& j, TypestateTransition& v);
void to_json(nlohmann::json& j, const ProgramContext& v);
void from_json(const nlohmann::json& j, ProgramContext& v);
void to_json(nlohmann::json& j, const TypestateContextMap& v);
void from_json(const nlohmann::json& j, TypestateContextMap& v);
void to_json(nlohmann::json& j, const TraceEvent& v);
void from_json(const nlohmann::json& j, TraceEvent& v);

} // namespace memrepair::trace
