#include "memrepair/trace_types.hpp"

#include <charconv>
#include <stdexcept>

#include "memrepair/error.hpp"

namespace memrepair::trace {

std::vector<int> TypestateContextMap::keys() const {
    std::vector<int> out;
    out.reserve(entries.size());
    for (const auto& [k, _] : entries) out.push_back(k);
    return out;
}

std::string hex_string(std::uint64_t value) {
    char buf[19];
    auto [end, ec] = std::to_chars(buf + 2, buf + sizeof buf, value, 16);
    buf[0] = '0';
    buf[1] = 'x';
    return std::string(buf, end);
}

std::uint64_t parse_hex(const std::string& text) {
    std::string_view sv = text;
    if (sv.starts_with("0x") || sv.starts_with("0X")) sv.remove_prefix(2);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value, 16);
    if (ec != std::errc{} || ptr != sv.data() + sv.size())
        throw DomainError("not a hex address: '" + text + "'");
    return value;
}

void to_json(nlohmann::json& j, const SourceLocation& v) {
    j = {{"file", v.file}, {"line", v.line}};
}
void from_json(const nlohmann::json& j, SourceLocation& v) {
    j.at("file").get_to(v.file);
    j.at("line").get_to(v.line);
}

void to_json(nlohmann::json& j, const ExecutionStep& v) {
    j = {{"index", v.index}, {"file", v.location.file}, {"line", v.location.line}, {"source", v.source}};
}
void from_json(const nlohmann::json& j, ExecutionStep& v) {
    j.at("index").get_to(v.index);
    j.at("file").get_to(v.location.file);
    j.at("line").get_to(v.location.line);
    j.at("source").get_to(v.source);
}

void to_json(nlohmann::json& j, const FullExecutionPath& v) {
    j = nlohmann::json{{"steps", v.steps}};
}
void from_json(const nlohmann::json& j, FullExecutionPath& v) {
    j.at("steps").get_to(v.steps);
}

void to_json(nlohmann::json& j, const StackFrame& v) {
    j = {{"function", v.function}, {"file", v.location.file}, {"line", v.location.line}, {"source", v.source}};
}
void from_json(const nlohmann::json& j, StackFrame& v) {
    j.at("function").get_to(v.function);
    j.at("file").get_to(v.location.file);
    j.at("line").get_to(v.location.line);
    j.at("source").get_to(v.source);
}

void to_json(nlohmann::json& j, const TypestateTransition& v) {
    j = {{"pre", v.pre.name}, {"op", fta::to_string(v.op)}, {"post", v.post.name}};
}
void from_json(const nlohmann::json& j, TypestateTransition& v) {
    v.pre.name = j.at("pre").get<std::string>();
    v.op = fta::mem_op_from_string(j.at("op").get<std::string>());
    v.post.name = j.at("post").get<std::string>();
}

void to_json(nlohmann::json& j, const ProgramContext& v) {
    j = {{"location", v.location}, {"transition", v.transition}, {"backtrace", v.backtrace}};
}
void from_json(const nlohmann::json& j, ProgramContext& v) {
    j.at("location").get_to(v.location);
    j.at("transition").get_to(v.transition);
    j.at("backtrace").get_to(v.backtrace);
}

void to_json(nlohmann::json& j, const TypestateContextMap& v) {
    j = nlohmann::json::array();
    for (const auto& [index, ctx] : v.entries) j.push_back({{"index", index}, {"context", ctx}});
}
void from_json(const nlohmann::json& j, TypestateContextMap& v) {
    v.entries.clear();
    for (const auto& item : j)
        v.entries.emplace(item.at("index").get<int>(), item.at("context").get<ProgramContext>());
}

void to_json(nlohmann::json& j, const TraceEvent& v) {
    j = {{"index", v.index},
         {"file", v.location.file},
         {"line", v.location.line},
         {"source", v.source},
         {"backtrace", v.backtrace}};
    if (v.op) j["op"] = fta::to_string(*v.op);
    if (v.address) j["address"] = hex_string(*v.address);
    if (v.size) j["size"] = *v.size;
}
void from_json(const nlohmann::json& j, TraceEvent& v) {
    j.at("index").get_to(v.index);
    j.at("file").get_to(v.location.file);
    j.at("line").get_to(v.location.line);
    j.at("source").get_to(v.source);
    v.backtrace.clear();
    if (j.contains("backtrace")) j.at("backtrace").get_to(v.backtrace);
    v.op.reset();
    v.address.reset();
    v.size.reset();
    if (j.contains("op")) v.op = fta::mem_op_from_string(j.at("op").get<std::string>());
    if (j.contains("address")) v.address = parse_hex(j.at("address").get<std::string>());
    if (j.contains("size")) v.size = j.at("size").get<std::uint64_t>();
}

} // namespace memrepair::trace
