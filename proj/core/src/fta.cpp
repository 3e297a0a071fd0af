#include "memrepair/fta.hpp"

#include <algorithm>
#include <fstream>

#include "memrepair/error.hpp"

namespace memrepair::fta {

const char* to_string(MemOp op) {
    switch (op) {
    case MemOp::Alloc: return "alloc";
    case MemOp::Free: return "free";
    case MemOp::Use: return "use";
    case MemOp::Exit: return "exit";
    }
    return "?";
}

MemOp mem_op_from_string(const std::string& s) {
    if (s == "alloc") return MemOp::Alloc;
    if (s == "free") return MemOp::Free;
    if (s == "use") return MemOp::Use;
    if (s == "exit") return MemOp::Exit;
    throw DomainError("unknown memory operation: '" + s + "'");
}

std::string describe_state(const Typestate& s) {
    if (s == states::uninit) return "uninit";
    if (s == states::live) return "live";
    if (s == states::dead) return "dead";
    if (s == states::uaf) return "use-after-free";
    if (s == states::df) return "double-free";
    if (s == states::ml) return "memory-leak";
    return s.name;
}

const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::UAF: return "UAF";
    case ErrorKind::DF: return "DF";
    case ErrorKind::ML: return "ML";
    }
    return "?";
}

ErrorKind error_kind_from_string(const std::string& s) {
    if (s == "UAF" || s == "uaf") return ErrorKind::UAF;
    if (s == "DF" || s == "df") return ErrorKind::DF;
    if (s == "ML" || s == "ml") return ErrorKind::ML;
    throw DomainError("unknown error kind: '" + s + "'");
}

namespace {
const std::vector<MemOp> kAlphabet = {MemOp::Alloc, MemOp::Free, MemOp::Use, MemOp::Exit};
} // namespace

FiniteTypestateAutomaton::FiniteTypestateAutomaton(
    std::string error_kind,
    std::vector<Typestate> states,
    Typestate initial,
    Typestate error_state,
    const std::vector<std::tuple<Typestate, MemOp, Typestate>>& transitions)
    : error_kind_(std::move(error_kind)),
      states_(std::move(states)),
      alphabet_(kAlphabet),
      initial_(std::move(initial)),
      error_state_(std::move(error_state)) {
    if (states_.empty()) throw ValidationError("automaton has no states");
    std::sort(states_.begin(), states_.end());
    states_.erase(std::unique(states_.begin(), states_.end()), states_.end());
    if (!has_state(initial_)) throw ValidationError("initial state '" + initial_.name + "' not in state set");
    if (!has_state(error_state_)) throw ValidationError("error state '" + error_state_.name + "' not in state set");
    if (initial_ != states::uninit)
        throw ValidationError("initial state must be T_u, got '" + initial_.name + "'");

    for (const auto& [from, op, to] : transitions) {
        if (!has_state(from)) throw ValidationError("transition from unknown state '" + from.name + "'");
        if (!has_state(to)) throw ValidationError("transition to unknown state '" + to.name + "'");
        auto& row = delta_[from.name];
        if (auto it = row.find(op); it != row.end())
            throw ValidationError("duplicate transition key (" + from.name + ", " + to_string(op) + ")");
        if (from == error_state_ && to != error_state_)
            throw ValidationError("error state must be absorbing: (" + from.name + ", " +
                                  to_string(op) + ") -> " + to.name);
        row.emplace(op, to);
    }

    // Identity completion makes delta total; the error row absorbs.
    for (const auto& s : states_) {
        auto& row = delta_[s.name];
        for (MemOp op : alphabet_) {
            if (!row.contains(op)) row.emplace(op, s == error_state_ ? error_state_ : s);
        }
    }
}

bool FiniteTypestateAutomaton::has_state(const Typestate& s) const {
    return std::binary_search(states_.begin(), states_.end(), s);
}

Typestate step(const FiniteTypestateAutomaton& a, const Typestate& s, MemOp op) {
    auto it = a.delta_.find(s.name);
    if (it == a.delta_.end())
        throw DomainError("state '" + s.name + "' not in automaton " + a.error_kind_);
    return it->second.at(op);
}

nlohmann::json FiniteTypestateAutomaton::to_json() const {
    nlohmann::json doc;
    doc["error_kind"] = error_kind_;
    auto& st = doc["states"] = nlohmann::json::array();
    for (const auto& s : states_) st.push_back(s.name);
    doc["initial"] = initial_.name;
    doc["error_state"] = error_state_.name;
    auto& tr = doc["transitions"] = nlohmann::json::array();
    for (const auto& [from, row] : delta_) {
        for (const auto& [op, to] : row) {
            if (to.name == from) continue; // identity pairs are implicit
            tr.push_back({{"from", from}, {"op", to_string(op)}, {"to", to.name}});
        }
    }
    return doc;
}

FiniteTypestateAutomaton builtin_automaton(ErrorKind kind) {
    using namespace states;
    using T = std::tuple<Typestate, MemOp, Typestate>;

    // Shared lifecycle edges. Re-allocation of a freed address re-arms
    // tracking: the allocator may hand the same block out again, and the
    // fresh object is live regardless of the old one's history.
    std::vector<T> edges = {
        {uninit, MemOp::Alloc, live},
        {live, MemOp::Free, dead},
        {dead, MemOp::Alloc, live},
    };

    switch (kind) {
    case ErrorKind::UAF:
        edges.push_back({dead, MemOp::Use, uaf});
        return FiniteTypestateAutomaton("UAF", {uninit, live, dead, uaf}, uninit, uaf, edges);
    case ErrorKind::DF:
        edges.push_back({dead, MemOp::Free, df});
        // A use of freed memory is not the double-free automaton's error;
        // it de-tracks the address until a fresh allocation re-arms it.
        edges.push_back({dead, MemOp::Use, uninit});
        return FiniteTypestateAutomaton("DF", {uninit, live, dead, df}, uninit, df, edges);
    case ErrorKind::ML:
        edges.push_back({live, MemOp::Exit, ml});
        return FiniteTypestateAutomaton("ML", {uninit, live, dead, ml}, uninit, ml, edges);
    }
    throw DomainError("unknown error kind");
}

FiniteTypestateAutomaton load_automaton(const nlohmann::json& doc) {
    try {
        std::vector<Typestate> states;
        for (const auto& s : doc.at("states")) states.push_back({s.get<std::string>()});
        Typestate initial{doc.at("initial").get<std::string>()};
        Typestate error_state{doc.at("error_state").get<std::string>()};
        std::vector<std::tuple<Typestate, MemOp, Typestate>> transitions;
        for (const auto& t : doc.at("transitions")) {
            transitions.emplace_back(Typestate{t.at("from").get<std::string>()},
                                     mem_op_from_string(t.at("op").get<std::string>()),
                                     Typestate{t.at("to").get<std::string>()});
        }
        return FiniteTypestateAutomaton(doc.at("error_kind").get<std::string>(), std::move(states),
                                        std::move(initial), std::move(error_state), transitions);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed automaton document: ") + e.what());
    }
}

FiniteTypestateAutomaton load_automaton_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open automaton document: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("automaton document '" + path + "' is not valid JSON: " + e.what());
    }
    return load_automaton(doc);
}

} // namespace memrepair::fta
