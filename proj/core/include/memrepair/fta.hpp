#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace memrepair::fta {

/// Memory operations observable on a heap object. The alphabet is closed:
/// every automaton, builtin or loaded, is total over these four operations.
enum class MemOp { Alloc, Free, Use, Exit };

const char* to_string(MemOp op);
MemOp mem_op_from_string(const std::string& s);

/// A typestate is identified by name. Builtin automata use the canonical
/// names below; documents may introduce their own.
struct Typestate {
    std::string name;

    bool operator==(const Typestate&) const = default;
    auto operator<=>(const Typestate&) const = default;
};

namespace states {
inline const Typestate uninit{"T_u"};
inline const Typestate live{"T_l"};
inline const Typestate dead{"T_d"};
inline const Typestate uaf{"T_UAF"};
inline const Typestate df{"T_DF"};
inline const Typestate ml{"T_ML"};
} // namespace states

/// Human-readable label for the canonical states ("live", "dead", ...).
/// Unknown names are returned unchanged.
std::string describe_state(const Typestate& s);

enum class ErrorKind { UAF, DF, ML };

const char* to_string(ErrorKind k);
ErrorKind error_kind_from_string(const std::string& s);

/// Deterministic finite typestate automaton over MemOp. Immutable after
/// construction; delta is total over states x alphabet and the error state
/// is absorbing.
class FiniteTypestateAutomaton {
public:
    /// Builds an automaton from explicit transitions. Unlisted (state, op)
    /// pairs are completed as identity self-loops; listed transitions out of
    /// the error state must keep it absorbing. Throws ValidationError on
    /// duplicate keys, unknown states, or a non-absorbing error state.
    FiniteTypestateAutomaton(std::string error_kind,
                             std::vector<Typestate> states,
                             Typestate initial,
                             Typestate error_state,
                             const std::vector<std::tuple<Typestate, MemOp, Typestate>>& transitions);

    const std::string& error_kind() const { return error_kind_; }
    const std::vector<Typestate>& states() const { return states_; }
    const std::vector<MemOp>& alphabet() const { return alphabet_; }
    const Typestate& initial() const { return initial_; }
    const Typestate& error_state() const { return error_state_; }

    bool has_state(const Typestate& s) const;
    bool is_error(const Typestate& s) const { return s == error_state_; }

    nlohmann::json to_json() const;

    bool operator==(const FiniteTypestateAutomaton&) const = default;

private:
    friend Typestate step(const FiniteTypestateAutomaton&, const Typestate&, MemOp);

    std::string error_kind_;
    std::vector<Typestate> states_;
    std::vector<MemOp> alphabet_;
    Typestate initial_;
    Typestate error_state_;
    std::map<std::string, std::map<MemOp, Typestate>> delta_;
};

/// delta(s, op). Throws DomainError when s is not a state of the automaton.
Typestate step(const FiniteTypestateAutomaton& a, const Typestate& s, MemOp op);

/// The memory-error specifications: UAF, DF and ML automata over
/// {T_u, T_l, T_d, T_<kind>}. Pure: repeated calls return equal automata.
FiniteTypestateAutomaton builtin_automaton(ErrorKind kind);

/// Loads an automaton from its declarative JSON document:
///   {"error_kind", "states", "initial", "error_state",
///    "transitions": [{"from", "op", "to"}]}
/// Unlisted pairs are auto-completed to identity.
FiniteTypestateAutomaton load_automaton(const nlohmann::json& doc);
FiniteTypestateAutomaton load_automaton_file(const std::string& path);

} // namespace memrepair::fta
