#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qam/rational.hpp"

namespace qam {

// Symbols of the configuration alphabet are tokens; the blank is "#" and the
// endmarker for normal-form ATMs is "¢". Machine files spell "#" as "_".
using Symbol = std::string;

inline const Symbol kBlank = "#";
inline const Symbol kCent = "¢";  // ¢
inline const Symbol kDollar = "$";
inline const Symbol kLeft = "l";
inline const Symbol kRight = "r";

enum class MachineKind { DTM, ATM };
enum class Move { Left, Right };
enum class StateLabel { Existential, Universal, Deterministic };

struct Transition {
    Symbol next_state;
    Symbol write;
    Move move;
    bool operator==(const Transition&) const = default;
};

struct MachineSpec {
    MachineKind kind = MachineKind::DTM;
    std::vector<Symbol> states;  // declaration order; fixes the digit map
    Symbol start, accept, reject;
    std::vector<Symbol> tape_alphabet;  // contains "#"; ATMs also "¢"
    std::vector<Symbol> input_alphabet;
    // One transition per (state, symbol), or exactly two for ATM branching states.
    std::map<std::pair<Symbol, Symbol>, std::vector<Transition>> delta;
    std::map<Symbol, StateLabel> labels;  // ATM only

    bool is_state(const Symbol& s) const;
    bool is_tape_symbol(const Symbol& s) const;
    bool is_halting_state(const Symbol& s) const { return s == accept || s == reject; }
    StateLabel label_of(const Symbol& state) const;
    // Structural checks: disjoint Q and Gamma, |Q|+|Gamma| >= 5, transition
    // arities consistent with labels. Throws std::invalid_argument on failure.
    void validate() const;
    int config_alphabet_size() const {
        return static_cast<int>(states.size() + tape_alphabet.size());
    }
};

// A configuration string uqv over Q ∪ Γ; the head is on the leftmost symbol
// of v. DTM-protocol configurations start and end the tape part with a
// single blank.
struct Configuration {
    std::vector<Symbol> symbols;

    bool operator==(const Configuration&) const = default;
    auto operator<=>(const Configuration&) const = default;

    int length() const { return static_cast<int>(symbols.size()); }
    int state_position(const MachineSpec& spec) const;
    Symbol state(const MachineSpec& spec) const;
    bool is_halting(const MachineSpec& spec) const;
    std::string str() const;
};

struct DigitMap {
    std::map<Symbol, int> digit;  // injective into {1, ..., |Γ'|}
    int base = 0;                 // m = |Γ'| + 1

    // Assigns 1..|Γ'| in declaration order: states first, then tape alphabet.
    static DigitMap from_spec(const MachineSpec& spec);
    int digit_of(const Symbol& s) const;
};

// q1 # x # for DTMs, q1 ¢ x ¢ for normal-form ATMs.
Configuration initial_config(const MachineSpec& spec, const std::string& input);

// Single-step successor; `branch` selects among a branching state's two
// transitions. Throws on halting configurations and out-of-tape moves.
Configuration next_config(const MachineSpec& spec, const Configuration& c, int branch = 0);
// All successors: one for deterministic steps, two for ATM branching states.
std::vector<Configuration> next_configs(const MachineSpec& spec, const Configuration& c);

// Base-m value, leftmost symbol most significant.
Integer encode_config(const Configuration& c, const DigitMap& dm);

// Empty iff the ATM satisfies the Dwork-Stockmeyer normal form assumptions:
// endmarkers preserved, strict existential/universal alternation through
// deterministic runs, exactly two transitions per branching (state, symbol).
std::vector<std::string> validate_normal_form(const MachineSpec& spec);

// Classical alternating evaluation: existential = OR over branches,
// universal/deterministic = AND. Configurations revisited along the same
// path (or past the depth limit) count as rejecting.
bool atm_accepts(const MachineSpec& spec, const Configuration& c, int depth_limit = 1 << 16);

MachineSpec parse_machine_file(std::istream& in);
MachineSpec load_machine_file(const std::string& path);

}  // namespace qam
