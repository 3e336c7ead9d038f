#include "qam/machine.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qam {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

bool MachineSpec::is_state(const Symbol& s) const {
    return std::find(states.begin(), states.end(), s) != states.end();
}

bool MachineSpec::is_tape_symbol(const Symbol& s) const {
    return std::find(tape_alphabet.begin(), tape_alphabet.end(), s) != tape_alphabet.end();
}

StateLabel MachineSpec::label_of(const Symbol& state) const {
    if (kind == MachineKind::DTM || is_halting_state(state)) return StateLabel::Deterministic;
    auto it = labels.find(state);
    return it == labels.end() ? StateLabel::Deterministic : it->second;
}

void MachineSpec::validate() const {
    require(is_state(start) && is_state(accept) && is_state(reject),
            "start/accept/reject must be declared states");
    require(accept != reject, "accept and reject must differ");
    require(is_tape_symbol(kBlank), "tape alphabet must contain the blank");
    for (const auto& s : input_alphabet)
        require(is_tape_symbol(s), "input alphabet must be a subset of the tape alphabet");
    for (const auto& s : states)
        require(!is_tape_symbol(s), "state and tape alphabets must be disjoint");
    require(config_alphabet_size() >= 5, "configuration alphabet needs at least 5 symbols");
    {
        std::set<Symbol> seen;
        for (const auto& s : states) require(seen.insert(s).second, "duplicate state");
        for (const auto& s : tape_alphabet) require(seen.insert(s).second, "duplicate tape symbol");
    }
    for (const auto& [key, transitions] : delta) {
        const auto& [state, symbol] = key;
        require(is_state(state) && !is_halting_state(state), "transition from invalid state");
        require(is_tape_symbol(symbol), "transition on invalid symbol");
        for (const auto& t : transitions) {
            require(is_state(t.next_state), "transition to undeclared state");
            require(is_tape_symbol(t.write), "transition writes undeclared symbol");
        }
        if (kind == MachineKind::DTM) {
            require(transitions.size() == 1, "DTM transitions must be single-valued");
        } else {
            StateLabel label = label_of(state);
            size_t expected = (label == StateLabel::Deterministic) ? 1 : 2;
            require(transitions.size() == expected,
                    "branching states need exactly two transitions, deterministic exactly one");
        }
    }
    if (kind == MachineKind::ATM) {
        for (const auto& [state, label] : labels) {
            require(is_state(state), "label on undeclared state");
            require(!is_halting_state(state), "halting states carry no label");
            (void)label;
        }
    }
}

int Configuration::state_position(const MachineSpec& spec) const {
    int pos = -1;
    for (int i = 0; i < length(); ++i) {
        if (spec.is_state(symbols[static_cast<size_t>(i)])) {
            require(pos < 0, "configuration has more than one state symbol");
            pos = i;
        }
    }
    require(pos >= 0, "configuration has no state symbol");
    return pos;
}

Symbol Configuration::state(const MachineSpec& spec) const {
    return symbols[static_cast<size_t>(state_position(spec))];
}

bool Configuration::is_halting(const MachineSpec& spec) const {
    return spec.is_halting_state(state(spec));
}

std::string Configuration::str() const {
    std::string out;
    for (const auto& s : symbols) out += s;
    return out;
}

DigitMap DigitMap::from_spec(const MachineSpec& spec) {
    DigitMap dm;
    int next = 1;
    for (const auto& s : spec.states) dm.digit[s] = next++;
    for (const auto& s : spec.tape_alphabet) dm.digit[s] = next++;
    dm.base = next;  // |Γ'| + 1
    return dm;
}

int DigitMap::digit_of(const Symbol& s) const {
    auto it = digit.find(s);
    require(it != digit.end(), "symbol '" + s + "' has no digit");
    return it->second;
}

Configuration initial_config(const MachineSpec& spec, const std::string& input) {
    Symbol delim = (spec.kind == MachineKind::ATM) ? kCent : kBlank;
    Configuration c;
    c.symbols.push_back(spec.start);
    c.symbols.push_back(delim);
    for (char ch : input) {
        Symbol s(1, ch);
        require(std::find(spec.input_alphabet.begin(), spec.input_alphabet.end(), s) !=
                    spec.input_alphabet.end(),
                "input symbol '" + s + "' not in input alphabet");
        c.symbols.push_back(s);
    }
    c.symbols.push_back(delim);
    return c;
}

namespace {

// "The unnecessary blank symbols are always dropped": keep a single blank at
// each tape end. A state symbol never equals the blank, so the window checks
// below cannot cross the head.
void drop_spare_blanks(Configuration& c) {
    auto& s = c.symbols;
    while (s.size() >= 2 && s[s.size() - 1] == kBlank && s[s.size() - 2] == kBlank) s.pop_back();
    while (s.size() >= 2 && s[0] == kBlank && s[1] == kBlank) s.erase(s.begin());
}

}  // namespace

Configuration next_config(const MachineSpec& spec, const Configuration& c, int branch) {
    int p = c.state_position(spec);
    Symbol state = c.symbols[static_cast<size_t>(p)];
    require(!spec.is_halting_state(state), "next_config on a halting configuration");
    require(p + 1 < c.length(), "head has no symbol to scan");
    Symbol head = c.symbols[static_cast<size_t>(p + 1)];
    auto it = spec.delta.find({state, head});
    require(it != spec.delta.end(), "no transition for (" + state + ", " + head + ")");
    require(branch >= 0 && branch < static_cast<int>(it->second.size()),
            "branch index out of range");
    const Transition& t = it->second[static_cast<size_t>(branch)];

    Configuration next;
    auto& out = next.symbols;
    // u, then the rewritten cell, with the state re-inserted per the move.
    for (int i = 0; i < p; ++i) out.push_back(c.symbols[static_cast<size_t>(i)]);
    if (t.move == Move::Right) {
        out.push_back(t.write);
        out.push_back(t.next_state);
        for (int i = p + 2; i < c.length(); ++i) out.push_back(c.symbols[static_cast<size_t>(i)]);
        if (out.back() == t.next_state) out.push_back(kBlank);
    } else {
        require(p >= 1, "head would leave the tape on a left move");
        Symbol left = out.back();
        out.pop_back();
        out.push_back(t.next_state);
        out.push_back(left);
        out.push_back(t.write);
        for (int i = p + 2; i < c.length(); ++i) out.push_back(c.symbols[static_cast<size_t>(i)]);
    }
    drop_spare_blanks(next);
    return next;
}

std::vector<Configuration> next_configs(const MachineSpec& spec, const Configuration& c) {
    int p = c.state_position(spec);
    Symbol state = c.symbols[static_cast<size_t>(p)];
    Symbol head = c.symbols[static_cast<size_t>(p + 1)];
    auto it = spec.delta.find({state, head});
    require(it != spec.delta.end(), "no transition for (" + state + ", " + head + ")");
    std::vector<Configuration> out;
    for (int b = 0; b < static_cast<int>(it->second.size()); ++b)
        out.push_back(next_config(spec, c, b));
    return out;
}

Integer encode_config(const Configuration& c, const DigitMap& dm) {
    Integer acc = 0;
    for (const auto& s : c.symbols) acc = acc * dm.base + dm.digit_of(s);
    return acc;
}

std::vector<std::string> validate_normal_form(const MachineSpec& spec) {
    std::vector<std::string> violations;
    if (spec.kind != MachineKind::ATM) {
        violations.push_back("machine is not an ATM");
        return violations;
    }
    if (!spec.is_tape_symbol(kCent)) violations.push_back("tape alphabet lacks the cent symbol");
    for (const auto& [key, transitions] : spec.delta) {
        const auto& [state, symbol] = key;
        StateLabel label = spec.label_of(state);
        size_t expected = (label == StateLabel::Deterministic) ? 1 : 2;
        if (transitions.size() != expected) {
            violations.push_back("state " + state + " on " + symbol + " has " +
                                 std::to_string(transitions.size()) + " transitions, expected " +
                                 std::to_string(expected));
        }
        for (const auto& t : transitions) {
            if (symbol == kCent && t.write != kCent)
                violations.push_back("cent overwritten by " + t.write + " in state " + state);
            if (symbol != kCent && t.write == kCent)
                violations.push_back("non-cent symbol " + symbol + " overwritten by cent in state " +
                                     state);
        }
    }
    // Existential and universal branchings must strictly alternate through
    // deterministic runs. Walk the state graph from each branching state.
    auto successors = [&](const Symbol& q) {
        std::set<Symbol> out;
        for (const auto& [key, transitions] : spec.delta) {
            if (key.first != q) continue;
            for (const auto& t : transitions) out.insert(t.next_state);
        }
        return out;
    };
    for (const auto& q : spec.states) {
        StateLabel label = spec.label_of(q);
        if (label == StateLabel::Deterministic || spec.is_halting_state(q)) continue;
        std::set<Symbol> visited;
        std::set<Symbol> first = successors(q);
        std::vector<Symbol> stack(first.begin(), first.end());
        bool reported = false;
        while (!stack.empty() && !reported) {
            Symbol cur = stack.back();
            stack.pop_back();
            if (!visited.insert(cur).second) continue;
            if (spec.is_halting_state(cur)) continue;
            StateLabel cur_label = spec.label_of(cur);
            if (cur_label == StateLabel::Deterministic) {
                for (const auto& s : successors(cur)) stack.push_back(s);
            } else if (cur_label == label) {
                violations.push_back("alternation violated: " + q + " reaches " + cur +
                                     " without an opposite branching in between");
                reported = true;
            }
        }
    }
    return violations;
}

namespace {

bool atm_accepts_rec(const MachineSpec& spec, const Configuration& c, int depth_limit,
                     std::map<Configuration, int>& memo, std::set<Configuration>& on_path) {
    if (c.is_halting(spec)) return c.state(spec) == spec.accept;
    if (depth_limit <= 0) return false;
    auto it = memo.find(c);
    if (it != memo.end()) return it->second != 0;
    if (!on_path.insert(c).second) return false;  // revisit along the path: a loop
    StateLabel label = spec.label_of(c.state(spec));
    bool result;
    auto children = next_configs(spec, c);
    if (label == StateLabel::Existential) {
        result = false;
        for (const auto& child : children)
            if (atm_accepts_rec(spec, child, depth_limit - 1, memo, on_path)) {
                result = true;
                break;
            }
    } else {
        result = true;
        for (const auto& child : children)
            if (!atm_accepts_rec(spec, child, depth_limit - 1, memo, on_path)) {
                result = false;
                break;
            }
    }
    on_path.erase(c);
    memo[c] = result ? 1 : 0;
    return result;
}

}  // namespace

bool atm_accepts(const MachineSpec& spec, const Configuration& c, int depth_limit) {
    std::map<Configuration, int> memo;
    std::set<Configuration> on_path;
    return atm_accepts_rec(spec, c, depth_limit, memo, on_path);
}

namespace {

Symbol decode_token(const std::string& tok) { return tok == "_" ? kBlank : Symbol(tok); }

Move parse_move(const std::string& tok) {
    if (tok == "R") return Move::Right;
    if (tok == "L") return Move::Left;
    throw std::invalid_argument("invalid move '" + tok + "'");
}

}  // namespace

MachineSpec parse_machine_file(std::istream& in) {
    MachineSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto fail = [&](const std::string& msg) {
            throw std::invalid_argument("machine file line " + std::to_string(lineno) + ": " + msg);
        };
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty() || trimmed.rfind("//", 0) == 0) continue;

        std::istringstream iss(trimmed);
        std::string key;
        iss >> key;
        std::vector<std::string> tokens;
        for (std::string tok; iss >> tok;) tokens.push_back(tok);

        if (key == "type:") {
            if (tokens.size() != 1) fail("type: needs one value");
            if (tokens[0] == "dtm") spec.kind = MachineKind::DTM;
            else if (tokens[0] == "atm") spec.kind = MachineKind::ATM;
            else fail("unknown machine type '" + tokens[0] + "'");
        } else if (key == "states:") {
            for (const auto& t : tokens) spec.states.push_back(decode_token(t));
        } else if (key == "tape_alphabet:") {
            for (const auto& t : tokens) spec.tape_alphabet.push_back(decode_token(t));
        } else if (key == "input_alphabet:") {
            for (const auto& t : tokens) spec.input_alphabet.push_back(decode_token(t));
        } else if (key == "start:") {
            if (tokens.size() != 1) fail("start: needs one state");
            spec.start = decode_token(tokens[0]);
        } else if (key == "accept:") {
            if (tokens.size() != 1) fail("accept: needs one state");
            spec.accept = decode_token(tokens[0]);
        } else if (key == "reject:") {
            if (tokens.size() != 1) fail("reject: needs one state");
            spec.reject = decode_token(tokens[0]);
        } else if (key == "labels:") {
            if (tokens.size() % 2 != 0) fail("labels: needs state/label pairs");
            for (size_t i = 0; i < tokens.size(); i += 2) {
                StateLabel label;
                if (tokens[i + 1] == "existential") label = StateLabel::Existential;
                else if (tokens[i + 1] == "universal") label = StateLabel::Universal;
                else if (tokens[i + 1] == "deterministic") label = StateLabel::Deterministic;
                else { fail("unknown label '" + tokens[i + 1] + "'"); continue; }
                spec.labels[decode_token(tokens[i])] = label;
            }
        } else if (key == "delta:") {
            // delta: q a -> q' b R
            if (tokens.size() != 6 || tokens[2] != "->") fail("delta: expects 'q a -> q2 b M'");
            spec.delta[{decode_token(tokens[0]), decode_token(tokens[1])}] = {
                {decode_token(tokens[3]), decode_token(tokens[4]), parse_move(tokens[5])}};
        } else if (key == "branch:") {
            // branch: q a -> (q' b R | q'' c L)
            std::vector<std::string> cleaned;
            for (auto t : tokens) {
                std::erase(t, '(');
                std::erase(t, ')');
                if (!t.empty()) cleaned.push_back(t);
            }
            if (cleaned.size() != 10 || cleaned[2] != "->" || cleaned[6] != "|")
                fail("branch: expects 'q a -> (q2 b M | q3 c M)'");
            spec.delta[{decode_token(cleaned[0]), decode_token(cleaned[1])}] = {
                {decode_token(cleaned[3]), decode_token(cleaned[4]), parse_move(cleaned[5])},
                {decode_token(cleaned[7]), decode_token(cleaned[8]), parse_move(cleaned[9])}};
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    spec.validate();
    return spec;
}

MachineSpec load_machine_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open machine file: " + path);
    return parse_machine_file(in);
}

}  // namespace qam
