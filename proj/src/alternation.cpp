#include "qam/alternation.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qam {

QConfig GenericQATM::initial(const std::string& input) const {
    return {initial_config(spec, input), init_register};
}

std::vector<QConfig> qstep(const GenericQATM& machine, const QConfig& qc) {
    const MachineSpec& spec = machine.spec;
    if (qc.classical.is_halting(spec)) throw std::invalid_argument("qstep on a halting QConfig");
    Symbol state = qc.classical.state(spec);
    StateLabel label = spec.label_of(state);
    std::vector<QConfig> children;

    if (label == StateLabel::Existential) {
        for (auto& c : next_configs(spec, qc.classical)) children.push_back({std::move(c), qc.reg});
        return children;
    }
    auto it = machine.superops.find(state);
    if (it == machine.superops.end()) {
        if (label == StateLabel::Universal)
            throw std::invalid_argument("universal state " + state + " has no superoperator");
        children.push_back({next_config(spec, qc.classical), qc.reg});
        return children;
    }
    ApplyResult applied = superop_apply(it->second, qc.reg);
    for (const auto& out : applied.outcomes) {
        if (out.state.is_zero()) continue;  // zero-probability branches are not implemented
        int branch = std::stoi(out.label);
        children.push_back({next_config(spec, qc.classical, branch), out.state});
    }
    return children;
}

SearchResult accepting_subtree_search(const MachineSpec& dtm, const std::string& input,
                                      int depth_limit) {
    if (depth_limit < 1) return {SearchOutcome::NoSubtreeWithinLimit, {}, ""};
    // Any prover message other than the defect-free continuation puts nonzero
    // mass on a reject outcome, and a reject leaf disqualifies the subtree;
    // the search therefore runs the weak round against the honest prover and
    // reads the leaf structure off the ledger. Restart outcomes along the
    // way are accept leaves.
    int budget = 0;
    for (const auto& c : honest_chain(dtm, input, depth_limit)) budget += c.length() + 2;
    VerifierConfig vc = VerifierConfig::for_machine(dtm, VerifierMode::Weak4State, input, budget);
    auto prover = make_prover(dtm, input, ProverKind::Honest);
    RoundResult rr = run_round(dtm, vc, *prover, input);

    SearchResult res;
    for (const auto& b : rr.blocks) res.witness.blocks.push_back(b.config);
    if (!rr.decided || static_cast<int>(rr.blocks.size()) > depth_limit) {
        res.outcome = SearchOutcome::NoSubtreeWithinLimit;
        return res;
    }
    if (rr.ledger.p_accept > 0 && rr.ledger.p_reject == 0) {
        res.outcome = SearchOutcome::Accepted;
        res.witness.leaf = "accept outcome after " + std::to_string(rr.blocks.size()) + " blocks";
        return res;
    }
    res.outcome = SearchOutcome::RejectCertificate;
    res.reject_reason = rr.deterministic_reject
                            ? rr.defect
                            : "the machine halts rejecting; every message chain ends in the "
                              "reject outcome";
    return res;
}

namespace {

struct QConfigLess {
    bool operator()(const QConfig& a, const QConfig& b) const {
        if (a.classical != b.classical) return a.classical < b.classical;
        if (a.reg.dim() != b.reg.dim()) return a.reg.dim() < b.reg.dim();
        for (int i = 0; i < a.reg.dim(); ++i) {
            int c = cmp(a.reg[i], b.reg[i]);
            if (c != 0) return c < 0;
        }
        return false;
    }
};

bool eval_rec(const GenericQATM& m, const QConfig& qc, int depth,
              std::map<QConfig, bool, QConfigLess>& memo,
              std::set<QConfig, QConfigLess>& on_path) {
    const MachineSpec& spec = m.spec;
    if (qc.classical.is_halting(spec)) return qc.classical.state(spec) == spec.accept;
    if (depth <= 0) return false;
    if (auto it = memo.find(qc); it != memo.end()) return it->second;
    if (!on_path.insert(qc).second) return false;

    StateLabel label = spec.label_of(qc.classical.state(spec));
    auto children = qstep(m, qc);
    bool result;
    if (label == StateLabel::Existential) {
        result = false;
        for (const auto& child : children)
            if (eval_rec(m, child, depth - 1, memo, on_path)) { result = true; break; }
    } else {
        result = true;
        for (const auto& child : children)
            if (!eval_rec(m, child, depth - 1, memo, on_path)) { result = false; break; }
    }
    on_path.erase(qc);
    memo[qc] = result;
    return result;
}

}  // namespace

StrongVerdict strong_eval(const GenericQATM& machine, const std::string& input, int depth_limit) {
    std::map<QConfig, bool, QConfigLess> memo;
    std::set<QConfig, QConfigLess> on_path;
    return eval_rec(machine, machine.initial(input), depth_limit, memo, on_path)
               ? StrongVerdict::Accept
               : StrongVerdict::Reject;
}

GenericQATM parse_qatm_file(std::istream& in) {
    // register:/superop: lines extend the plain machine format; everything
    // else is handed to the machine parser untouched.
    std::ostringstream machine_part;
    std::vector<Rational> reg_entries;
    // state -> list of (branch label, flat entries)
    std::map<Symbol, std::vector<std::pair<std::string, std::vector<Rational>>>> raw_ops;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        std::istringstream iss(trimmed);
        std::string key;
        iss >> key;
        if (key == "register:") {
            for (std::string tok; iss >> tok;) reg_entries.push_back(parse_rational(tok));
        } else if (key == "superop:") {
            std::string state, branch;
            if (!(iss >> state >> branch))
                throw std::invalid_argument("qATM file line " + std::to_string(lineno) +
                                            ": superop: needs a state and a branch outcome");
            std::vector<Rational> entries;
            for (std::string tok; iss >> tok;) entries.push_back(parse_rational(tok));
            raw_ops[state].emplace_back(branch, std::move(entries));
        } else {
            machine_part << line << "\n";
        }
    }
    if (reg_entries.empty()) throw std::invalid_argument("qATM file lacks a register: line");

    GenericQATM m;
    std::istringstream ms(machine_part.str());
    m.spec = parse_machine_file(ms);
    m.init_register.entries = reg_entries;
    int dim = m.init_register.dim();
    for (auto& [state, elements] : raw_ops) {
        std::vector<std::pair<std::string, Matrix>> mats;
        for (auto& [branch, flat] : elements) {
            if (static_cast<int>(flat.size()) != dim * dim)
                throw std::invalid_argument("superop element for " + state + " outcome " + branch +
                                            " needs " + std::to_string(dim * dim) + " entries");
            Matrix mat(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c) mat.at(r, c) = flat[static_cast<size_t>(r * dim + c)];
            mats.emplace_back(branch, std::move(mat));
        }
        Superoperator op = Superoperator::make(std::move(mats), RestartMode::ImplicitRestart);
        auto check = superop_validate(op);
        if (!check.ok)
            throw std::invalid_argument("superoperator for " + state + ": " + check.diagnostic);
        m.superops.emplace(state, std::move(op));
    }
    return m;
}

GenericQATM load_qatm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open qATM file: " + path);
    return parse_qatm_file(in);
}

}  // namespace qam
