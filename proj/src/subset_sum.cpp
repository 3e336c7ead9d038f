#include "qam/subset_sum.hpp"

#include <algorithm>
#include <stdexcept>

namespace qam {

SubsetSumInstance SubsetSumInstance::parse(const std::string& raw) {
    // (binary '$'){2,}: the target, then at least one item, each terminated
    // by $.
    SubsetSumInstance inst;
    inst.raw = raw;
    std::vector<Integer> numbers;
    std::string current;
    for (char ch : raw) {
        if (ch == '0' || ch == '1') {
            current.push_back(ch);
        } else if (ch == '$') {
            if (current.empty()) throw std::invalid_argument("malformed instance");
            Integer v = 0;
            for (char b : current) v = v * 2 + (b - '0');
            numbers.push_back(v);
            current.clear();
        } else {
            throw std::invalid_argument("malformed instance");
        }
    }
    if (!current.empty() || numbers.size() < 2) throw std::invalid_argument("malformed instance");
    inst.target = numbers.front();
    inst.items.assign(numbers.begin() + 1, numbers.end());
    return inst;
}

namespace {

Superoperator make_complete(std::vector<std::pair<std::string, std::vector<std::vector<Rational>>>> rows) {
    Rational third(1, 3);
    std::vector<std::pair<std::string, Matrix>> elements;
    for (auto& [label, r] : rows)
        elements.emplace_back(label, Matrix::from_rows(r).scaled(third));
    return Superoperator::make(std::move(elements), RestartMode::Complete);
}

std::map<std::string, Superoperator> build_ops() {
    std::map<std::string, Superoperator> ops;
    ops.emplace("E0", make_complete({
        {"f", {{1, 0, 0}, {0, 2, 0}, {0, 0, 1}}},
        {"i", {{2, 0, -2}, {2, 0, 2}, {0, 2, 0}}},
        {"i", {{0, 1, 0}, {0, 0, 0}, {0, 0, 0}}},
    }));
    ops.emplace("E1", make_complete({
        {"f", {{1, 0, 0}, {1, 2, 0}, {0, 0, 1}}},
        {"i", {{2, -1, 0}, {1, 0, 2}, {1, 0, -2}}},
        {"i", {{1, 0, 0}, {0, 2, 0}, {0, 0, 0}}},
    }));
    ops.emplace("E$", make_complete({
        {"f", {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}},
        {"i", {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}}},
        {"i", {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}}},
    }));
    ops.emplace("E'0", make_complete({
        {"f", {{1, 0, 0}, {0, 1, 0}, {0, 0, 2}}},
        {"i", {{2, 2, 0}, {2, -2, 0}, {0, 0, 2}}},
        {"i", {{0, 0, 1}, {0, 0, 0}, {0, 0, 0}}},
    }));
    ops.emplace("E'1", make_complete({
        {"f", {{1, 0, 0}, {0, 1, 0}, {1, 0, 2}}},
        {"i", {{2, 0, -1}, {1, 2, 0}, {1, -2, 0}}},
        {"i", {{1, 0, 0}, {0, 0, 2}, {0, 0, 0}}},
    }));
    ops.emplace("E'$", make_complete({
        {"f", {{1, 0, 0}, {0, 1, -1}, {0, 0, 0}}},
        {"i", {{0, -1, 1}, {2, 1, -1}, {2, -1, 1}}},
        {"i", {{0, 2, 2}, {0, 0, 0}, {0, 0, 0}}},
        {"i", {{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}},
    }));
    ops.emplace("E''$", make_complete({
        {"f", {{1, 0, 0}, {0, 1, 0}, {0, 0, 0}}},
        {"i", {{2, -2, 0}, {2, 2, 0}, {0, 0, 3}}},
    }));
    ops.emplace("E#", make_complete({
        {"a", {{1, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
        {"r", {{0, 0, 0}, {0, 3, 0}, {0, 0, 0}}},
        {"i", {{2, 0, 0}, {2, 0, 0}, {0, 0, 3}}},
    }));
    return ops;
}

}  // namespace

const std::map<std::string, Superoperator>& subsetsum_ops() {
    static const std::map<std::string, Superoperator> ops = build_ops();
    return ops;
}

Ledger subsetsum_simulate(const SubsetSumInstance& inst, const std::vector<int>& selection) {
    const auto& ops = subsetsum_ops();
    Ledger led;
    Vector reg = initialize(3, Vector{1, 0, 0});

    auto apply = [&](const Superoperator& op) {
        ApplyResult res = superop_apply(op, reg);
        reg = Vector(3);
        for (const auto& out : res.outcomes) {
            if (out.label == "f") reg = out.state;
            else if (out.label == "a") led.p_accept += out.state.norm_squared();
            else if (out.label == "r") led.p_reject += out.state.norm_squared();
            else led.p_restart += out.state.norm_squared();
        }
        led.p_restart += res.restart_mass;  // zero here; all ops are complete
    };

    auto selected = [&](int i) {
        return std::find(selection.begin(), selection.end(), i) != selection.end();
    };

    size_t pos = 0;
    const std::string& w = inst.raw;
    // Part 2: encode S.
    for (; w[pos] != '$'; ++pos) apply(ops.at(w[pos] == '0' ? "E0" : "E1"));
    apply(ops.at("E$"));
    ++pos;
    // Parts 3-4: encode each a_i and subtract or discard it.
    for (int i = 1; pos < w.size(); ++i) {
        for (; w[pos] != '$'; ++pos) apply(ops.at(w[pos] == '0' ? "E'0" : "E'1"));
        apply(ops.at(selected(i) ? "E'$" : "E''$"));
        ++pos;
    }
    // Part 5: decide on the right #.
    apply(ops.at("E#"));
    return led;
}

SubsetSumSelectionReport subsetsum_report(const SubsetSumInstance& inst,
                                          const std::vector<int>& selection) {
    SubsetSumSelectionReport rep;
    rep.selection = selection;
    rep.selected_sum = 0;
    for (int i : selection) rep.selected_sum += inst.items.at(static_cast<size_t>(i - 1));
    rep.ledger = subsetsum_simulate(inst, selection);
    Rational denom = rep.ledger.p_accept + rep.ledger.p_reject;
    rep.overall = denom == 0 ? Rational(0) : rep.ledger.p_accept / denom;
    return rep;
}

std::pair<Rational, std::vector<int>> subsetsum_overall_acceptance(const SubsetSumInstance& inst) {
    int n = inst.n();
    Rational best = -1;
    std::vector<int> best_sel;
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
        std::vector<int> sel;
        for (int i = 0; i < n; ++i)
            if (mask & (1ul << i)) sel.push_back(i + 1);
        Rational overall = subsetsum_report(inst, sel).overall;
        if (overall > best) {
            best = overall;
            best_sel = sel;
        }
    }
    return {best, best_sel};
}

}  // namespace qam
