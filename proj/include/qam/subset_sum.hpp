#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qam/linalg.hpp"
#include "qam/protocol.hpp"

namespace qam {

// An instance string S$a1$...$an$ with S and the a_i in binary, n >= 1.
struct SubsetSumInstance {
    std::string raw;
    Integer target;               // S
    std::vector<Integer> items;   // a_1 ... a_n

    int n() const { return static_cast<int>(items.size()); }

    // Throws std::invalid_argument("malformed instance") when the string does
    // not match the required form; nothing quantum happens in that case.
    static SubsetSumInstance parse(const std::string& raw);
};

// The eight 3x3 superoperator families, keyed "E0", "E1", "E$", "E'0", "E'1",
// "E'$", "E''$", "E#". All are complete (gram_sum = I; no implicit restart).
const std::map<std::string, Superoperator>& subsetsum_ops();

// One round against the fixed subset `selection` (1-based item indices).
// Outcome bookkeeping: f continues the scan, a/r decide, i restarts.
Ledger subsetsum_simulate(const SubsetSumInstance& inst, const std::vector<int>& selection);

struct SubsetSumSelectionReport {
    std::vector<int> selection;
    Integer selected_sum;  // T
    Ledger ledger;
    Rational overall;  // p_accept / (p_accept + p_reject)
};

SubsetSumSelectionReport subsetsum_report(const SubsetSumInstance& inst,
                                          const std::vector<int>& selection);

// Exhaustive maximization over all 2^n subsets.
std::pair<Rational, std::vector<int>> subsetsum_overall_acceptance(const SubsetSumInstance& inst);

}  // namespace qam
