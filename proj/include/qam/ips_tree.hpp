#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qam/rational.hpp"

namespace qam {

enum class ConfigClass { Read, Comm0, Comm1, Acc, Rej };

// One verifier configuration: read configurations carry one or two coin
// children, communication configurations exactly two response children
// (prover answer 0, prover answer 1), halting ones none.
struct IPSConfig {
    std::string name;
    ConfigClass cls = ConfigClass::Read;
    std::vector<std::string> children;
};

struct IPSVerifierSpec {
    std::map<std::string, IPSConfig> configs;
    std::string initial;

    const IPSConfig& at(const std::string& name) const;
    void validate() const;  // throws std::invalid_argument on inconsistency
};

// Spec file: lines `config: name class [children...]` with class one of
// read/comm-0/comm-1/acc/rej, plus one `initial: name` line; // comments.
IPSVerifierSpec parse_ips_file(std::istream& in);
IPSVerifierSpec load_ips_file(const std::string& path);

enum class NodeKind { ReadComm, Comm01, Comm0, Comm1, Acc, Rej, Loop };

struct TreeNode {
    NodeKind kind = NodeKind::Acc;
    std::vector<std::string> config_subset;  // sorted, nonempty
    int depth = 0;
    int loop_depth = -1;  // Loop leaves: the smallest depth of the repeated node
    std::vector<TreeNode> children;
};

// Expands the tree from the initial configuration. A would-be inner node
// whose subset already occurred on the path collapses to a LOOP leaf (the
// repetition the depth cap 2^|C| guarantees, detected as soon as it occurs);
// the literal cap still applies as a backstop.
TreeNode build_tree(const IPSVerifierSpec& spec);

struct TreeValue {
    enum Kind { True, False, Loop } kind = False;
    int depth = 0;  // Loop only

    bool operator==(const TreeValue&) const = default;
    static TreeValue truth() { return {True, 0}; }
    static TreeValue falsity() { return {False, 0}; }
    static TreeValue loop(int d) { return {Loop, d}; }
};

TreeValue and_combine(const TreeValue& v1, const TreeValue& v2);
TreeValue or_combine(const TreeValue& v1, const TreeValue& v2);

// Right-nested fold per node, then the self-reference rule: a loop value
// whose depth refers to the node itself becomes false.
TreeValue evaluate(const TreeNode& root);

// Indented text form used for golden-file comparisons.
std::string serialize_tree(const TreeNode& root);

// Independent oracle: enumerate deterministic prover strategies (one fixed
// response per communication node of the subset graph) and solve each
// induced absorbing Markov chain exactly; true iff some strategy reaches an
// accepting configuration with probability exactly 1.
bool markov_strategy_oracle(const IPSVerifierSpec& spec);

}  // namespace qam
