#pragma once

#include <map>
#include <string>
#include <vector>

#include "qam/linalg.hpp"
#include "qam/machine.hpp"
#include "qam/protocol.hpp"

namespace qam {

// A machine snapshot paired with the unconditional register vector. Zero
// registers never appear as live configurations (they are pruned).
struct QConfig {
    Configuration classical;
    Vector reg;

    bool operator==(const QConfig&) const = default;
};

// An alternating machine whose universal branches are driven by
// superoperator outcomes. Existential steps change only the classical part.
struct GenericQATM {
    MachineSpec spec;
    Vector init_register;
    // Universal (or deterministic) state -> superoperator whose element
    // labels "0", "1", ... name the classical branch taken on that outcome.
    std::map<Symbol, Superoperator> superops;

    QConfig initial(const std::string& input) const;
};

// One alternating step: existential children share the register; universal
// children pair superoperator outcome i with classical branch i, outcomes of
// exactly zero probability pruned. Deterministic states without a bound
// superoperator keep the register unchanged.
std::vector<QConfig> qstep(const GenericQATM& machine, const QConfig& qc);

enum class SearchOutcome { Accepted, NoSubtreeWithinLimit, RejectCertificate };

struct SubtreeWitness {
    // The prover messages along the single continuing path; every universal
    // node on it additionally carries its restart outcomes as accept leaves.
    std::vector<Configuration> blocks;
    std::string leaf;
};

struct SearchResult {
    SearchOutcome outcome = SearchOutcome::NoSubtreeWithinLimit;
    SubtreeWitness witness;      // set when Accepted
    std::string reject_reason;   // set when RejectCertificate
};

// The q-1AFA obtained from the weak verifier of a DTM: prover messages are
// existential, verifier outcomes universal, and restart outcomes terminate
// with acceptance instead of starting a new round. A message other than the
// unique defect-free continuation puts nonzero mass on the reject outcome,
// so the search only follows the honest chain.
SearchResult accepting_subtree_search(const MachineSpec& dtm, const std::string& input,
                                      int depth_limit);

enum class StrongVerdict { Accept, Reject };

// Memoized AND-OR evaluation of a generic qATM; requires the machine to halt
// on every path within depth_limit (a revisited configuration on a path is
// an error for certified-halting machines and evaluates as reject).
StrongVerdict strong_eval(const GenericQATM& machine, const std::string& input, int depth_limit);

// Machine-spec format extended with register/superop lines:
//   register: 1/1 0/1           (initial register; fixes the dimension)
//   superop: u1 0 1/2 0 0 1/2   (state, branch outcome, row-major entries)
GenericQATM parse_qatm_file(std::istream& in);
GenericQATM load_qatm_file(const std::string& path);

}  // namespace qam
