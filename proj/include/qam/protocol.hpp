#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qam/linalg.hpp"
#include "qam/machine.hpp"

namespace qam {

enum class VerifierMode { Weak4State, Strong5State };

// Smallest integer d such that every operator family the verifier can apply
// for this machine (all digit combinations, all length cases, the finalize
// pair, and the strong-mode coin) has PSD slack after 1/d scaling.
int choose_protocol_d(const MachineSpec& spec, VerifierMode mode);

struct VerifierConfig {
    VerifierMode mode = VerifierMode::Weak4State;
    DigitMap digit_map;
    int d = 2;
    // Strong mode: expected tape length including the endmarkers (|x| + 2).
    // The configuration string is one longer (it carries the state symbol).
    std::optional<int> length_check;
    int max_transcript = 0;  // symbol budget per round

    // Defaults max_transcript to 4x the honest transcript length (capped for
    // machines that never halt).
    static VerifierConfig for_machine(const MachineSpec& spec, VerifierMode mode,
                                      const std::string& input, int max_transcript = 0);
};

struct Ledger {
    Rational p_accept = 0;
    Rational p_reject = 0;
    Rational p_restart = 0;
    Rational p_pending = 0;

    Rational total() const { return p_accept + p_reject + p_restart + p_pending; }
};

// Emits the digits of next(c) while being fed the symbols of c one at a
// time, using only a 3-symbol window. Feed every symbol, then call finish().
class StreamSuccessor {
  public:
    StreamSuccessor(const MachineSpec& spec, const DigitMap& dm);

    // Returns the digits of next(c) that became determined by this symbol.
    std::vector<int> feed(const Symbol& s);
    // Flushes the tail, applying the boundary blank normalization.
    std::vector<int> finish();

  private:
    void emit(const Symbol& s);
    void process_center();

    const MachineSpec& spec_;
    const DigitMap& dm_;
    std::vector<Symbol> window_;  // up to the last 3 symbols received
    int received_ = 0;
    bool skip_next_ = false;      // center position already produced by the transition
    bool withheld_ = false;       // center's output deferred (right neighbor is the state)
    int moved_right_to_ = -1;     // position the state moved onto, if the move was R
    bool leading_checked_ = false;
    std::vector<Symbol> holdback_;
    std::vector<int> out_;
};

// A prover strategy for the weak protocol: a deterministic function of the
// within-round public history (the symbols it has sent so far this round).
class Prover {
  public:
    virtual ~Prover() = default;
    virtual Symbol next_symbol(const std::vector<Symbol>& history) = 0;
};

enum class ProverKind { Honest, DefectDigit, SkipConfig, PrematureAccept, Silent };

struct ProverParams {
    int block = 0;     // DefectDigit/SkipConfig: 1-based configuration index
    int position = 0;  // DefectDigit: 0-based symbol position within the block
    int delta = 1;     // DefectDigit: digit shift applied at that position
    Configuration fabricated;  // PrematureAccept: the configuration sent as c2
};

std::unique_ptr<Prover> make_prover(const MachineSpec& spec, const std::string& input,
                                    ProverKind kind, ProverParams params = {});

// c_1, c_2, ... up to (and including) the first c_t with next(c_t) halting,
// or max_blocks configurations if the machine runs longer.
std::vector<Configuration> honest_chain(const MachineSpec& spec, const std::string& input,
                                        int max_blocks);

struct BlockRecord {
    Configuration config;
    int l = 0;            // running transcript length through this block's $$
    Vector after_block;   // register after the block's second $ (block 1 checkpoint)
    Vector pre_finalize;  // register just before the second $ (blocks >= 2)
};

struct TraceEntry {
    std::string symbol;
    std::string op_label;
    Rational continue_mass;
    Rational decided_mass;
    Rational restart_mass;
};

struct RoundResult {
    Ledger ledger;
    std::vector<BlockRecord> blocks;
    bool decided = false;
    bool deterministic_reject = false;
    std::string defect;  // which check failed, if any
    std::vector<TraceEntry> trace;
};

RoundResult run_round(const MachineSpec& spec, const VerifierConfig& vc, Prover& prover,
                      const std::string& input, bool collect_trace = false);

enum class ProtocolOutcome { Exact, Bounds, NeverHalts };

struct ProtocolResult {
    ProtocolOutcome kind = ProtocolOutcome::Exact;
    Rational overall = 0;  // Exact mode
    Rational lo = 0, hi = 0;
    RoundResult round;
};

// Provers here are within-round stationary, so one round plus the geometric
// restart series gives the overall acceptance in closed form.
ProtocolResult run_protocol(const MachineSpec& spec, const VerifierConfig& vc, Prover& prover,
                            const std::string& input);

// --- Strong protocol (5-state register, branch exchanges) ---

struct ExchangeEvent {
    Symbol prover_choice;  // "l" or "r"
    Symbol coin;           // the verifier outcome on this path
};

// The strong-protocol prover supplies the next configuration before each
// branch exchange, then its l/r choice. Both may depend on earlier exchanges
// (in particular on coin outcomes at universal configurations), but must
// ignore the coin at existential and deterministic ones.
class StrongProver {
  public:
    virtual ~StrongProver() = default;
    virtual std::vector<Symbol> next_block(const std::vector<ExchangeEvent>& past) = 0;
    virtual Symbol choice(const std::vector<ExchangeEvent>& past) = 0;
};

enum class StrongProverKind { Honest, WrongLength };

std::unique_ptr<StrongProver> make_strong_prover(const MachineSpec& spec, const std::string& input,
                                                 StrongProverKind kind);

struct StrongPath {
    int branches = 0;  // branching exchanges survived on this path
    Integer weight = 1;
    std::vector<Symbol> coins;
    Vector pre_finalize;  // register just before the deciding second $
    Rational accept_mass = 0;
    Rational reject_mass = 0;
    bool decided = false;
};

struct StrongRoundResult {
    Ledger ledger;
    std::vector<StrongPath> paths;
};

StrongRoundResult run_strong_round(const MachineSpec& spec, const VerifierConfig& vc,
                                   StrongProver& prover, const std::string& input);

ProtocolResult run_strong_protocol(const MachineSpec& spec, const VerifierConfig& vc,
                                   StrongProver& prover, const std::string& input);

}  // namespace qam
