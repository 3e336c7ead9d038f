// qamlab: exact-rational simulators for qAM protocols, quantum alternation,
// the SUBSET-SUM verifier, interactive-proof trees and the halting bound.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qam/alternation.hpp"
#include "qam/halting.hpp"
#include "qam/ips_tree.hpp"
#include "qam/machine.hpp"
#include "qam/protocol.hpp"
#include "qam/report.hpp"
#include "qam/subset_sum.hpp"

using namespace qam;

namespace {

Json ledger_json(const Ledger& l) {
    Json j;
    j["p_accept"] = probability_json(l.p_accept);
    j["p_reject"] = probability_json(l.p_reject);
    j["p_restart"] = probability_json(l.p_restart);
    j["p_pending"] = probability_json(l.p_pending);
    return j;
}

Json vector_json(const Vector& v) {
    Json j = Json::array();
    for (int i = 0; i < v.dim(); ++i) j.push_back(to_fraction_string(v[i]));
    return j;
}

std::string command_echo(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += " ";
        s += argv[i];
    }
    return s;
}

void dump_witness(const std::string& name, const std::string& text) {
    const char* dir = std::getenv("QAMLAB_TRACE_DIR");
    if (!dir || !*dir) return;
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / name);
    out << text;
}

Json protocol_json(const ProtocolResult& res) {
    Json j;
    switch (res.kind) {
        case ProtocolOutcome::Exact:
            j["classification"] = "exact";
            j["overall"] = probability_json(res.overall);
            break;
        case ProtocolOutcome::Bounds:
            j["classification"] = "bounds";
            j["overall_lo"] = probability_json(res.lo);
            j["overall_hi"] = probability_json(res.hi);
            break;
        case ProtocolOutcome::NeverHalts:
            j["classification"] = "never-halts";
            break;
    }
    j["round_ledger"] = ledger_json(res.round.ledger);
    if (!res.round.defect.empty()) j["defect"] = res.round.defect;
    return j;
}

std::vector<Symbol> split_tokens(const std::string& s) {
    std::istringstream iss(s);
    std::vector<Symbol> out;
    for (Symbol tok; iss >> tok;) out.push_back(tok == "_" ? kBlank : tok);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact qAM / quantum-alternation laboratory"};
    app.require_subcommand(1);

    bool json_out = true, trace = false;
    int max_transcript = 0;
    app.add_flag("--json", json_out, "JSON output (default)");
    app.add_flag("--trace", trace, "include per-symbol traces / witness dumps");
    app.add_option("--max-transcript", max_transcript, "per-round symbol budget");

    // subset-sum
    auto* ss = app.add_subcommand("subset-sum", "exact SUBSET-SUM verifier");
    std::string ss_instance, ss_selection;
    bool ss_maximize = false;
    ss->add_option("instance", ss_instance, "instance S$a1$...$an$")->required();
    ss->add_option("--selection", ss_selection, "comma-separated 1-based item indices");
    ss->add_flag("--maximize", ss_maximize, "maximize over all selections");

    // dtm-protocol
    auto* dp = app.add_subcommand("dtm-protocol", "weak protocol for a DTM");
    std::string dp_machine, dp_input, dp_prover = "honest", dp_fabricated;
    int dp_block = 1, dp_position = 0, dp_delta = 1;
    dp->add_option("--machine", dp_machine)->required();
    dp->add_option("--input", dp_input);
    dp->add_option("--prover", dp_prover,
                   "honest|defect-digit|skip-config|premature-accept|silent");
    dp->add_option("--block", dp_block, "cheating prover: 1-based block index");
    dp->add_option("--position", dp_position, "defect-digit: symbol position");
    dp->add_option("--delta", dp_delta, "defect-digit: digit shift");
    dp->add_option("--fabricated", dp_fabricated,
                   "premature-accept: configuration tokens, space separated");

    // atm-protocol
    auto* ap = app.add_subcommand("atm-protocol", "strong protocol for a normal-form ATM");
    std::string ap_machine, ap_input, ap_prover = "honest";
    ap->add_option("--machine", ap_machine)->required();
    ap->add_option("--input", ap_input);
    ap->add_option("--prover", ap_prover, "honest|wrong-length");

    // q1afa
    auto* qa = app.add_subcommand("q1afa", "accepting-subtree search on the protocol automaton");
    std::string qa_machine, qa_input;
    int qa_depth = 64;
    qa->add_option("--machine", qa_machine)->required();
    qa->add_option("--input", qa_input);
    qa->add_option("--depth", qa_depth, "configuration-chain depth limit");

    // tree-eval
    auto* te = app.add_subcommand("tree-eval", "interactive-proof tree expansion and evaluation");
    std::string te_spec;
    bool te_oracle = false;
    te->add_option("--spec", te_spec)->required();
    te->add_flag("--oracle", te_oracle, "also run the strategy-enumeration oracle");

    // halting-bound
    auto* hb = app.add_subcommand("halting-bound", "absolute-halting index via vectorization");
    std::string hb_elements;
    hb->add_option("--elements", hb_elements)->required();

    CLI11_PARSE(app, argc, argv);

    Json report;
    report["command"] = command_echo(argc, argv);
    try {
        if (*ss) {
            auto inst = SubsetSumInstance::parse(ss_instance);
            report["instance"] = inst.raw;
            report["n"] = inst.n();
            if (ss_maximize || ss_selection.empty()) {
                auto [best, argmax] = subsetsum_overall_acceptance(inst);
                report["overall"] = probability_json(best);
                report["argmax_selection"] = argmax;
                if (trace) report["ledger"] = ledger_json(subsetsum_simulate(inst, argmax));
            } else {
                std::vector<int> sel;
                std::istringstream iss(ss_selection);
                for (std::string tok; std::getline(iss, tok, ',');)
                    if (!tok.empty() && tok != "none") sel.push_back(std::stoi(tok));
                auto rep = subsetsum_report(inst, sel);
                report["selection"] = rep.selection;
                report["selected_sum"] = rep.selected_sum.get_str();
                report["ledger"] = ledger_json(rep.ledger);
                report["overall"] = probability_json(rep.overall);
            }
        } else if (*dp) {
            auto spec = load_machine_file(dp_machine);
            auto vc = VerifierConfig::for_machine(spec, VerifierMode::Weak4State, dp_input,
                                                  max_transcript);
            ProverKind kind;
            if (dp_prover == "honest") kind = ProverKind::Honest;
            else if (dp_prover == "defect-digit") kind = ProverKind::DefectDigit;
            else if (dp_prover == "skip-config") kind = ProverKind::SkipConfig;
            else if (dp_prover == "premature-accept") kind = ProverKind::PrematureAccept;
            else if (dp_prover == "silent") kind = ProverKind::Silent;
            else throw std::invalid_argument("unknown prover kind: " + dp_prover);
            ProverParams params;
            params.block = dp_block;
            params.position = dp_position;
            params.delta = dp_delta;
            params.fabricated.symbols = split_tokens(dp_fabricated);
            auto prover = make_prover(spec, dp_input, kind, params);
            auto res = run_protocol(spec, vc, *prover, dp_input);
            report["mode"] = "weak";
            report["d"] = vc.d;
            report["m"] = vc.digit_map.base;
            report.update(protocol_json(res));
            if (trace) {
                auto round = run_round(spec, vc, *prover, dp_input, true);
                Json tr = Json::array();
                for (const auto& e : round.trace) {
                    Json t;
                    t["symbol"] = e.symbol;
                    t["op"] = e.op_label;
                    t["continue_mass"] = to_fraction_string(e.continue_mass);
                    t["decided_mass"] = to_fraction_string(e.decided_mass);
                    t["restart_mass"] = to_fraction_string(e.restart_mass);
                    tr.push_back(t);
                }
                report["trace"] = tr;
                dump_witness("dtm-protocol-trace.json", tr.dump(2));
            }
        } else if (*ap) {
            auto spec = load_machine_file(ap_machine);
            auto vc = VerifierConfig::for_machine(spec, VerifierMode::Strong5State, ap_input,
                                                  max_transcript);
            auto kind = StrongProverKind::Honest;
            if (ap_prover == "wrong-length") kind = StrongProverKind::WrongLength;
            else if (ap_prover != "honest")
                throw std::invalid_argument("unknown prover kind: " + ap_prover);
            auto prover = make_strong_prover(spec, ap_input, kind);
            auto res = run_strong_protocol(spec, vc, *prover, ap_input);
            report["mode"] = "strong";
            report["d"] = vc.d;
            report.update(protocol_json(res));
            if (trace) {
                auto round = run_strong_round(spec, vc, *prover, ap_input);
                Json paths = Json::array();
                for (const auto& p : round.paths) {
                    Json pj;
                    pj["branches"] = p.branches;
                    pj["weight"] = p.weight.get_str();
                    pj["coins"] = p.coins;
                    pj["accept_mass"] = to_fraction_string(p.accept_mass);
                    pj["reject_mass"] = to_fraction_string(p.reject_mass);
                    pj["pre_finalize"] = vector_json(p.pre_finalize);
                    paths.push_back(pj);
                }
                report["paths"] = paths;
                dump_witness("atm-protocol-paths.json", paths.dump(2));
            }
        } else if (*qa) {
            auto spec = load_machine_file(qa_machine);
            auto res = accepting_subtree_search(spec, qa_input, qa_depth);
            switch (res.outcome) {
                case SearchOutcome::Accepted: report["outcome"] = "Accepted"; break;
                case SearchOutcome::NoSubtreeWithinLimit:
                    report["outcome"] = "NoSubtreeWithinLimit";
                    break;
                case SearchOutcome::RejectCertificate:
                    report["outcome"] = "RejectCertificate";
                    report["reject_reason"] = res.reject_reason;
                    break;
            }
            if (res.outcome == SearchOutcome::Accepted) {
                Json blocks = Json::array();
                std::string flat;
                for (const auto& b : res.witness.blocks) {
                    blocks.push_back(b.str());
                    flat += b.str() + "\n";
                }
                report["witness_blocks"] = blocks;
                report["witness_leaf"] = res.witness.leaf;
                dump_witness("q1afa-witness.txt", flat + res.witness.leaf + "\n");
            }
        } else if (*te) {
            auto spec = load_ips_file(te_spec);
            auto tree = build_tree(spec);
            auto value = evaluate(tree);
            report["root_value"] = value.kind == TreeValue::True    ? "True"
                                   : value.kind == TreeValue::False ? "False"
                                                                    : "Loop";
            std::string text = serialize_tree(tree);
            if (trace) report["tree"] = text;
            dump_witness("tree-eval.txt", text);
            if (te_oracle) report["oracle_accepts"] = markov_strategy_oracle(spec);
        } else if (*hb) {
            auto sys = load_elements_file(hb_elements);
            auto hi = halting_index(sys);
            report["result"] = hi.halts ? "HaltsAt(" + std::to_string(hi.index) + ")"
                                        : "RunsForever";
            auto vs = vectorize(sys);
            report["kernel_chain"] = kernel_chain(vs.big_e);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    std::cout << report.dump(2) << "\n";
    return 0;
}
