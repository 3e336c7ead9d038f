#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qam/alternation.hpp"

using namespace qam;

TEST_CASE("qstep semantics") {
    auto machine = load_qatm_file(TEST_DATA_DIR "/qa1_coins.qatm");
    auto qc = machine.initial("ab");

    // deterministic start step keeps the register
    auto after_q1 = qstep(machine, qc);
    REQUIRE(after_q1.size() == 1);
    CHECK(after_q1[0].reg == qc.reg);

    // existential step: children share the register bitwise
    auto after_e1 = qstep(machine, after_q1[0]);
    REQUIRE(after_e1.size() == 2);
    CHECK(after_e1[0].reg == after_e1[1].reg);
    CHECK(after_e1[0].reg == qc.reg);
    CHECK(after_e1[0].classical != after_e1[1].classical);

    // universal coin step: both branches present, register halved
    auto after_u = qstep(machine, after_e1[0]);
    REQUIRE(after_u.size() == 2);
    Vector halved(2);
    halved[0] = qc.reg[0] / 2;
    halved[1] = qc.reg[1] / 2;
    CHECK(after_u[0].reg == halved);
    CHECK(after_u[1].reg == halved);
}

TEST_CASE("zero-probability universal branches are pruned") {
    auto machine = load_qatm_file(TEST_DATA_DIR "/qa2_pruned.qatm");
    // walk b b: q1 -> e1 -> u2; u2's second element annihilates the register
    auto qc = machine.initial("bb");
    qc = qstep(machine, qc)[0];           // q1 -> e1
    auto u2 = qstep(machine, qc)[0];      // e1 -> u2 (both branches identical)
    auto children = qstep(machine, u2);
    REQUIRE(children.size() == 1);        // rejecting branch pruned
    CHECK(children[0].reg == Vector{Rational(1), Rational(0)});
}

TEST_CASE("coin machine agrees with classical alternation") {
    auto machine = load_qatm_file(TEST_DATA_DIR "/qa1_coins.qatm");
    for (const std::string& x : {std::string("ab"), std::string("aa"), std::string("ba"),
                                 std::string("bb")}) {
        CAPTURE(x);
        bool classical = atm_accepts(machine.spec, initial_config(machine.spec, x));
        auto verdict = strong_eval(machine, x, 1 << 10);
        CHECK((verdict == StrongVerdict::Accept) == classical);
    }
}

TEST_CASE("pruning changes the recognized language") {
    auto machine = load_qatm_file(TEST_DATA_DIR "/qa2_pruned.qatm");
    CHECK_FALSE(atm_accepts(machine.spec, initial_config(machine.spec, "bb")));
    CHECK(strong_eval(machine, "bb", 1 << 10) == StrongVerdict::Accept);
    CHECK(strong_eval(machine, "ab", 1 << 10) == StrongVerdict::Accept);
}

TEST_CASE("accepting-subtree search on the protocol automaton") {
    auto dtm = load_machine_file(TEST_DATA_DIR "/d2_starts_a.tm");

    for (const std::string& x : {std::string("a"), std::string("ab"), std::string("aa")}) {
        CAPTURE(x);
        auto res = accepting_subtree_search(dtm, x, 64);
        REQUIRE(res.outcome == SearchOutcome::Accepted);
        // the witness is the honest chain and ends at an accepting leaf
        auto chain = honest_chain(dtm, x, 64);
        CHECK(res.witness.blocks == chain);
        CHECK(res.witness.leaf.rfind("accept", 0) == 0);
        // monotone in the depth limit
        CHECK(accepting_subtree_search(dtm, x, 128).outcome == SearchOutcome::Accepted);
    }

    for (const std::string& x : {std::string("b"), std::string("ba")}) {
        CAPTURE(x);
        auto res = accepting_subtree_search(dtm, x, 64);
        CHECK(res.outcome == SearchOutcome::RejectCertificate);
        CHECK_FALSE(res.reject_reason.empty());
    }
}

TEST_CASE("looping machine stays inconclusive at every finite depth") {
    auto dtm = load_machine_file(TEST_DATA_DIR "/d4_loop.tm");
    for (int depth : {4, 16, 48}) {
        auto res = accepting_subtree_search(dtm, "aa", depth);
        CHECK(res.outcome == SearchOutcome::NoSubtreeWithinLimit);
    }
}
