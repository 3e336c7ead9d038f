#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "qam/machine.hpp"

using namespace qam;

namespace {

MachineSpec parse(const std::string& text) {
    std::istringstream in(text);
    return parse_machine_file(in);
}

const char* kTinyDtm =
    "type: dtm\n"
    "states: q1 q2 qa qr\n"
    "tape_alphabet: _ a\n"
    "input_alphabet: a\n"
    "start: q1\naccept: qa\nreject: qr\n"
    "delta: q1 _ -> q2 _ R\n"
    "delta: q2 a -> qa a L\n"
    "delta: q2 _ -> qr _ L\n";

Configuration conf(std::initializer_list<Symbol> syms) {
    Configuration c;
    c.symbols = syms;
    return c;
}

}  // namespace

TEST_CASE("initial_config conventions") {
    auto dtm = parse(kTinyDtm);
    CHECK(initial_config(dtm, "a") == conf({"q1", "#", "a", "#"}));
    CHECK(initial_config(dtm, "") == conf({"q1", "#", "#"}));
    CHECK_THROWS_AS(initial_config(dtm, "z"), std::invalid_argument);

    auto atm = load_machine_file(TEST_DATA_DIR "/a1_exists_forall.tm");
    CHECK(initial_config(atm, "ab") == conf({"q1", "¢", "a", "b", "¢"}));
}

TEST_CASE("next_config hand examples") {
    auto dtm = parse(kTinyDtm);
    auto c0 = conf({"q1", "#", "a", "#"});
    auto c1 = next_config(dtm, c0);
    CHECK(c1 == conf({"#", "q2", "a", "#"}));
    auto c2 = next_config(dtm, c1);
    CHECK(c2 == conf({"qa", "#", "a", "#"}));
    CHECK(c2.is_halting(dtm));
    CHECK_THROWS_AS(next_config(dtm, c2), std::invalid_argument);
}

TEST_CASE("length changes stay within one symbol") {
    auto dtm = parse(kTinyDtm);
    for (const std::string& x : {std::string(""), std::string("a")}) {
        Configuration c = initial_config(dtm, x);
        while (!c.is_halting(dtm)) {
            Configuration n = next_config(dtm, c);
            int diff = n.length() - c.length();
            CHECK(diff >= -1);
            CHECK(diff <= 1);
            c = n;
        }
    }
}

TEST_CASE("base-m encoding reference value") {
    // Gamma' = {q1, qa, qr, 0, #}: digits 1..5 in declaration order, m = 6.
    auto spec = parse(
        "type: dtm\n"
        "states: q1 qa qr\n"
        "tape_alphabet: 0 _\n"
        "input_alphabet: 0\n"
        "start: q1\naccept: qa\nreject: qr\n"
        "delta: q1 _ -> qa _ R\n");
    auto dm = DigitMap::from_spec(spec);
    CHECK(dm.base == 6);
    CHECK(dm.digit_of("q1") == 1);
    CHECK(dm.digit_of("0") == 4);
    CHECK(dm.digit_of("#") == 5);
    CHECK(encode_config(conf({"q1", "#", "0", "#"}), dm) == 425);
    CHECK(encode_config(conf({"#"}), dm) == 5);

    // streaming identity: acc <- m*acc + digit
    Configuration c = conf({"q1", "#", "0", "#"});
    Integer acc = 0;
    for (const auto& s : c.symbols) acc = acc * dm.base + dm.digit_of(s);
    CHECK(acc == encode_config(c, dm));
}

TEST_CASE("successive encodings are congruent mod m") {
    auto dtm = load_machine_file(TEST_DATA_DIR "/d3_parity.tm");
    auto dm = DigitMap::from_spec(dtm);
    for (const std::string& x : {std::string("aa"), std::string("ab"), std::string("bba")}) {
        // every protocol configuration ends in the blank, so encode(next(c_i))
        // and encode(c_{i+1}) agree mod m; a mismatch therefore costs >= m
        Configuration c = initial_config(dtm, x);
        while (!c.is_halting(dtm)) {
            Configuration n = next_config(dtm, c);
            Integer e = encode_config(n, dm);
            CHECK(e % dm.base == dm.digit_of("#"));
            // corrupting any non-final symbol keeps the congruence class, so
            // the gap to the true successor is at least m
            for (int pos = 0; pos + 1 < n.length(); ++pos) {
                for (const Symbol& alt : {Symbol("a"), Symbol("b"), Symbol("#")}) {
                    if (n.symbols[static_cast<size_t>(pos)] == alt) continue;
                    Configuration bad = n;
                    bad.symbols[static_cast<size_t>(pos)] = alt;
                    Integer eb = encode_config(bad, dm);
                    CHECK(abs(eb - e) >= dm.base);
                }
            }
            c = n;
        }
    }
}

TEST_CASE("normal-form validation") {
    auto atm = load_machine_file(TEST_DATA_DIR "/a1_exists_forall.tm");
    CHECK(validate_normal_form(atm).empty());

    // cent overwritten
    auto bad1 = parse(
        "type: atm\n"
        "states: q1 e1 wa qa qr\n"
        "tape_alphabet: _ ¢ a\n"
        "input_alphabet: a\n"
        "start: q1\naccept: qa\nreject: qr\n"
        "labels: q1 deterministic e1 existential wa deterministic\n"
        "delta: q1 ¢ -> e1 a R\n"
        "branch: e1 a -> (wa a R | wa a R)\n"
        "delta: wa a -> wa a R\n"
        "delta: wa ¢ -> qa ¢ L\n");
    CHECK_FALSE(validate_normal_form(bad1).empty());

    // two consecutive existential branchings
    auto bad2 = parse(
        "type: atm\n"
        "states: q1 e1 e2 wa qa qr\n"
        "tape_alphabet: _ ¢ a\n"
        "input_alphabet: a\n"
        "start: q1\naccept: qa\nreject: qr\n"
        "labels: q1 deterministic e1 existential e2 existential wa deterministic\n"
        "delta: q1 ¢ -> e1 ¢ R\n"
        "branch: e1 a -> (e2 a R | e2 a R)\n"
        "branch: e2 ¢ -> (qa ¢ L | qa ¢ L)\n");
    CHECK_FALSE(validate_normal_form(bad2).empty());
}

TEST_CASE("determinism and battery files parse") {
    for (const char* f : {"/d1_accept_all.tm", "/d2_starts_a.tm", "/d3_parity.tm",
                          "/d4_loop.tm", "/a1_exists_forall.tm"}) {
        auto spec = load_machine_file(std::string(TEST_DATA_DIR) + f);
        spec.validate();
    }
    auto dtm = load_machine_file(TEST_DATA_DIR "/d1_accept_all.tm");
    auto c = initial_config(dtm, "ab");
    CHECK(next_config(dtm, c) == next_config(dtm, c));
}

TEST_CASE("classical alternating evaluation on the toy ATM") {
    auto atm = load_machine_file(TEST_DATA_DIR "/a1_exists_forall.tm");
    CHECK(atm_accepts(atm, initial_config(atm, "ab")));
    CHECK(atm_accepts(atm, initial_config(atm, "aa")));
    CHECK_FALSE(atm_accepts(atm, initial_config(atm, "ba")));
    CHECK_FALSE(atm_accepts(atm, initial_config(atm, "bb")));
}
