#include "qam/protocol.hpp"

#include <algorithm>
#include <stdexcept>

namespace qam {

namespace {

// --- Weak-protocol matrix families (unscaled; the engine applies 1/d). ---

// Block 1: append a digit of next(c1) to the q2 amplitude.
Matrix b1_encode(int m, int digit) {
    return Matrix::from_rows({{1, 0, 0, 0}, {digit, m, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
}

// Keep q1 and q2 (block-1 filler positions and the non-deciding second $).
Matrix b1_copy() {
    return Matrix::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
}

// Blocks i >= 2: rows 3 and 4 accumulate c_i and next(c_i); a row of
// (digit,0,m,0) / (digit,0,0,m) appends, (0,0,1,0) / (0,0,0,1) keeps.
Matrix bi_op(int m, std::optional<int> c_digit, std::optional<int> next_digit) {
    std::vector<Rational> row3 =
        c_digit ? std::vector<Rational>{*c_digit, 0, m, 0} : std::vector<Rational>{0, 0, 1, 0};
    std::vector<Rational> row4 =
        next_digit ? std::vector<Rational>{*next_digit, 0, 0, m} : std::vector<Rational>{0, 0, 0, 1};
    return Matrix::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, row3, row4});
}

// Finalize: subtract the q2 and q3 amplitudes (the successor-check reject).
Matrix subtract_matrix() {
    return Matrix::from_rows({{0, 0, 0, 0}, {0, 1, -1, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
}

// Finalize when next(c_i) halts: select the q1 amplitude.
Matrix select_matrix() {
    return Matrix::from_rows({{1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
}

// Finalize otherwise: keep q1, move next(c_i) from q4 to q2.
Matrix continue_matrix() {
    return Matrix::from_rows({{1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}, {0, 0, 0, 0}});
}

// 5-state embedding for the strong protocol. Round-continuing operators keep
// the q5 amplitude alive; terminating elements drop it.
Matrix embed5(const Matrix& m4, bool keep_q5) {
    Matrix out(5, 5);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out.at(r, c) = m4.at(r, c);
    if (keep_q5) out.at(4, 4) = 1;
    return out;
}

// Strong-mode accept element: select the q5 amplitude.
Matrix select_q5_matrix() {
    Matrix out(5, 5);
    out.at(0, 4) = 1;
    return out;
}

Matrix coin_damped_matrix() {
    Matrix out = Matrix::identity(5);
    out.at(4, 4) = Rational(1, 2);
    return out;
}

// One unscaled matrix per transcript symbol of c$ (the |c| configuration
// symbols and the first $); the second $ is handled by the caller.
std::vector<Matrix> block_operators(const DigitMap& dm, const Configuration& c,
                                    const Configuration& next_c, bool first_block) {
    int m = dm.base;
    int L = c.length();
    int Ln = next_c.length();
    auto cd = [&](int j) { return dm.digit_of(c.symbols[static_cast<size_t>(j)]); };
    auto nd = [&](int j) { return dm.digit_of(next_c.symbols[static_cast<size_t>(j)]); };

    std::vector<Matrix> ops;
    for (int j = 0; j + 1 < L; ++j)
        ops.push_back(first_block ? b1_encode(m, nd(j)) : bi_op(m, cd(j), nd(j)));
    // Positions |c| and |c$|: the three length cases.
    if (first_block) {
        ops.push_back(Ln >= L ? b1_encode(m, nd(L - 1)) : b1_copy());
        ops.push_back(Ln == L + 1 ? b1_encode(m, nd(L)) : b1_copy());
    } else {
        ops.push_back(bi_op(m, cd(L - 1), Ln >= L ? std::optional<int>(nd(L - 1)) : std::nullopt));
        ops.push_back(bi_op(m, std::nullopt,
                            Ln == L + 1 ? std::optional<int>(nd(L)) : std::nullopt));
    }
    return ops;
}

std::string config_format_violation(const MachineSpec& spec, const Configuration& c) {
    int states = 0;
    for (const auto& s : c.symbols) {
        if (spec.is_state(s)) ++states;
        else if (!spec.is_tape_symbol(s)) return "symbol outside the configuration alphabet";
    }
    if (states != 1) return "configuration must contain exactly one state symbol";
    if (c.length() < 3) return "configuration too short";
    Symbol delim = (spec.kind == MachineKind::ATM) ? kCent : kBlank;
    // uqv with uv delimited on both sides.
    std::vector<Symbol> uv;
    for (const auto& s : c.symbols)
        if (!spec.is_state(s)) uv.push_back(s);
    if (uv.front() != delim || uv.back() != delim) return "tape content is not properly delimited";
    if (spec.kind == MachineKind::ATM) {
        for (size_t i = 1; i + 1 < uv.size(); ++i)
            if (uv[i] == kCent) return "endmarker appears inside the tape content";
    }
    return "";
}

}  // namespace

int choose_protocol_d(const MachineSpec& spec, VerifierMode mode) {
    int m = static_cast<int>(spec.config_alphabet_size()) + 1;
    std::vector<std::vector<Matrix>> families;
    for (int n = 0; n < m; ++n) families.push_back({b1_encode(m, n)});
    families.push_back({b1_copy()});
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            families.push_back({bi_op(m, a, b)});
            families.push_back({bi_op(m, a, std::nullopt)});
            families.push_back({bi_op(m, std::nullopt, b)});
        }
    families.push_back({bi_op(m, std::nullopt, std::nullopt)});
    families.push_back({subtract_matrix(), select_matrix()});
    families.push_back({subtract_matrix(), continue_matrix()});
    families.push_back({select_matrix()});
    if (mode == VerifierMode::Strong5State) {
        std::vector<std::vector<Matrix>> embedded;
        for (const auto& fam : families) {
            std::vector<Matrix> e5;
            for (const auto& mat : fam) {
                // Terminating elements (subtract/select) drop q5.
                bool keep = !(mat == subtract_matrix() || mat == select_matrix());
                e5.push_back(embed5(mat, keep));
            }
            embedded.push_back(std::move(e5));
        }
        embedded.push_back({coin_damped_matrix(), coin_damped_matrix()});
        embedded.push_back({Matrix::identity(5), Matrix::identity(5)});
        embedded.push_back({select_q5_matrix(), embed5(subtract_matrix(), false)});
        families = std::move(embedded);
    }
    int d = 2;
    for (const auto& fam : families) d = std::max(d, choose_scale_d(fam));
    return d;
}

VerifierConfig VerifierConfig::for_machine(const MachineSpec& spec, VerifierMode mode,
                                           const std::string& input, int max_transcript) {
    VerifierConfig vc;
    vc.mode = mode;
    vc.digit_map = DigitMap::from_spec(spec);
    vc.d = choose_protocol_d(spec, mode);
    if (mode == VerifierMode::Strong5State)
        vc.length_check = static_cast<int>(input.size()) + 2;
    if (max_transcript > 0) {
        vc.max_transcript = max_transcript;
    } else {
        int len = 0;
        for (const auto& c : honest_chain(spec, input, 256)) len += c.length() + 3;
        vc.max_transcript = 4 * len;
    }
    return vc;
}

// --- Streaming successor ---

StreamSuccessor::StreamSuccessor(const MachineSpec& spec, const DigitMap& dm)
    : spec_(spec), dm_(dm) {}

void StreamSuccessor::emit(const Symbol& s) {
    holdback_.push_back(s);
    if (!leading_checked_ && holdback_.size() == 2) {
        leading_checked_ = true;
        if (holdback_[0] == kBlank && holdback_[1] == kBlank) holdback_.erase(holdback_.begin());
    }
    while (holdback_.size() > 2) {
        out_.push_back(dm_.digit_of(holdback_.front()));
        holdback_.erase(holdback_.begin());
    }
}

void StreamSuccessor::process_center() {
    int j = received_ - 2;  // position of the center symbol in c
    size_t k = window_.size() - 2;
    const Symbol& center = window_[k];
    const Symbol& right = window_[k + 1];
    if (skip_next_) {
        skip_next_ = false;
        return;
    }
    if (spec_.is_state(right)) {
        withheld_ = true;  // center's successor symbol depends on the move
        return;
    }
    if (spec_.is_state(center)) {
        auto it = spec_.delta.find({center, right});
        if (it == spec_.delta.end())
            throw std::invalid_argument("no transition for the streamed configuration");
        const Transition& t = it->second[0];
        if (t.move == Move::Right) {
            if (withheld_) {
                emit(window_[k - 1]);
                withheld_ = false;
            }
            emit(t.write);
            emit(t.next_state);
            moved_right_to_ = j + 1;
        } else {
            if (j < 1) throw std::invalid_argument("head would leave the tape on a left move");
            emit(t.next_state);
            withheld_ = false;
            emit(window_[k - 1]);
            emit(t.write);
        }
        skip_next_ = true;
        return;
    }
    emit(center);
}

std::vector<int> StreamSuccessor::feed(const Symbol& s) {
    out_.clear();
    window_.push_back(s);
    if (window_.size() > 3) window_.erase(window_.begin());
    ++received_;
    if (received_ >= 2) process_center();
    return out_;
}

std::vector<int> StreamSuccessor::finish() {
    out_.clear();
    if (skip_next_) {
        skip_next_ = false;
    } else {
        if (received_ == 0) return out_;
        const Symbol& last = window_.back();
        if (spec_.is_state(last))
            throw std::invalid_argument("configuration ends with a state symbol");
        emit(last);
    }
    if (moved_right_to_ == received_ - 1) emit(kBlank);  // head moved past the right frontier
    if (holdback_.size() >= 2 && holdback_[holdback_.size() - 1] == kBlank &&
        holdback_[holdback_.size() - 2] == kBlank)
        holdback_.pop_back();
    for (const auto& s : holdback_) out_.push_back(dm_.digit_of(s));
    holdback_.clear();
    return out_;
}

// --- Provers ---

std::vector<Configuration> honest_chain(const MachineSpec& spec, const std::string& input,
                                        int max_blocks) {
    std::vector<Configuration> chain;
    Configuration c = initial_config(spec, input);
    for (int i = 0; i < max_blocks; ++i) {
        chain.push_back(c);
        Configuration n = next_config(spec, c);
        if (n.is_halting(spec)) break;
        c = n;
    }
    return chain;
}

namespace {

class TranscriptProver final : public Prover {
  public:
    explicit TranscriptProver(std::vector<Symbol> transcript)
        : transcript_(std::move(transcript)) {}

    Symbol next_symbol(const std::vector<Symbol>& history) override {
        size_t i = history.size();
        return i < transcript_.size() ? transcript_[i] : kBlank;
    }

  private:
    std::vector<Symbol> transcript_;
};

void append_block(std::vector<Symbol>& transcript, const Configuration& c) {
    transcript.insert(transcript.end(), c.symbols.begin(), c.symbols.end());
    transcript.push_back(kDollar);
    transcript.push_back(kDollar);
}

std::vector<Symbol> chain_transcript(const std::vector<Configuration>& chain) {
    std::vector<Symbol> t;
    for (const auto& c : chain) append_block(t, c);
    return t;
}

// Continue the computation from an arbitrary (possibly corrupted) configuration.
std::vector<Configuration> chain_from(const MachineSpec& spec, Configuration c, int max_blocks) {
    std::vector<Configuration> chain;
    for (int i = 0; i < max_blocks; ++i) {
        chain.push_back(c);
        if (c.is_halting(spec)) break;
        Configuration n = next_config(spec, c);
        if (n.is_halting(spec)) break;
        c = n;
    }
    return chain;
}

}  // namespace

std::unique_ptr<Prover> make_prover(const MachineSpec& spec, const std::string& input,
                                    ProverKind kind, ProverParams params) {
    constexpr int kChainCap = 256;
    auto honest = honest_chain(spec, input, kChainCap);
    std::vector<Symbol> transcript;
    switch (kind) {
        case ProverKind::Honest:
            transcript = chain_transcript(honest);
            break;
        case ProverKind::Silent:
            append_block(transcript, honest.front());
            break;
        case ProverKind::SkipConfig: {
            if (params.block < 1 || params.block > static_cast<int>(honest.size()))
                throw std::invalid_argument("SkipConfig block index out of range");
            auto chain = honest;
            chain.erase(chain.begin() + (params.block - 1));
            transcript = chain_transcript(chain);
            break;
        }
        case ProverKind::DefectDigit: {
            if (params.block < 1 || params.block > static_cast<int>(honest.size()))
                throw std::invalid_argument("DefectDigit block index out of range");
            Configuration corrupted = honest[static_cast<size_t>(params.block - 1)];
            auto& sym = corrupted.symbols.at(static_cast<size_t>(params.position));
            if (!spec.is_tape_symbol(sym))
                throw std::invalid_argument("DefectDigit must target a tape symbol");
            // Shift within the tape alphabet so the result is still a
            // well-formed configuration.
            auto it = std::find(spec.tape_alphabet.begin(), spec.tape_alphabet.end(), sym);
            size_t idx = static_cast<size_t>(it - spec.tape_alphabet.begin());
            size_t n = spec.tape_alphabet.size();
            size_t shift = ((static_cast<long>(params.delta) % static_cast<long>(n)) +
                            static_cast<long>(n)) % static_cast<long>(n);
            if (shift == 0) shift = 1;
            sym = spec.tape_alphabet[(idx + shift) % n];
            std::vector<Configuration> chain(honest.begin(),
                                             honest.begin() + (params.block - 1));
            for (const auto& c : chain_from(spec, corrupted, kChainCap)) chain.push_back(c);
            transcript = chain_transcript(chain);
            break;
        }
        case ProverKind::PrematureAccept: {
            append_block(transcript, honest.front());
            append_block(transcript, params.fabricated);
            break;
        }
    }
    return std::make_unique<TranscriptProver>(std::move(transcript));
}

// --- Weak round engine ---

RoundResult run_round(const MachineSpec& spec, const VerifierConfig& vc, Prover& prover,
                      const std::string& input, bool collect_trace) {
    if (vc.mode != VerifierMode::Weak4State)
        throw std::invalid_argument("run_round drives the weak 4-state protocol");
    const DigitMap& dm = vc.digit_map;
    Rational invd(1, vc.d);

    RoundResult res;
    Ledger& led = res.ledger;
    Vector reg{1, 0, 0, 0};
    std::vector<Symbol> history;
    int consumed = 0;
    const Configuration expected_c1 = initial_config(spec, input);
    int l = 0;
    int block_index = 0;

    auto det_reject = [&](const std::string& why) {
        led.p_reject += reg.norm_squared();
        reg = Vector(4);
        res.decided = true;
        res.deterministic_reject = true;
        res.defect = why;
    };
    auto apply_single = [&](const Matrix& unscaled, const Symbol& sym, const char* label) {
        Rational before = reg.norm_squared();
        reg = unscaled.scaled(invd) * reg;
        Rational after = reg.norm_squared();
        led.p_restart += before - after;
        if (collect_trace) res.trace.push_back({sym.c_str(), label, after, 0, before - after});
    };

    while (true) {
        ++block_index;
        std::vector<Symbol> block;
        while (true) {
            if (consumed >= vc.max_transcript) {
                led.p_pending = reg.norm_squared();
                return res;
            }
            Symbol s = prover.next_symbol(history);
            history.push_back(s);
            ++consumed;
            if (s == kDollar) break;
            if (!spec.is_state(s) && !spec.is_tape_symbol(s)) {
                det_reject("P1: symbol outside the configuration alphabet");
                return res;
            }
            block.push_back(s);
        }
        if (consumed >= vc.max_transcript) {
            led.p_pending = reg.norm_squared();
            return res;
        }
        {
            Symbol s = prover.next_symbol(history);
            history.push_back(s);
            ++consumed;
            if (s != kDollar) {
                det_reject("P1: configurations must be terminated by $$");
                return res;
            }
        }

        Configuration c{block};
        if (std::string v = config_format_violation(spec, c); !v.empty()) {
            det_reject("P1: " + v);
            return res;
        }
        if (block_index == 1 && !(c == expected_c1)) {
            det_reject("P2: first configuration is not the initial configuration");
            return res;
        }
        if (vc.length_check && c.length() != *vc.length_check + 1) {
            det_reject("P4: configuration length mismatch");
            return res;
        }
        if (c.is_halting(spec)) {
            det_reject("P1: prover sent a halting configuration");
            return res;
        }
        Configuration next_c;
        try {
            next_c = next_config(spec, c);
        } catch (const std::exception&) {
            det_reject("P1: configuration has no successor");
            return res;
        }

        l += c.length() + 2;
        BlockRecord rec;
        rec.config = c;
        rec.l = l;

        for (size_t j = 0; const Matrix& op : block_operators(dm, c, next_c, block_index == 1)) {
            apply_single(op, j < block.size() ? block[j] : kDollar, "encode");
            ++j;
        }
        rec.pre_finalize = reg;

        bool halting_next = next_c.is_halting(spec);
        if (block_index == 1 && !halting_next) {
            apply_single(b1_copy(), kDollar, "copy");
            rec.after_block = reg;
            res.blocks.push_back(std::move(rec));
            continue;
        }

        // Finalize superoperator at the second $.
        Rational before = reg.norm_squared();
        Rational reject_mass = 0;
        if (block_index >= 2) {
            Vector rej = subtract_matrix().scaled(invd) * reg;
            reject_mass = rej.norm_squared();
            led.p_reject += reject_mass;
        }
        if (halting_next) {
            Vector sel = select_matrix().scaled(invd) * reg;
            Rational mass = sel.norm_squared();
            bool accepts = next_c.state(spec) == spec.accept;
            (accepts ? led.p_accept : led.p_reject) += mass;
            led.p_restart += before - reject_mass - mass;
            if (collect_trace)
                res.trace.push_back({"$", accepts ? "finalize+accept" : "finalize+reject",
                                     0, reject_mass + mass, before - reject_mass - mass});
            reg = Vector(4);
            res.decided = true;
            res.blocks.push_back(std::move(rec));
            return res;
        }
        Vector cont = continue_matrix().scaled(invd) * reg;
        led.p_restart += before - reject_mass - cont.norm_squared();
        if (collect_trace)
            res.trace.push_back({"$", "finalize+continue", cont.norm_squared(), reject_mass,
                                 before - reject_mass - cont.norm_squared()});
        reg = std::move(cont);
        rec.after_block = reg;
        res.blocks.push_back(std::move(rec));
    }
}

namespace {

ProtocolResult classify(Ledger led, RoundResult round) {
    ProtocolResult pr;
    pr.round = std::move(round);
    Rational a = led.p_accept, r = led.p_reject, p = led.p_pending;
    if (a + r == 0) {
        pr.kind = ProtocolOutcome::NeverHalts;
        pr.overall = 0;
        pr.lo = 0;
        pr.hi = p > 0 ? Rational(1) : Rational(0);
        return pr;
    }
    if (p == 0) {
        pr.kind = ProtocolOutcome::Exact;
        pr.overall = a / (a + r);
        pr.lo = pr.hi = pr.overall;
        return pr;
    }
    pr.kind = ProtocolOutcome::Bounds;
    pr.lo = a / (a + r + p);
    pr.hi = (a + p) / (a + r + p);
    pr.overall = pr.lo;
    return pr;
}

}  // namespace

ProtocolResult run_protocol(const MachineSpec& spec, const VerifierConfig& vc, Prover& prover,
                            const std::string& input) {
    RoundResult round = run_round(spec, vc, prover, input);
    Ledger led = round.ledger;
    return classify(led, std::move(round));
}

// --- Strong round engine ---

namespace {

struct StrongCtx {
    const MachineSpec& spec;
    const VerifierConfig& vc;
    StrongProver& prover;
    Rational invd;
    StrongRoundResult* res;
};

std::vector<Symbol> path_coins(const std::vector<ExchangeEvent>& past) {
    std::vector<Symbol> coins;
    for (const auto& e : past) coins.push_back(e.coin);
    return coins;
}

void strong_block(StrongCtx& ctx, Vector reg, const Integer& weight, int branches,
                  std::vector<ExchangeEvent> past, int block_index, int consumed);

// Streams c$$ on one surviving path after the branch for next(c) is fixed.
void strong_stream(StrongCtx& ctx, Vector reg, const Integer& weight, int branches,
                   std::vector<ExchangeEvent> past, int block_index, int consumed,
                   const Configuration& c, int effective_branch) {
    Ledger& led = ctx.res->ledger;
    auto weighted = [&](const Rational& mass) -> Rational { return Rational(weight) * mass; };
    auto det_reject = [&](const Vector& r) { led.p_reject += weighted(r.norm_squared()); };

    Configuration next_c;
    try {
        next_c = next_config(ctx.spec, c, effective_branch);
    } catch (const std::exception&) {
        det_reject(reg);
        return;
    }
    for (const Matrix& op : block_operators(ctx.vc.digit_map, c, next_c, block_index == 1)) {
        Rational before = reg.norm_squared();
        reg = embed5(op, true).scaled(ctx.invd) * reg;
        led.p_restart += weighted(before - reg.norm_squared());
    }
    consumed += c.length() + 2;

    bool halting_next = next_c.is_halting(ctx.spec);
    if (block_index == 1 && !halting_next) {
        Rational before = reg.norm_squared();
        reg = embed5(b1_copy(), true).scaled(ctx.invd) * reg;
        led.p_restart += weighted(before - reg.norm_squared());
        strong_block(ctx, std::move(reg), weight, branches, std::move(past), block_index + 1,
                     consumed);
        return;
    }

    Rational before = reg.norm_squared();
    Rational reject_mass = 0;
    if (block_index >= 2) {
        Vector rej = embed5(subtract_matrix(), false).scaled(ctx.invd) * reg;
        reject_mass = rej.norm_squared();
        led.p_reject += weighted(reject_mass);
    }
    if (halting_next) {
        bool accepts = next_c.state(ctx.spec) == ctx.spec.accept;
        // Acceptance reads the q5 amplitude; rejection reads q1.
        Matrix sel = accepts ? select_q5_matrix() : embed5(select_matrix(), false);
        Vector out = sel.scaled(ctx.invd) * reg;
        Rational mass = out.norm_squared();
        StrongPath path;
        path.branches = branches;
        path.weight = weight;
        path.coins = path_coins(past);
        path.pre_finalize = reg;
        path.decided = true;
        if (accepts) {
            led.p_accept += weighted(mass);
            path.accept_mass = weighted(mass);
        } else {
            led.p_reject += weighted(mass);
            path.reject_mass = weighted(mass);
        }
        path.reject_mass += weighted(reject_mass);
        led.p_restart += weighted(before - reject_mass - mass);
        ctx.res->paths.push_back(std::move(path));
        return;
    }
    Vector cont = embed5(continue_matrix(), true).scaled(ctx.invd) * reg;
    led.p_restart += weighted(before - reject_mass - cont.norm_squared());
    strong_block(ctx, std::move(cont), weight, branches, std::move(past), block_index + 1,
                 consumed);
}

void strong_block(StrongCtx& ctx, Vector reg, const Integer& weight, int branches,
                  std::vector<ExchangeEvent> past, int block_index, int consumed) {
    Ledger& led = ctx.res->ledger;
    auto weighted = [&](const Rational& mass) -> Rational { return Rational(weight) * mass; };
    if (consumed >= ctx.vc.max_transcript) {
        led.p_pending += weighted(reg.norm_squared());
        return;
    }
    std::vector<Symbol> block = ctx.prover.next_block(past);
    Configuration c{block};
    auto det_reject = [&]() { led.p_reject += weighted(reg.norm_squared()); };

    if (!config_format_violation(ctx.spec, c).empty()) {
        det_reject();
        return;
    }
    if (ctx.vc.length_check && c.length() != *ctx.vc.length_check + 1) {
        det_reject();  // P4
        return;
    }
    if (c.is_halting(ctx.spec)) {
        det_reject();
        return;
    }

    StateLabel label = ctx.spec.label_of(c.state(ctx.spec));
    Symbol pc = ctx.prover.choice(past);
    if (pc != kLeft && pc != kRight) {
        det_reject();
        return;
    }
    consumed += 1;  // the branch exchange

    if (label == StateLabel::Universal) {
        Vector child = coin_damped_matrix().scaled(ctx.invd) * reg;
        led.p_restart += weighted(reg.norm_squared() - 2 * child.norm_squared());
        for (int outcome = 0; outcome < 2; ++outcome) {
            auto next_past = past;
            next_past.push_back({pc, outcome == 0 ? kLeft : kRight});
            strong_stream(ctx, child, weight, branches + 1, std::move(next_past), block_index,
                          consumed, c, outcome);
        }
        return;
    }
    // Existential and deterministic configurations: the two coin outcomes are
    // classically identical, so they are merged into one path of doubled
    // weight instead of being explored twice.
    bool branching = (label == StateLabel::Existential);
    Matrix coin = branching ? coin_damped_matrix() : Matrix::identity(5);
    Vector child = coin.scaled(ctx.invd) * reg;
    led.p_restart += weighted(reg.norm_squared() - 2 * child.norm_squared());
    int effective = branching ? (pc == kLeft ? 0 : 1) : 0;
    past.push_back({pc, Symbol("*")});
    strong_stream(ctx, std::move(child), weight * 2, branches + (branching ? 1 : 0),
                  std::move(past), block_index, consumed, c, effective);
}

}  // namespace

StrongRoundResult run_strong_round(const MachineSpec& spec, const VerifierConfig& vc,
                                   StrongProver& prover, const std::string& input) {
    if (vc.mode != VerifierMode::Strong5State)
        throw std::invalid_argument("run_strong_round drives the strong 5-state protocol");
    StrongRoundResult res;
    StrongCtx ctx{spec, vc, prover, Rational(1, vc.d), &res};

    // The round begins with the initialize event loading (1/d)(1,0,0,0,1);
    // the residual mass restarts.
    Rational invd = ctx.invd;
    Vector reg{invd, 0, 0, 0, invd};
    res.ledger.p_restart += 1 - reg.norm_squared();

    // The first block must have the expected length (P4) and equal the
    // initial configuration (P2); both are checked before any exchange.
    Configuration c1{prover.next_block({})};
    bool bad_length = vc.length_check && c1.length() != *vc.length_check + 1;
    if (bad_length || !(c1 == initial_config(spec, input))) {
        res.ledger.p_reject += reg.norm_squared();
        return res;
    }
    strong_block(ctx, std::move(reg), 1, 0, {}, 1, 0);
    return res;
}

ProtocolResult run_strong_protocol(const MachineSpec& spec, const VerifierConfig& vc,
                                   StrongProver& prover, const std::string& input) {
    StrongRoundResult round = run_strong_round(spec, vc, prover, input);
    RoundResult rr;
    rr.ledger = round.ledger;
    return classify(round.ledger, std::move(rr));
}

// --- Strong provers ---

namespace {

class HonestStrongProver final : public StrongProver {
  public:
    HonestStrongProver(const MachineSpec& spec, std::string input)
        : spec_(spec), input_(std::move(input)) {}

    std::vector<Symbol> next_block(const std::vector<ExchangeEvent>& past) override {
        return replay(past).symbols;
    }

    Symbol choice(const std::vector<ExchangeEvent>& past) override {
        Configuration c = replay(past);
        if (spec_.label_of(c.state(spec_)) != StateLabel::Existential) return kLeft;
        // Pick a branch whose subtree accepts, preferring the left one.
        Configuration left = next_config(spec_, c, 0);
        return atm_accepts(spec_, left) ? kLeft : kRight;
    }

  protected:
    Configuration replay(const std::vector<ExchangeEvent>& past) const {
        Configuration c = initial_config(spec_, input_);
        for (const auto& e : past) {
            StateLabel label = spec_.label_of(c.state(spec_));
            int branch = 0;
            if (label == StateLabel::Existential) branch = (e.prover_choice == kLeft) ? 0 : 1;
            else if (label == StateLabel::Universal) branch = (e.coin == kLeft) ? 0 : 1;
            c = next_config(spec_, c, branch);
        }
        return c;
    }

    const MachineSpec& spec_;
    std::string input_;
};

class WrongLengthProver final : public StrongProver {
  public:
    WrongLengthProver(const MachineSpec& spec, std::string input)
        : honest_(spec, std::move(input)) {}

    std::vector<Symbol> next_block(const std::vector<ExchangeEvent>& past) override {
        auto block = honest_.next_block(past);
        if (past.empty()) block.insert(block.end() - 1, kBlank);  // violate P4 on block 1
        return block;
    }

    Symbol choice(const std::vector<ExchangeEvent>& past) override {
        return honest_.choice(past);
    }

  private:
    HonestStrongProver honest_;
};

}  // namespace

std::unique_ptr<StrongProver> make_strong_prover(const MachineSpec& spec,
                                                 const std::string& input,
                                                 StrongProverKind kind) {
    switch (kind) {
        case StrongProverKind::Honest:
            return std::make_unique<HonestStrongProver>(spec, input);
        case StrongProverKind::WrongLength:
            return std::make_unique<WrongLengthProver>(spec, input);
    }
    throw std::invalid_argument("unknown strong prover kind");
}

}  // namespace qam
