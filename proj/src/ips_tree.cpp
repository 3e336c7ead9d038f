#include "qam/ips_tree.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qam/linalg.hpp"

namespace qam {

const IPSConfig& IPSVerifierSpec::at(const std::string& name) const {
    auto it = configs.find(name);
    if (it == configs.end()) throw std::invalid_argument("unknown configuration '" + name + "'");
    return it->second;
}

void IPSVerifierSpec::validate() const {
    if (configs.find(initial) == configs.end())
        throw std::invalid_argument("initial configuration '" + initial + "' is not declared");
    for (const auto& [name, cfg] : configs) {
        size_t want_min = 0, want_max = 0;
        switch (cfg.cls) {
            case ConfigClass::Read: want_min = 1; want_max = 2; break;
            case ConfigClass::Comm0:
            case ConfigClass::Comm1: want_min = want_max = 2; break;
            case ConfigClass::Acc:
            case ConfigClass::Rej: break;
        }
        if (cfg.children.size() < want_min || cfg.children.size() > want_max)
            throw std::invalid_argument("configuration '" + name + "' has a wrong child count");
        for (const auto& ch : cfg.children)
            if (configs.find(ch) == configs.end())
                throw std::invalid_argument("configuration '" + name + "' references unknown '" +
                                            ch + "'");
    }
}

IPSVerifierSpec parse_ips_file(std::istream& in) {
    IPSVerifierSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty() || trimmed.rfind("//", 0) == 0) continue;
        std::istringstream iss(trimmed);
        std::string key;
        iss >> key;
        auto fail = [&](const std::string& msg) {
            throw std::invalid_argument("IPS file line " + std::to_string(lineno) + ": " + msg);
        };
        if (key == "config:") {
            IPSConfig cfg;
            std::string cls;
            if (!(iss >> cfg.name >> cls)) fail("config: needs a name and a class");
            if (cls == "read") cfg.cls = ConfigClass::Read;
            else if (cls == "comm-0") cfg.cls = ConfigClass::Comm0;
            else if (cls == "comm-1") cfg.cls = ConfigClass::Comm1;
            else if (cls == "acc") cfg.cls = ConfigClass::Acc;
            else if (cls == "rej") cfg.cls = ConfigClass::Rej;
            else fail("unknown class '" + cls + "'");
            for (std::string tok; iss >> tok;) cfg.children.push_back(tok);
            if (!spec.configs.emplace(cfg.name, cfg).second)
                fail("duplicate configuration '" + cfg.name + "'");
        } else if (key == "initial:") {
            if (!(iss >> spec.initial)) fail("initial: needs a configuration name");
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    spec.validate();
    return spec;
}

IPSVerifierSpec load_ips_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open IPS file: " + path);
    return parse_ips_file(in);
}

namespace {

using Subset = std::vector<std::string>;  // sorted

NodeKind classify(const IPSVerifierSpec& spec, const Subset& subset) {
    bool has_read = false, has_c0 = false, has_c1 = false;
    for (const auto& name : subset) {
        switch (spec.at(name).cls) {
            case ConfigClass::Read: has_read = true; break;
            case ConfigClass::Comm0: has_c0 = true; break;
            case ConfigClass::Comm1: has_c1 = true; break;
            default: throw std::invalid_argument("halting configuration inside an inner node");
        }
    }
    if (has_read) return NodeKind::ReadComm;
    if (has_c0 && has_c1) return NodeKind::Comm01;
    return has_c0 ? NodeKind::Comm0 : NodeKind::Comm1;
}

TreeNode leaf(NodeKind kind, const Subset& subset, int depth, int loop_depth = -1) {
    TreeNode n;
    n.kind = kind;
    n.config_subset = subset;
    n.depth = depth;
    n.loop_depth = loop_depth;
    return n;
}

struct Builder {
    const IPSVerifierSpec& spec;
    long cap;  // 2^|C|, the literal depth bound
    std::vector<std::pair<Subset, int>> path;

    TreeNode make_child(const Subset& subset, int depth) {
        for (const auto& [s, d] : path)
            if (s == subset) return leaf(NodeKind::Loop, subset, depth, d);
        if (depth > cap) {
            // Unreachable with eager detection; kept as the literal backstop.
            return leaf(NodeKind::Loop, subset, depth, 0);
        }
        return expand(classify(spec, subset), subset, depth);
    }

    TreeNode expand(NodeKind kind, const Subset& subset, int depth) {
        TreeNode node;
        node.kind = kind;
        node.config_subset = subset;
        node.depth = depth;
        path.push_back({subset, depth});

        auto child_of = [&](const std::string& ch, const Subset& loop_guard,
                            ConfigClass loop_class, std::set<std::string>& collect) -> bool {
            // Returns true when a leaf was attached.
            const IPSConfig& cfg = spec.at(ch);
            if (cfg.cls == ConfigClass::Acc) {
                node.children.push_back(leaf(NodeKind::Acc, {ch}, depth + 1));
                return true;
            }
            if (cfg.cls == ConfigClass::Rej) {
                node.children.push_back(leaf(NodeKind::Rej, {ch}, depth + 1));
                return true;
            }
            if (cfg.cls == loop_class &&
                std::binary_search(loop_guard.begin(), loop_guard.end(), ch)) {
                node.children.push_back(leaf(NodeKind::Loop, {ch}, depth + 1, depth));
                return true;
            }
            collect.insert(ch);
            return false;
        };

        if (kind == NodeKind::ReadComm) {
            Subset reads;
            std::set<std::string> next;
            for (const auto& name : subset)
                if (spec.at(name).cls == ConfigClass::Read) reads.push_back(name);
                else next.insert(name);  // comm configurations carry over unchanged
            for (const auto& name : reads)
                for (const auto& ch : spec.at(name).children)
                    child_of(ch, reads, ConfigClass::Read, next);
            if (!next.empty())
                node.children.push_back(
                    make_child(Subset(next.begin(), next.end()), depth + 1));
        } else if (kind == NodeKind::Comm01) {
            Subset zeros, ones;
            for (const auto& name : subset)
                (spec.at(name).cls == ConfigClass::Comm0 ? zeros : ones).push_back(name);
            node.children.push_back(make_child(zeros, depth + 1));
            node.children.push_back(make_child(ones, depth + 1));
        } else {
            ConfigClass own = (kind == NodeKind::Comm0) ? ConfigClass::Comm0 : ConfigClass::Comm1;
            std::set<std::string> resp0, resp1;
            for (const auto& name : subset) {
                const IPSConfig& cfg = spec.at(name);
                child_of(cfg.children[0], subset, own, resp0);
                child_of(cfg.children[1], subset, own, resp1);
            }
            if (!resp0.empty())
                node.children.push_back(make_child(Subset(resp0.begin(), resp0.end()), depth + 1));
            if (!resp1.empty())
                node.children.push_back(make_child(Subset(resp1.begin(), resp1.end()), depth + 1));
        }
        path.pop_back();
        return node;
    }
};

}  // namespace

TreeNode build_tree(const IPSVerifierSpec& spec) {
    spec.validate();
    const IPSConfig& init = spec.at(spec.initial);
    if (init.cls == ConfigClass::Acc) return leaf(NodeKind::Acc, {spec.initial}, 0);
    if (init.cls == ConfigClass::Rej) return leaf(NodeKind::Rej, {spec.initial}, 0);
    long cap = 1;
    for (size_t i = 0; i < spec.configs.size() && cap < (1L << 30); ++i) cap *= 2;
    Builder b{spec, cap, {}};
    Subset root{spec.initial};
    return b.expand(classify(spec, root), root, 0);
}

TreeValue and_combine(const TreeValue& v1, const TreeValue& v2) {
    if (v1.kind == TreeValue::False || v2.kind == TreeValue::False) return TreeValue::falsity();
    if (v1.kind == TreeValue::True || v2.kind == TreeValue::True) return TreeValue::truth();
    return TreeValue::loop(std::min(v1.depth, v2.depth));
}

TreeValue or_combine(const TreeValue& v1, const TreeValue& v2) {
    if (v1.kind == TreeValue::True || v2.kind == TreeValue::True) return TreeValue::truth();
    if (v1.kind == TreeValue::False && v2.kind == TreeValue::False) return TreeValue::falsity();
    if (v1.kind == TreeValue::False) return v2;
    if (v2.kind == TreeValue::False) return v1;
    return TreeValue::loop(std::min(v1.depth, v2.depth));
}

TreeValue evaluate(const TreeNode& node) {
    switch (node.kind) {
        case NodeKind::Acc: return TreeValue::truth();
        case NodeKind::Rej: return TreeValue::falsity();
        case NodeKind::Loop: return TreeValue::loop(node.loop_depth);
        default: break;
    }
    bool conj = (node.kind == NodeKind::ReadComm || node.kind == NodeKind::Comm01);
    TreeValue v = evaluate(node.children.back());
    for (size_t i = node.children.size() - 1; i-- > 0;) {
        TreeValue vi = evaluate(node.children[i]);
        v = conj ? and_combine(vi, v) : or_combine(vi, v);
    }
    if (v.kind == TreeValue::Loop && v.depth == node.depth) return TreeValue::falsity();
    return v;
}

namespace {

const char* kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::ReadComm: return "READ-COMM";
        case NodeKind::Comm01: return "COMM-01";
        case NodeKind::Comm0: return "COMM-0";
        case NodeKind::Comm1: return "COMM-1";
        case NodeKind::Acc: return "ACC";
        case NodeKind::Rej: return "REJ";
        case NodeKind::Loop: return "LOOP";
    }
    return "?";
}

void serialize_rec(const TreeNode& n, int indent, std::string& out) {
    out.append(static_cast<size_t>(indent) * 2, ' ');
    out += kind_name(n.kind);
    out += " {";
    for (size_t i = 0; i < n.config_subset.size(); ++i) {
        if (i) out += ",";
        out += n.config_subset[i];
    }
    out += "} depth=" + std::to_string(n.depth);
    if (n.kind == NodeKind::Loop) out += " -> " + std::to_string(n.loop_depth);
    out += "\n";
    for (const auto& ch : n.children) serialize_rec(ch, indent + 1, out);
}

}  // namespace

std::string serialize_tree(const TreeNode& root) {
    std::string out;
    serialize_rec(root, 0, out);
    return out;
}

// --- Strategy-enumeration oracle ---

namespace {

// The quotient graph of tree nodes identified by subset. Chain states are
// (node, configuration) pairs; read steps flip a fair coin over the read
// children, communication steps follow the strategy's fixed response.
struct NodeGraph {
    const IPSVerifierSpec& spec;
    std::vector<Subset> subsets;
    std::vector<NodeKind> kinds;
    std::map<Subset, int> index;

    int intern(const Subset& s) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(subsets.size());
        index.emplace(s, id);
        subsets.push_back(s);
        kinds.push_back(classify(spec, s));
        return id;
    }
};

struct ChainState {
    int node;
    std::string config;
    auto operator<=>(const ChainState&) const = default;
};

struct Transition {
    Rational prob;
    enum { Accept, Reject, To } target = To;
    ChainState to{};
};

}  // namespace

bool markov_strategy_oracle(const IPSVerifierSpec& spec) {
    spec.validate();
    const IPSConfig& init = spec.at(spec.initial);
    if (init.cls == ConfigClass::Acc) return true;
    if (init.cls == ConfigClass::Rej) return false;

    NodeGraph g{spec, {}, {}, {}};
    int root = g.intern({spec.initial});
    // Discover all subsets reachable under any strategy.
    for (size_t i = 0; i < g.subsets.size(); ++i) {
        Subset subset = g.subsets[i];
        NodeKind kind = g.kinds[i];
        auto surviving = [&](const std::string& ch, ConfigClass loop_class) {
            const IPSConfig& cfg = spec.at(ch);
            if (cfg.cls == ConfigClass::Acc || cfg.cls == ConfigClass::Rej) return false;
            if (cfg.cls == loop_class &&
                std::binary_search(subset.begin(), subset.end(), ch))
                return false;
            return true;
        };
        if (kind == NodeKind::ReadComm) {
            std::set<std::string> next;
            Subset reads;
            for (const auto& n : subset)
                if (spec.at(n).cls == ConfigClass::Read) reads.push_back(n);
                else next.insert(n);
            for (const auto& n : reads)
                for (const auto& ch : spec.at(n).children)
                    if (surviving(ch, ConfigClass::Read) &&
                        !std::binary_search(reads.begin(), reads.end(), ch))
                        next.insert(ch);
            if (!next.empty()) g.intern(Subset(next.begin(), next.end()));
        } else if (kind == NodeKind::Comm01) {
            Subset zeros, ones;
            for (const auto& n : subset)
                (spec.at(n).cls == ConfigClass::Comm0 ? zeros : ones).push_back(n);
            g.intern(zeros);
            g.intern(ones);
        } else {
            ConfigClass own = (kind == NodeKind::Comm0) ? ConfigClass::Comm0 : ConfigClass::Comm1;
            for (int r = 0; r < 2; ++r) {
                std::set<std::string> next;
                for (const auto& n : subset) {
                    const std::string& ch = spec.at(n).children[static_cast<size_t>(r)];
                    if (surviving(ch, own)) next.insert(ch);
                }
                if (!next.empty()) g.intern(Subset(next.begin(), next.end()));
            }
        }
    }

    std::vector<int> comm_nodes;
    for (size_t i = 0; i < g.kinds.size(); ++i)
        if (g.kinds[i] == NodeKind::Comm0 || g.kinds[i] == NodeKind::Comm1)
            comm_nodes.push_back(static_cast<int>(i));
    if (comm_nodes.size() > 20)
        throw std::invalid_argument("strategy enumeration limited to 20 communication nodes");

    auto transitions = [&](const ChainState& st,
                           const std::map<int, int>& strategy) -> std::vector<Transition> {
        const Subset& subset = g.subsets[static_cast<size_t>(st.node)];
        NodeKind kind = g.kinds[static_cast<size_t>(st.node)];
        const IPSConfig& cfg = spec.at(st.config);
        std::vector<Transition> out;
        auto push = [&](const Rational& p, const std::string& ch, ConfigClass loop_class,
                        int next_node) {
            const IPSConfig& c = spec.at(ch);
            if (c.cls == ConfigClass::Acc) out.push_back({p, Transition::Accept, {}});
            else if (c.cls == ConfigClass::Rej) out.push_back({p, Transition::Reject, {}});
            else if (c.cls == loop_class &&
                     std::binary_search(subset.begin(), subset.end(), ch))
                out.push_back({p, Transition::To, {st.node, ch}});
            else out.push_back({p, Transition::To, {next_node, ch}});
        };
        if (kind == NodeKind::ReadComm) {
            std::set<std::string> next;
            Subset reads;
            for (const auto& n : subset)
                if (spec.at(n).cls == ConfigClass::Read) reads.push_back(n);
                else next.insert(n);
            for (const auto& n : reads)
                for (const auto& ch : spec.at(n).children) {
                    const IPSConfig& c = spec.at(ch);
                    if (c.cls != ConfigClass::Acc && c.cls != ConfigClass::Rej &&
                        !(c.cls == ConfigClass::Read &&
                          std::binary_search(reads.begin(), reads.end(), ch)))
                        next.insert(ch);
                }
            int agg = next.empty() ? -1 : g.index.at(Subset(next.begin(), next.end()));
            if (cfg.cls == ConfigClass::Read) {
                Rational p(1, static_cast<long>(cfg.children.size()));
                for (const auto& ch : cfg.children) push(p, ch, ConfigClass::Read, agg);
            } else {
                out.push_back({1, Transition::To, {agg, st.config}});
            }
        } else if (kind == NodeKind::Comm01) {
            Subset zeros, ones;
            for (const auto& n : subset)
                (spec.at(n).cls == ConfigClass::Comm0 ? zeros : ones).push_back(n);
            int tgt = g.index.at(cfg.cls == ConfigClass::Comm0 ? zeros : ones);
            out.push_back({1, Transition::To, {tgt, st.config}});
        } else {
            ConfigClass own = (kind == NodeKind::Comm0) ? ConfigClass::Comm0 : ConfigClass::Comm1;
            int r = strategy.at(st.node);
            std::set<std::string> next;
            for (const auto& n : subset) {
                const std::string& ch = spec.at(n).children[static_cast<size_t>(r)];
                const IPSConfig& c = spec.at(ch);
                if (c.cls != ConfigClass::Acc && c.cls != ConfigClass::Rej &&
                    !(c.cls == own && std::binary_search(subset.begin(), subset.end(), ch)))
                    next.insert(ch);
            }
            int tgt = next.empty() ? -1 : g.index.at(Subset(next.begin(), next.end()));
            push(1, cfg.children[static_cast<size_t>(r)], own, tgt);
        }
        return out;
    };

    ChainState start{root, spec.initial};
    for (unsigned long mask = 0; mask < (1ul << comm_nodes.size()); ++mask) {
        std::map<int, int> strategy;
        for (size_t i = 0; i < comm_nodes.size(); ++i)
            strategy[comm_nodes[i]] = (mask >> i) & 1;

        // Collect the reachable chain states under this strategy.
        std::map<ChainState, int> idx;
        std::vector<ChainState> states{start};
        idx[start] = 0;
        bool direct_accept_possible = true;
        for (size_t i = 0; i < states.size(); ++i)
            for (const auto& t : transitions(states[i], strategy))
                if (t.target == Transition::To && !idx.count(t.to)) {
                    idx[t.to] = static_cast<int>(states.size());
                    states.push_back(t.to);
                }
        (void)direct_accept_possible;

        // States from which an accept transition is reachable.
        int n = static_cast<int>(states.size());
        std::vector<std::vector<int>> rev(static_cast<size_t>(n));
        std::vector<bool> can_accept(static_cast<size_t>(n), false);
        for (int i = 0; i < n; ++i)
            for (const auto& t : transitions(states[static_cast<size_t>(i)], strategy)) {
                if (t.target == Transition::Accept) can_accept[static_cast<size_t>(i)] = true;
                else if (t.target == Transition::To)
                    rev[static_cast<size_t>(idx.at(t.to))].push_back(i);
            }
        std::vector<int> work;
        for (int i = 0; i < n; ++i)
            if (can_accept[static_cast<size_t>(i)]) work.push_back(i);
        while (!work.empty()) {
            int cur = work.back();
            work.pop_back();
            for (int p : rev[static_cast<size_t>(cur)])
                if (!can_accept[static_cast<size_t>(p)]) {
                    can_accept[static_cast<size_t>(p)] = true;
                    work.push_back(p);
                }
        }
        if (!can_accept[0]) continue;

        // Minimal solution of a = Q a + r: states that cannot reach accept
        // contribute 0; the rest form a substochastic system with a unique
        // solution.
        std::vector<int> live;  // chain index -> system index
        std::vector<int> sysid(static_cast<size_t>(n), -1);
        for (int i = 0; i < n; ++i)
            if (can_accept[static_cast<size_t>(i)]) {
                sysid[static_cast<size_t>(i)] = static_cast<int>(live.size());
                live.push_back(i);
            }
        int m = static_cast<int>(live.size());
        Matrix a_mat = Matrix::identity(m);
        Vector rhs(m);
        for (int si = 0; si < m; ++si) {
            int i = live[static_cast<size_t>(si)];
            for (const auto& t : transitions(states[static_cast<size_t>(i)], strategy)) {
                if (t.target == Transition::Accept) rhs[si] += t.prob;
                else if (t.target == Transition::To) {
                    int j = sysid[static_cast<size_t>(idx.at(t.to))];
                    if (j >= 0) a_mat.at(si, j) -= t.prob;
                }
            }
        }
        Vector sol;
        if (!linear_solve(a_mat, rhs, sol)) continue;
        if (sol[sysid[0]] == 1) return true;
    }
    return false;
}

}  // namespace qam
