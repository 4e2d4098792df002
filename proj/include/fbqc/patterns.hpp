// fbqc: fusion-based photonic quantum computing toolkit.
//
// SPDX-License-Identifier: MIT
//
// Measurement and fusion patterns: command sequences with runnability checks,
// branch enumeration, determinism reports, and synthesis from flow
// certificates.
#pragma once

#include <random>
#include <sstream>

#include "fbqc/flow.hpp"

namespace fbqc {

// XOR-affine Boolean expression over outcome variables: constant XOR (+) the
// parity of the listed variables.
struct Condition {
    bool constant = false;
    std::set<std::string> vars;

    bool trivial() const { return !constant && vars.empty(); }
    std::string to_string() const {
        std::string s;
        for (const auto& v : vars) s += (s.empty() ? "" : "+") + v;
        if (constant) s += (s.empty() ? "1" : "+1");
        return s.empty() ? "0" : s;
    }
};

struct Command {
    enum class Kind { Prepare, Entangle, Measure, Fuse, CorrectX, CorrectZ };

    Kind kind = Kind::Prepare;
    int a = -1;                 // primary qubit
    int b = -1;                 // second qubit (Entangle / Fuse)
    Plane plane = Plane::None;  // Measure (any label) / Fuse (X or Y only)
    double angle = 0.0;         // Measure, proper planes only
    std::string outcome;        // Measure / Fuse measurement outcome variable
    std::string success;        // Fuse success variable
    Condition cond;             // CorrectX / CorrectZ

    static Command prepare(int i) { return {Kind::Prepare, i}; }
    static Command entangle(int i, int j) { return {Kind::Entangle, i, j}; }
    static Command measure(int i, Plane p, double alpha, std::string k) {
        Command c{Kind::Measure, i};
        c.plane = p;
        c.angle = alpha;
        c.outcome = std::move(k);
        return c;
    }
    static Command fuse(int i, int j, Plane p, std::string s, std::string k) {
        Command c{Kind::Fuse, i, j};
        c.plane = p;
        c.success = std::move(s);
        c.outcome = std::move(k);
        return c;
    }
    static Command correct_x(int i, Condition t) {
        Command c{Kind::CorrectX, i};
        c.cond = std::move(t);
        return c;
    }
    static Command correct_z(int i, Condition t) {
        Command c{Kind::CorrectZ, i};
        c.cond = std::move(t);
        return c;
    }
};

// Commands are stored left-to-right in execution order: commands[0] runs
// first. Printing reverses the sequence into right-to-left product notation.
struct Pattern {
    std::set<int> qubits;
    std::set<int> inputs;
    std::set<int> outputs;
    std::vector<Command> commands;
};

// ---- runnability -------------------------------------------------------------

namespace detail {
inline bool pattern_fail(std::string* diag, const std::string& why) {
    if (diag) *diag = why;
    return false;
}
}  // namespace detail

// A pattern is runnable when no command acts on a qubit already measured or
// not yet prepared (except preparations) and no correction depends on an
// outcome not yet produced. Fusions act on two live qubits and leave both in
// the register: the physical operation consumes a photon from each qubit's
// resource, not the register slot itself, which is why measurements of fused
// qubits may follow the fusion.
inline bool is_runnable(const Pattern& p, std::string* diag = nullptr) {
    for (int q : p.inputs)
        if (!p.qubits.count(q)) return detail::pattern_fail(diag, "input outside register");
    for (int q : p.outputs)
        if (!p.qubits.count(q)) return detail::pattern_fail(diag, "output outside register");

    std::set<int> prepared = p.inputs;
    std::set<int> measured;
    std::set<std::string> known;
    auto live = [&](int q) { return prepared.count(q) && !measured.count(q); };

    for (const Command& c : p.commands) {
        if (!p.qubits.count(c.a) || (c.b >= 0 && !p.qubits.count(c.b)))
            return detail::pattern_fail(diag, "command qubit outside register");
        switch (c.kind) {
            case Command::Kind::Prepare:
                if (p.inputs.count(c.a)) return detail::pattern_fail(diag, "preparing an input qubit");
                if (prepared.count(c.a)) return detail::pattern_fail(diag, "qubit prepared twice");
                prepared.insert(c.a);
                break;
            case Command::Kind::Entangle:
                if (c.a == c.b) return detail::pattern_fail(diag, "entangling a qubit with itself");
                if (!live(c.a) || !live(c.b))
                    return detail::pattern_fail(diag, "entangling an unprepared or measured qubit");
                break;
            case Command::Kind::Measure:
                if (p.outputs.count(c.a)) return detail::pattern_fail(diag, "measuring an output qubit");
                if (!live(c.a))
                    return detail::pattern_fail(diag, "measuring an unprepared or measured qubit");
                if (c.plane == Plane::None)
                    return detail::pattern_fail(diag, "measurement without a plane label");
                if (is_pauli_plane(c.plane) && std::abs(std::remainder(c.angle, kPi)) > 1e-9)
                    return detail::pattern_fail(
                        diag, "Pauli measurement with an angle not a multiple of pi");
                if (c.outcome.empty() || known.count(c.outcome))
                    return detail::pattern_fail(diag, "measurement outcome variable missing or reused");
                measured.insert(c.a);
                known.insert(c.outcome);
                break;
            case Command::Kind::Fuse:
                if (c.a == c.b) return detail::pattern_fail(diag, "fusing a qubit with itself");
                if (!live(c.a) || !live(c.b))
                    return detail::pattern_fail(diag, "fusing an unprepared or measured qubit");
                if (c.plane != Plane::X && c.plane != Plane::Y)
                    return detail::pattern_fail(diag, "fusion label must be X or Y");
                if (c.outcome.empty() || known.count(c.outcome) || c.success.empty() ||
                    known.count(c.success) || c.outcome == c.success)
                    return detail::pattern_fail(diag, "fusion outcome variables missing or reused");
                known.insert(c.outcome);
                known.insert(c.success);
                break;
            case Command::Kind::CorrectX:
            case Command::Kind::CorrectZ:
                if (!live(c.a))
                    return detail::pattern_fail(diag, "correction on an unprepared or measured qubit");
                for (const auto& v : c.cond.vars)
                    if (!known.count(v))
                        return detail::pattern_fail(diag, "correction depends on an outcome not yet produced");
                break;
        }
    }
    for (int q : p.outputs)
        if (!prepared.count(q) || measured.count(q))
            return detail::pattern_fail(diag, "output qubit not live at the end");
    if (diag) diag->clear();
    return true;
}

// ---- branch semantics --------------------------------------------------------

struct Branch {
    OutcomeAssignment assignment;  // all outcome and success variables
    ZxDiagram diagram;             // fully substituted
    bool success = false;          // every fusion succeeded
};

namespace detail {

// Builds the branch diagram for a fixed assignment of fusion success
// variables, keeping measurement/fusion outcomes symbolic (k*pi terms).
//
// Per-command semantics:
//  - N_i: normalized |+> spider.
//  - E_ij: exact CZ (Hadamard edge between wire spiders, one negative star).
//  - M_i^{lambda,alpha,k}: normalized plane effect, outcome as +k*pi.
//  - F_ij^{lambda,s=1,k}: the entangling core M_f^{lambda,k} E_if E_fj N_f on
//    a fresh internal node f: both register qubits stay live; scalars cancel
//    to a bare phase-(lambda frame + k*pi) spider joined by Hadamard edges.
//  - F_ij^{lambda,s=0,k}: the fusion fails before entangling; each qubit is
//    projected in the Z-plane, acting on the live qubits as Z^{1-k} (x) Z^{k}
//    with amplitude 1/2 (both families share this failure action since the
//    measured-photon frame only affects the success outcome).
//  - [X_i]^t, [Z_j]^t: degree-2 spiders with phase pi*t (exact Paulis).
inline ZxDiagram branch_diagram(const Pattern& p, const std::map<std::string, int>& success_of) {
    ZxDiagram d;
    std::map<int, int> cur;  // live qubit -> current wire-end node
    for (int q : p.inputs) {
        int b = d.add_boundary();
        d.inputs.push_back(b);
        cur[q] = b;
    }
    auto attach = [&](int q, Color c, Phase ph) {
        int s = d.add_spider(c, std::move(ph));
        d.add_edge(cur.at(q), s);
        cur[q] = s;
        return s;
    };
    auto attach_effect = [&](int q, Plane plane, double alpha, const std::string& var) {
        Plane pl = plane;
        double a = alpha;
        // a Pauli label with angle pi denotes the flipped basis state
        if (pl == Plane::X) { pl = Plane::XY; }
        if (pl == Plane::Y) { pl = Plane::XY; a = kPi / 2 + alpha; }
        if (pl == Plane::Z) { pl = Plane::YZ; }
        Phase ph(Angle::radians(-a));
        if (!var.empty()) ph.pi_terms.insert(var);
        if (pl == Plane::XY) {
            attach(q, Color::Z, std::move(ph));
        } else if (pl == Plane::YZ) {
            attach(q, Color::X, std::move(ph));
        } else {  // XZ: rotate into the frame, then X-spider effect
            attach(q, Color::Z, Phase(Angle::of_pi(-1, 2)));
            attach(q, Color::X, std::move(ph));
        }
        d.scalar.star_count += 1;
        cur.erase(q);
    };

    for (const Command& c : p.commands) {
        switch (c.kind) {
            case Command::Kind::Prepare: {
                cur[c.a] = d.add_spider(Color::Z);
                d.scalar.star_count += 1;
                break;
            }
            case Command::Kind::Entangle: {
                int zi = attach(c.a, Color::Z, Phase());
                int zj = attach(c.b, Color::Z, Phase());
                d.add_edge(zi, zj, true);
                d.scalar.star_count -= 1;
                break;
            }
            case Command::Kind::Measure: {
                attach_effect(c.a, c.plane, c.angle, c.outcome);
                break;
            }
            case Command::Kind::Fuse: {
                if (success_of.at(c.success)) {
                    Phase ph(c.plane == Plane::Y ? Angle::of_pi(-1, 2) : Angle::zero());
                    ph.pi_terms.insert(c.outcome);
                    int f = d.add_spider(Color::Z, std::move(ph));
                    int zi = attach(c.a, Color::Z, Phase());
                    int zj = attach(c.b, Color::Z, Phase());
                    d.add_edge(zi, f, true);
                    d.add_edge(f, zj, true);
                    // fresh node (+1), two entanglers (-1 each), effect (+1)
                } else {
                    attach(c.a, Color::Z, Phase(Angle::pi(), {c.outcome}));
                    attach(c.b, Color::Z, Phase(Angle::zero(), {c.outcome}));
                    d.scalar.star_count += 2;
                }
                break;
            }
            case Command::Kind::CorrectX:
            case Command::Kind::CorrectZ: {
                Phase ph(c.cond.constant ? Angle::pi() : Angle::zero(), c.cond.vars);
                attach(c.a, c.kind == Command::Kind::CorrectX ? Color::X : Color::Z, std::move(ph));
                break;
            }
        }
    }
    for (int q : p.outputs) {
        int b = d.add_boundary();
        d.add_edge(cur.at(q), b);
        d.outputs.push_back(b);
        cur.erase(q);
    }
    if (!cur.empty())
        throw std::invalid_argument("branch_diagram: qubit left neither measured nor output");
    return d;
}

}  // namespace detail

// Enumerates the 2^{m+2f} branches (or the 2^{m+f} success branches).
inline std::vector<Branch> enumerate_branches(const Pattern& p, bool success_only = false) {
    std::string why;
    if (!is_runnable(p, &why)) throw std::invalid_argument("enumerate_branches: not runnable: " + why);
    std::vector<std::string> svars, kvars;
    for (const Command& c : p.commands) {
        if (c.kind == Command::Kind::Fuse) svars.push_back(c.success);
        if (c.kind == Command::Kind::Fuse || c.kind == Command::Kind::Measure)
            kvars.push_back(c.outcome);
    }
    std::vector<Branch> out;
    for (std::size_t sb = 0; sb < (std::size_t{1} << svars.size()); ++sb) {
        std::map<std::string, int> success_of;
        bool all_ok = true;
        for (std::size_t i = 0; i < svars.size(); ++i) {
            int s = static_cast<int>((sb >> i) & 1);
            success_of[svars[i]] = s;
            all_ok = all_ok && s;
        }
        if (success_only && !all_ok) continue;
        ZxDiagram symbolic = detail::branch_diagram(p, success_of);
        for (std::size_t kb = 0; kb < (std::size_t{1} << kvars.size()); ++kb) {
            Branch br;
            br.success = all_ok;
            for (std::size_t i = 0; i < kvars.size(); ++i)
                br.assignment[kvars[i]] = static_cast<int>((kb >> i) & 1);
            br.diagram = symbolic.substituted(br.assignment);
            for (const auto& [v, s] : success_of) br.assignment[v] = s;
            out.push_back(std::move(br));
        }
    }
    return out;
}

// ---- determinism -------------------------------------------------------------

struct DeterminismReport {
    bool plain = false;     // all success branches proportional
    bool strong = false;    // plain, with unit-modulus ratios (equal norms)
    bool stepwise = false;  // plain on every truncated sub-pattern
    bool uniform = false;   // plain at every sampled angle assignment
    std::string details;
};

namespace detail {

inline bool success_branches_proportional(const Pattern& p, bool require_unit,
                                          std::string* why = nullptr) {
    std::vector<Branch> branches = enumerate_branches(p, /*success_only=*/true);
    if (branches.empty()) return true;
    QubitTensor ref = branches.front().diagram.eval_tensor();
    if (ref.norm_inf() < 1e-12) {
        if (why) *why = "reference success branch vanishes";
        return false;
    }
    for (std::size_t i = 1; i < branches.size(); ++i) {
        cplx lambda;
        QubitTensor t = branches[i].diagram.eval_tensor();
        if (!proportional(t, ref, 1e-8, &lambda) || std::abs(lambda) < 1e-12) {
            if (why) *why = "success branch " + std::to_string(i) + " not proportional";
            return false;
        }
        if (require_unit && std::abs(std::abs(lambda) - 1.0) > 1e-8) {
            if (why) *why = "success branch " + std::to_string(i) + " has a different norm";
            return false;
        }
    }
    return true;
}

// Sub-pattern truncated after commands[t] (a Measure), with the later
// corrections that already have all their dependencies added back; every
// still-live qubit becomes an output.
inline Pattern truncated_pattern(const Pattern& p, std::size_t t) {
    Pattern sub;
    sub.qubits = p.qubits;
    sub.inputs = p.inputs;
    sub.commands.assign(p.commands.begin(), p.commands.begin() + t + 1);
    std::set<std::string> known;
    std::set<int> prepared = p.inputs, measured;
    for (const Command& c : sub.commands) {
        if (c.kind == Command::Kind::Prepare) prepared.insert(c.a);
        if (c.kind == Command::Kind::Measure) { measured.insert(c.a); known.insert(c.outcome); }
        if (c.kind == Command::Kind::Fuse) { known.insert(c.outcome); known.insert(c.success); }
    }
    for (std::size_t i = t + 1; i < p.commands.size(); ++i) {
        const Command& c = p.commands[i];
        if (c.kind != Command::Kind::CorrectX && c.kind != Command::Kind::CorrectZ) continue;
        if (!prepared.count(c.a) || measured.count(c.a)) continue;
        bool deps_ok = true;
        for (const auto& v : c.cond.vars) deps_ok = deps_ok && known.count(v);
        if (deps_ok) sub.commands.push_back(c);
    }
    for (int q : prepared)
        if (!measured.count(q)) sub.outputs.insert(q);
    return sub;
}

}  // namespace detail

// Plain / strong determinism compare the success branches; stepwise checks
// every truncation after a single-qubit measurement; uniform re-checks plain
// determinism at sampled angle assignments (all-zero plus `angle_samples`
// random draws) for the proper-plane measurement angles.
inline DeterminismReport check_determinism(const Pattern& p, std::size_t angle_samples = 5,
                                           unsigned seed = 7) {
    DeterminismReport r;
    std::string why;
    r.plain = detail::success_branches_proportional(p, false, &why);
    if (!r.plain) r.details = "plain: " + why;
    r.strong = r.plain && detail::success_branches_proportional(p, true, &why);
    if (r.plain && !r.strong) r.details = "strong: " + why;

    r.stepwise = true;
    for (std::size_t t = 0; t < p.commands.size() && r.stepwise; ++t) {
        if (p.commands[t].kind != Command::Kind::Measure) continue;
        if (!detail::success_branches_proportional(detail::truncated_pattern(p, t), false, &why)) {
            r.stepwise = false;
            r.details = "stepwise (after command " + std::to_string(t) + "): " + why;
        }
    }

    r.uniform = true;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
    for (std::size_t s = 0; s <= angle_samples && r.uniform; ++s) {
        Pattern q = p;
        for (Command& c : q.commands)
            if (c.kind == Command::Kind::Measure && is_proper_plane(c.plane))
                c.angle = (s == 0) ? 0.0 : ang(rng);
        if (!detail::success_branches_proportional(q, false, &why)) {
            r.uniform = false;
            r.details = "uniform (sample " + std::to_string(s) + "): " + why;
        }
    }
    return r;
}

// ---- synthesis from flow -----------------------------------------------------

// Emits the pattern realized by a fusion network with an XY-flow certificate:
// preparations and resource entangling first, then every fusion (with its
// corrections), then single-qubit measurements in layer order, each followed
// by X corrections on the still-unmeasured part of its correction set and Z
// corrections on the still-unmeasured part of the set's odd neighbourhood.
// Correction-set entries that are fusion nodes are dropped: they are not
// register qubits, and the flow conditions guarantee those corrections act as
// global phases.
inline Pattern pattern_from_flow(const FusionNetwork& net, const FlowCertificate& cert) {
    std::string why;
    if (!verify_xy_flow(net, cert, &why))
        throw std::invalid_argument("pattern_from_flow: certificate rejected: " + why);
    std::vector<int> fusion_nodes;
    LabelledOpenGraph target = target_open_graph(net, &fusion_nodes);
    std::set<int> fnode_set(fusion_nodes.begin(), fusion_nodes.end());

    Pattern p;
    p.qubits = net.resource.vertices;
    p.inputs = net.resource.inputs;
    p.outputs = net.resource.outputs;
    for (int q : net.resource.vertices)
        if (!net.resource.inputs.count(q)) p.commands.push_back(Command::prepare(q));
    for (const auto& [a, b] : net.resource.edges) p.commands.push_back(Command::entangle(a, b));

    auto layer = [&](int v) { return cert.layer.at(v); };
    std::set<int> done;  // register qubits already measured when corrections are emitted
    auto emit_corrections = [&](int v, const std::string& var) {
        const std::set<int>& pset = cert.corrections.at(v);
        std::set<int> g;
        for (int w : pset)
            if (w != v && !done.count(w) && !fnode_set.count(w)) g.insert(w);
        std::set<int> gz;
        for (int w : odd_neighbourhood(target, pset))
            if (w != v && !done.count(w) && !fnode_set.count(w)) gz.insert(w);
        for (int w : g) p.commands.push_back(Command::correct_x(w, Condition{false, {var}}));
        for (int w : gz) p.commands.push_back(Command::correct_z(w, Condition{false, {var}}));
    };

    for (std::size_t i = 0; i < net.fusions.size(); ++i) {
        const NetworkFusion& f = net.fusions[i];
        std::string s = "s" + std::to_string(fusion_nodes[i]);
        std::string k = "k" + std::to_string(fusion_nodes[i]);
        p.commands.push_back(Command::fuse(f.a, f.b, f.plane, s, k));
        emit_corrections(fusion_nodes[i], k);
    }

    std::vector<int> order;
    for (int v : target.measured())
        if (!fnode_set.count(v)) order.push_back(v);
    std::stable_sort(order.begin(), order.end(), [&](int u, int v) { return layer(u) < layer(v); });
    for (int v : order) {
        std::string k = "k" + std::to_string(v);
        p.commands.push_back(Command::measure(v, target.plane.at(v), target.angle.at(v), k));
        done.insert(v);
        emit_corrections(v, k);
    }
    return p;
}

// Forgets corrections: resource graph from E commands, fusions from F,
// measurement labels from M.
inline FusionNetwork underlying_network(const Pattern& p) {
    std::string why;
    if (!is_runnable(p, &why)) throw std::invalid_argument("underlying_network: not runnable: " + why);
    FusionNetwork net;
    for (int q : p.qubits) net.resource.add_vertex(q);
    net.resource.inputs = p.inputs;
    net.resource.outputs = p.outputs;
    for (const Command& c : p.commands) {
        if (c.kind == Command::Kind::Entangle) net.resource.add_edge(c.a, c.b);
        if (c.kind == Command::Kind::Fuse) net.fusions.push_back({c.a, c.b, c.plane, 0.0});
        if (c.kind == Command::Kind::Measure) {
            net.resource.plane[c.a] = c.plane;
            net.resource.angle[c.a] = c.angle;
        }
    }
    return net;
}

// ---- textual format ----------------------------------------------------------

// Right-to-left product notation, mirroring e.g.
//   [X 4]^{l} M{XY,0.5,l} 3 F{X,s,j} 1 3 E 3 4 N 1
inline std::string pattern_to_string(const Pattern& p) {
    std::ostringstream os;
    bool first = true;
    for (auto it = p.commands.rbegin(); it != p.commands.rend(); ++it) {
        if (!first) os << " ";
        first = false;
        const Command& c = *it;
        switch (c.kind) {
            case Command::Kind::Prepare: os << "N " << c.a; break;
            case Command::Kind::Entangle: os << "E " << c.a << " " << c.b; break;
            case Command::Kind::Measure:
                os << "M{" << to_string(c.plane);
                if (is_proper_plane(c.plane)) os << "," << c.angle;
                os << "," << c.outcome << "} " << c.a;
                break;
            case Command::Kind::Fuse:
                os << "F{" << to_string(c.plane) << "," << c.success << "," << c.outcome << "} "
                   << c.a << " " << c.b;
                break;
            case Command::Kind::CorrectX:
                os << "[X " << c.a << "]^{" << c.cond.to_string() << "}";
                break;
            case Command::Kind::CorrectZ:
                os << "[Z " << c.a << "]^{" << c.cond.to_string() << "}";
                break;
        }
    }
    return os.str();
}

namespace detail {
inline Condition parse_condition(const std::string& s) {
    Condition c;
    std::string tok;
    std::istringstream is(s);
    while (std::getline(is, tok, '+')) {
        if (tok.empty()) continue;
        if (tok == "0") continue;
        if (tok == "1") c.constant = !c.constant;
        else if (c.vars.count(tok)) c.vars.erase(tok);
        else c.vars.insert(tok);
    }
    return c;
}
}  // namespace detail

// Parses the right-to-left textual format; I and O are supplied separately
// (the command string does not carry them).
inline Pattern pattern_from_string(const std::string& text, std::set<int> inputs,
                                   std::set<int> outputs) {
    std::vector<std::string> toks;
    std::istringstream is(text);
    std::string t;
    while (is >> t) toks.push_back(t);

    Pattern p;
    p.inputs = std::move(inputs);
    p.outputs = std::move(outputs);
    auto qubit = [&](const std::string& s) {
        int q = std::stoi(s);
        p.qubits.insert(q);
        return q;
    };
    std::size_t i = 0;
    auto need = [&](const char* what) -> const std::string& {
        if (i >= toks.size()) throw std::invalid_argument(std::string("pattern parse: missing ") + what);
        return toks[i++];
    };
    std::vector<Command> rev;
    while (i < toks.size()) {
        std::string head = toks[i++];
        if (head == "N") {
            rev.push_back(Command::prepare(qubit(need("qubit"))));
        } else if (head == "E") {
            int a = qubit(need("qubit")), b = qubit(need("qubit"));
            rev.push_back(Command::entangle(a, b));
        } else if (head.rfind("M{", 0) == 0 || head.rfind("F{", 0) == 0) {
            if (head.back() != '}') throw std::invalid_argument("pattern parse: malformed " + head);
            std::string body = head.substr(2, head.size() - 3);
            std::vector<std::string> parts;
            std::istringstream bs(body);
            std::string part;
            while (std::getline(bs, part, ',')) parts.push_back(part);
            if (head[0] == 'M') {
                if (parts.size() < 2) throw std::invalid_argument("pattern parse: malformed " + head);
                Plane pl = plane_from_string(parts[0]);
                double alpha = 0.0;
                std::string var;
                if (is_proper_plane(pl)) {
                    if (parts.size() != 3) throw std::invalid_argument("pattern parse: malformed " + head);
                    alpha = std::stod(parts[1]);
                    var = parts[2];
                } else {
                    if (parts.size() != 2) throw std::invalid_argument("pattern parse: malformed " + head);
                    var = parts[1];
                }
                rev.push_back(Command::measure(qubit(need("qubit")), pl, alpha, var));
            } else {
                if (parts.size() != 3) throw std::invalid_argument("pattern parse: malformed " + head);
                Plane pl = plane_from_string(parts[0]);
                int a = qubit(need("qubit")), b = qubit(need("qubit"));
                rev.push_back(Command::fuse(a, b, pl, parts[1], parts[2]));
            }
        } else if (head.rfind("[X", 0) == 0 || head.rfind("[Z", 0) == 0) {
            // forms: "[X" "4]^{l}"  (qubit glued to the bracket tail)
            bool x = head[1] == 'X';
            std::string tail = head.size() > 2 ? head.substr(2) : "";
            if (tail.empty()) tail = need("qubit");
            auto close = tail.find("]^{");
            if (close == std::string::npos || tail.back() != '}')
                throw std::invalid_argument("pattern parse: malformed correction " + head);
            int q = qubit(tail.substr(0, close));
            Condition cond = detail::parse_condition(tail.substr(close + 3, tail.size() - close - 4));
            rev.push_back(x ? Command::correct_x(q, cond) : Command::correct_z(q, cond));
        } else {
            throw std::invalid_argument("pattern parse: unknown token " + head);
        }
    }
    p.commands.assign(rev.rbegin(), rev.rend());
    for (int q : p.inputs) p.qubits.insert(q);
    for (int q : p.outputs) p.qubits.insert(q);
    return p;
}

}  // namespace fbqc
