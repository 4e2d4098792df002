// fbqc: fusion-based photonic quantum computing toolkit.
//
// SPDX-License-Identifier: MIT
//
// Dataflow semantics for optical protocols: stream processes over qubit-wire
// fragments, unrolling, feedback and delays, photon routing schedules,
// emitter / measurement / correction modules, protocol simulation, and
// repeat-until-success fusion boosting.
#pragma once

#include <array>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fbqc/flow.hpp"
#include "fbqc/fusion.hpp"
#include "fbqc/linear_optics.hpp"
#include "fbqc/zx.hpp"

namespace fbqc {

// ---- wire permutations -------------------------------------------------------

// n-wire rewiring diagram: output port j is connected to input port p[j].
inline ZxDiagram perm_diagram(const std::vector<int>& p) {
    ZxDiagram d;
    std::vector<int> in_ids;
    in_ids.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) in_ids.push_back(d.add_input());
    std::vector<bool> used(p.size(), false);
    for (std::size_t j = 0; j < p.size(); ++j) {
        int src = p[j];
        if (src < 0 || src >= static_cast<int>(p.size()) || used[src])
            throw std::invalid_argument("perm_diagram: p must be a permutation");
        used[src] = true;
        d.add_output(in_ids[src]);
    }
    return d;
}

// ---- stream processes ----------------------------------------------------------

// A stream process f : X -> Y with memory M. Each step fragment is a qubit
// diagram f_t : M_t (x) X_t -> M_{t+1} (x) Y_t with the memory wires as the
// port prefix on both sides; arities are wire counts per time step.
struct StreamProcess {
    std::function<int(int)> memory;     // M_t, defined for t >= 0
    std::function<int(int)> in_arity;   // X_t
    std::function<int(int)> out_arity;  // Y_t
    std::function<ZxDiagram(int)> step;
};

// Throws if any step fragment up to the horizon has boundary arities that do
// not chain (memory out of step t must equal memory into step t+1).
inline void validate_stream(const StreamProcess& s, int horizon) {
    for (int t = 0; t <= horizon; ++t) {
        ZxDiagram f = s.step(t);
        if (static_cast<int>(f.inputs.size()) != s.memory(t) + s.in_arity(t) ||
            static_cast<int>(f.outputs.size()) != s.memory(t + 1) + s.out_arity(t))
            throw std::runtime_error("validate_stream: step " + std::to_string(t) +
                                     " boundary arities do not match the declared types");
    }
}

// Constant stream of a fixed fragment (memoryless, same fragment every step).
inline StreamProcess constant_stream(const ZxDiagram& f) {
    StreamProcess s;
    int in = static_cast<int>(f.inputs.size()), out = static_cast<int>(f.outputs.size());
    s.memory = [](int) { return 0; };
    s.in_arity = [in](int) { return in; };
    s.out_arity = [out](int) { return out; };
    s.step = [f](int) { return f; };
    return s;
}

inline StreamProcess identity_stream(int width = 1) {
    return constant_stream(ZxDiagram::identity(static_cast<std::size_t>(width)));
}

// Sequential composition: b consumes a's outputs (b after a). Memory wires of
// both factors are kept side by side, a's first.
inline StreamProcess stream_compose(const StreamProcess& a, const StreamProcess& b) {
    StreamProcess r;
    r.memory = [a, b](int t) { return a.memory(t) + b.memory(t); };
    r.in_arity = a.in_arity;
    r.out_arity = b.out_arity;
    r.step = [a, b](int t) {
        int ma = a.memory(t), mb = b.memory(t), x = a.in_arity(t), y = a.out_arity(t);
        if (b.in_arity(t) != y)
            throw std::invalid_argument("stream_compose: arity mismatch at step " +
                                        std::to_string(t));
        int ma2 = a.memory(t + 1);
        // [Ma, Mb, X] -> [Ma, X, Mb]
        std::vector<int> q1;
        for (int i = 0; i < ma; ++i) q1.push_back(i);
        for (int i = 0; i < x; ++i) q1.push_back(ma + mb + i);
        for (int i = 0; i < mb; ++i) q1.push_back(ma + i);
        // [Ma', Y, Mb] -> [Ma', Mb, Y]
        std::vector<int> q2;
        for (int i = 0; i < ma2; ++i) q2.push_back(i);
        for (int i = 0; i < mb; ++i) q2.push_back(ma2 + y + i);
        for (int i = 0; i < y; ++i) q2.push_back(ma2 + i);
        return perm_diagram(q1)
            .compose_with(a.step(t).tensor_with(ZxDiagram::identity(mb)))
            .compose_with(perm_diagram(q2))
            .compose_with(ZxDiagram::identity(ma2).tensor_with(b.step(t)));
    };
    return r;
}

// Parallel composition (side by side), a's ports first.
inline StreamProcess stream_tensor(const StreamProcess& a, const StreamProcess& b) {
    StreamProcess r;
    r.memory = [a, b](int t) { return a.memory(t) + b.memory(t); };
    r.in_arity = [a, b](int t) { return a.in_arity(t) + b.in_arity(t); };
    r.out_arity = [a, b](int t) { return a.out_arity(t) + b.out_arity(t); };
    r.step = [a, b](int t) {
        int ma = a.memory(t), mb = b.memory(t), xa = a.in_arity(t), xb = b.in_arity(t);
        int ma2 = a.memory(t + 1), ya = a.out_arity(t), yb = b.out_arity(t);
        // [Ma, Mb, Xa, Xb] -> [Ma, Xa, Mb, Xb]
        std::vector<int> q1;
        for (int i = 0; i < ma; ++i) q1.push_back(i);
        for (int i = 0; i < xa; ++i) q1.push_back(ma + mb + i);
        for (int i = 0; i < mb; ++i) q1.push_back(ma + i);
        for (int i = 0; i < xb; ++i) q1.push_back(ma + mb + xa + i);
        // [Ma', Ya, Mb', Yb] -> [Ma', Mb', Ya, Yb]
        int mb2 = b.memory(t + 1);
        std::vector<int> q2;
        for (int i = 0; i < ma2; ++i) q2.push_back(i);
        for (int i = 0; i < mb2; ++i) q2.push_back(ma2 + ya + i);
        for (int i = 0; i < ya; ++i) q2.push_back(ma2 + i);
        for (int i = 0; i < yb; ++i) q2.push_back(ma2 + ya + mb2 + i);
        return perm_diagram(q1)
            .compose_with(a.step(t).tensor_with(b.step(t)))
            .compose_with(perm_diagram(q2));
    };
    return r;
}

// Drops the first k steps of a stream; the result's initial memory is M_k.
inline StreamProcess stream_tail(const StreamProcess& s, int k) {
    StreamProcess r;
    r.memory = [s, k](int t) { return s.memory(t + k); };
    r.in_arity = [s, k](int t) { return s.in_arity(t + k); };
    r.out_arity = [s, k](int t) { return s.out_arity(t + k); };
    r.step = [s, k](int t) { return s.step(t + k); };
    return r;
}

// Feedback: given f : dS (x) X -> S (x) Y (the S outputs of step t feed the
// dS inputs of step t+1, with dS_0 empty), returns the stream X -> Y whose
// memory is extended by S. With the memory-prefix port convention this is a
// retyping of the same fragments.
inline StreamProcess feedback(const StreamProcess& f, std::function<int(int)> s_arity) {
    StreamProcess r;
    r.memory = [f, s_arity](int t) { return f.memory(t) + (t == 0 ? 0 : s_arity(t - 1)); };
    r.in_arity = [f, s_arity](int t) {
        int v = f.in_arity(t) - (t == 0 ? 0 : s_arity(t - 1));
        if (v < 0) throw std::invalid_argument("feedback: fed-back arity exceeds step input arity");
        return v;
    };
    r.out_arity = [f, s_arity](int t) {
        int v = f.out_arity(t) - s_arity(t);
        if (v < 0) throw std::invalid_argument("feedback: fed-back arity exceeds step output arity");
        return v;
    };
    r.step = f.step;
    return r;
}

// Unit delay over a wire-count schedule x: output at step t is the input of
// step t-1. Constructed as the feedback of the block swap.
inline StreamProcess delay_unit(std::function<int(int)> x) {
    StreamProcess f;  // block swap: S_{t-1} (x) X_t -> S_t (x) Y_t with S_t = X_t, Y_t = S_{t-1}
    f.memory = [](int) { return 0; };
    f.in_arity = [x](int t) { return (t == 0 ? 0 : x(t - 1)) + x(t); };
    f.out_arity = f.in_arity;
    f.step = [x](int t) {
        int s_prev = (t == 0 ? 0 : x(t - 1)), xt = x(t);
        std::vector<int> q;
        for (int i = 0; i < xt; ++i) q.push_back(s_prev + i);
        for (int i = 0; i < s_prev; ++i) q.push_back(i);
        return perm_diagram(q);
    };
    return feedback(f, x);
}

// Delay of length d on a single-wire stream: d composed unit delays.
inline StreamProcess delay_stream(int d) {
    if (d < 0) throw std::invalid_argument("delay_stream: negative length");
    if (d == 0) return identity_stream(1);
    StreamProcess r = delay_unit([](int) { return 1; });
    for (int k = 1; k < d; ++k)
        r = stream_compose(r, delay_unit([k](int t) { return t >= k ? 1 : 0; }));
    return r;
}

// ---- unrolling -----------------------------------------------------------------

struct UnrolledProtocol {
    ZxDiagram circuit;  // M_0 (x) X_0 ... X_n -> Y_0 ... Y_n (x) M_{n+1}
    int steps = 0;      // n
    int m0 = 0, m_final = 0;
    std::vector<int> in_arities, out_arities;
};

// Unrolls the first n+1 steps (t = 0..n) into a single diagram, threading the
// memory between steps. Ports are ordered time-major: inputs are the initial
// memory then X_0..X_n, outputs are Y_0..Y_n then the residual memory.
inline UnrolledProtocol unroll(const StreamProcess& s, int n) {
    if (n < 0) throw std::invalid_argument("unroll: need n >= 0");
    auto reordered_step = [&](int t) {
        ZxDiagram f = s.step(t);
        int m_next = s.memory(t + 1), y = s.out_arity(t);
        if (static_cast<int>(f.inputs.size()) != s.memory(t) + s.in_arity(t) ||
            static_cast<int>(f.outputs.size()) != m_next + y)
            throw std::runtime_error("unroll: step " + std::to_string(t) +
                                     " boundary arities do not match the declared types");
        std::vector<int> q;  // [M_{t+1}, Y_t] -> [Y_t, M_{t+1}]
        for (int i = 0; i < y; ++i) q.push_back(m_next + i);
        for (int i = 0; i < m_next; ++i) q.push_back(i);
        return f.compose_with(perm_diagram(q));
    };
    UnrolledProtocol u;
    u.steps = n;
    u.m0 = s.memory(0);
    u.circuit = reordered_step(0);
    int y_acc = s.out_arity(0);
    u.in_arities.push_back(s.in_arity(0));
    u.out_arities.push_back(s.out_arity(0));
    for (int t = 1; t <= n; ++t) {
        int x = s.in_arity(t);
        u.circuit = u.circuit.tensor_with(ZxDiagram::identity(x))
                        .compose_with(ZxDiagram::identity(y_acc).tensor_with(reordered_step(t)));
        y_acc += s.out_arity(t);
        u.in_arities.push_back(x);
        u.out_arities.push_back(s.out_arity(t));
    }
    u.m_final = s.memory(n + 1);
    return u;
}

// ---- component library (qubit-wire fragments) -----------------------------------

// Spin emitter ("photonic machine gun"): the atom is the memory wire; each
// step copies it onto a fresh photon through a Z spider and then applies the
// scheduled single-qubit unitary to the atom.
inline StreamProcess emitter_stream(std::function<ZxDiagram(int)> atom_unitary) {
    StreamProcess s;
    s.memory = [](int) { return 1; };
    s.in_arity = [](int) { return 0; };
    s.out_arity = [](int) { return 1; };
    s.step = [atom_unitary](int t) {
        return ZxDiagram::spider(Color::Z, 1, 2)
            .compose_with(atom_unitary(t).tensor_with(ZxDiagram::identity(1)));
    };
    return s;
}

// Measurement module: destructively measures one qubit per step in the
// scheduled plane/angle, emitting the outcome as variable <prefix><t>.
inline StreamProcess measurement_stream(std::function<Plane(int)> plane,
                                        std::function<double(int)> angle,
                                        std::string var_prefix = "a") {
    StreamProcess s;
    s.memory = [](int) { return 0; };
    s.in_arity = [](int) { return 1; };
    s.out_arity = [](int) { return 0; };
    s.step = [plane, angle, var_prefix](int t) {
        return plane_effect_diagram(plane(t), angle(t), var_prefix + std::to_string(t));
    };
    return s;
}

// Correction module: applies X then Z on one qubit per step, each controlled
// by a scheduled bit expression (a phase of 0, pi, or pi * XOR of variables).
inline StreamProcess correction_stream(std::function<Phase(int)> x_bit,
                                       std::function<Phase(int)> z_bit) {
    StreamProcess s;
    s.memory = [](int) { return 0; };
    s.in_arity = [](int) { return 1; };
    s.out_arity = [](int) { return 1; };
    s.step = [x_bit, z_bit](int t) {
        return ZxDiagram::phase_gate(Color::X, x_bit(t))
            .compose_with(ZxDiagram::phase_gate(Color::Z, z_bit(t)));
    };
    return s;
}

// ---- branch enumeration ----------------------------------------------------------

struct ProtocolBranch {
    OutcomeAssignment outcome;
    QubitTensor map;
    double probability = 0.0;
};

// Enumerates all outcome assignments of a diagram; per branch returns the
// post-selected map and its Born probability on the input density matrix rho
// (open outputs are traced).
inline std::vector<ProtocolBranch> enumerate_branches(const ZxDiagram& d, const QubitTensor& rho) {
    std::set<std::string> vars = d.variables();
    std::vector<std::string> vv(vars.begin(), vars.end());
    if (vv.size() > 22) throw std::runtime_error("enumerate_branches: too many outcome variables");
    std::vector<ProtocolBranch> out;
    for (std::size_t m = 0; m < (std::size_t{1} << vv.size()); ++m) {
        ProtocolBranch b;
        for (std::size_t i = 0; i < vv.size(); ++i) b.outcome[vv[i]] = (m >> i) & 1;
        b.map = d.eval_tensor(b.outcome);
        b.probability = b.map.compose(rho).compose(b.map.dagger()).trace().real();
        out.push_back(std::move(b));
    }
    return out;
}

// ---- dual-rail linear-optical modules ---------------------------------------------

// Appends the dual-rail measurement of qubit q (modes 2q, 2q+1) in plane p at
// angle alpha. Detector variables: <var> counts the |1>-rail clicks (the
// outcome bit), <var>_bar the |0>-rail clicks.
inline void append_measurement_lo(LoCircuit& c, int q, Plane p, double alpha,
                                  const std::string& var) {
    int m0 = 2 * q, m1 = 2 * q + 1;
    if (p == Plane::X) {
        c.bs(m0, m1);
    } else if (p == Plane::Y) {
        c.ps(m1, -kPi / 2);
        c.bs(m0, m1);
    } else if (p == Plane::XY) {
        c.ps(m1, -alpha);
        c.bs(m0, m1);
    } else if (p == Plane::Z) {
        // computational basis: detect the rails directly
    } else {
        throw std::invalid_argument("append_measurement_lo: unsupported plane");
    }
    c.detector(m0, var + "_bar");
    c.detector(m1, var);
}

// Appends the dual-rail Pauli correction X^x Z^z on qubit q.
inline void append_correction_lo(LoCircuit& c, int q, int x, int z) {
    int m0 = 2 * q, m1 = 2 * q + 1;
    if (x) c.swap(m0, m1);
    if (z) c.ps(m1, kPi);
}

// ---- protocol descriptions --------------------------------------------------------

struct ComponentSpec {
    enum class Kind {
        Router,
        Switch,
        Delay,
        Multiplexer,
        Demultiplexer,
        Emitter,
        Measurement,
        Correction,
        Fusion,
        RusBlock
    };
    Kind kind = Kind::Delay;
    int d = 0;                            // delay length / mux arity / RUS rounds
    std::vector<int> schedule;            // router rail schedule per step
    std::string control;                  // switch control variable
    std::vector<std::string> unitaries;   // emitter gate names per step (cyclic)
    std::vector<std::string> planes;      // measurement planes per step (cyclic)
    std::vector<double> angles;           // measurement angles per step (cyclic)
    std::vector<std::string> x_bits, z_bits;  // correction controls (cyclic): "0", "1", or var
    std::string family;                   // RUS fusion family ("X" or "Y")
    FusionSpec fusion;                    // Fusion / RusBlock payload
};

struct Protocol {
    std::vector<ComponentSpec> chain;  // wired in series, dataflow order
    int horizon = 0;                   // last time step n
};

namespace detail {

inline ZxDiagram gate_from_name(const std::string& name) {
    if (name == "I") return ZxDiagram::identity(1);
    if (name == "H") return ZxDiagram::hadamard();
    if (name == "X") return ZxDiagram::phase_gate(Color::X, Phase(Angle::pi()));
    if (name == "Z") return ZxDiagram::phase_gate(Color::Z, Phase(Angle::pi()));
    if (name == "S") return ZxDiagram::phase_gate(Color::Z, Phase(Angle::of_pi(1, 2)));
    throw std::invalid_argument("gate_from_name: unknown gate '" + name + "'");
}

inline Plane plane_from_name(const std::string& name) {
    if (name == "X") return Plane::X;
    if (name == "Y") return Plane::Y;
    if (name == "Z") return Plane::Z;
    if (name == "XY") return Plane::XY;
    if (name == "XZ") return Plane::XZ;
    if (name == "YZ") return Plane::YZ;
    throw std::invalid_argument("plane_from_name: unknown plane '" + name + "'");
}

inline Phase control_phase(const std::string& bit) {
    if (bit == "0") return Phase();
    if (bit == "1") return Phase(Angle::pi());
    return Phase(Angle::zero(), {bit});
}

template <typename T>
const T& cyclic(const std::vector<T>& v, int t, const char* what) {
    if (v.empty()) throw std::invalid_argument(std::string(what) + ": empty schedule");
    return v[static_cast<std::size_t>(t) % v.size()];
}

}  // namespace detail

// Qubit-wire stream of a component. Routers, switches, and (de)multiplexers
// have more than one optical output per logical wire and do not exist on
// qubit wires; they are linear-optical components only.
inline StreamProcess component_stream(const ComponentSpec& c, const std::string& var_prefix) {
    using Kind = ComponentSpec::Kind;
    switch (c.kind) {
        case Kind::Delay:
            return delay_stream(c.d);
        case Kind::Emitter: {
            std::vector<std::string> names = c.unitaries.empty()
                                                 ? std::vector<std::string>{"I"}
                                                 : c.unitaries;
            return emitter_stream([names](int t) {
                return detail::gate_from_name(detail::cyclic(names, t, "emitter"));
            });
        }
        case Kind::Measurement: {
            auto planes = c.planes;
            auto angles = c.angles.empty() ? std::vector<double>{0.0} : c.angles;
            return measurement_stream(
                [planes](int t) {
                    return detail::plane_from_name(detail::cyclic(planes, t, "measurement"));
                },
                [angles](int t) { return detail::cyclic(angles, t, "measurement"); }, var_prefix);
        }
        case Kind::Correction: {
            auto xb = c.x_bits.empty() ? std::vector<std::string>{"0"} : c.x_bits;
            auto zb = c.z_bits.empty() ? std::vector<std::string>{"0"} : c.z_bits;
            return correction_stream(
                [xb](int t) { return detail::control_phase(detail::cyclic(xb, t, "correction")); },
                [zb](int t) { return detail::control_phase(detail::cyclic(zb, t, "correction")); });
        }
        default:
            throw std::invalid_argument(
                "component_stream: component has no qubit-wire semantics (routers, switches and "
                "multiplexers act on optical modes only)");
    }
}

inline StreamProcess protocol_stream(const Protocol& p) {
    if (p.chain.empty()) return identity_stream(1);
    StreamProcess s = component_stream(p.chain[0], "a");
    const char* prefixes[] = {"a", "b", "g", "h", "m", "q", "r", "u", "v", "w"};
    for (std::size_t i = 1; i < p.chain.size(); ++i)
        s = stream_compose(s, component_stream(p.chain[i], prefixes[i % 10] + std::to_string(i)));
    return s;
}

// Exact branch simulation of a protocol chain on qubit wires: unrolls to the
// horizon and enumerates every outcome assignment. rho is the input density
// matrix over (initial memory, X_0..X_n); probabilities sum to 1 for
// trace-preserving chains.
inline std::vector<ProtocolBranch> simulate_protocol_zx(const Protocol& p,
                                                        const QubitTensor& rho) {
    UnrolledProtocol u = unroll(protocol_stream(p), p.horizon);
    return enumerate_branches(u.circuit, rho);
}

// Fock-level simulation of a memoryless correction/measurement chain in
// dual-rail encoding: one qubit per time step on modes (2t, 2t+1). `input` is
// the joint pure state of the n+1 step qubits (0-in, n+1-out tensor).
// Correction controls must be literal bits in this mode.
inline std::vector<ProtocolBranch> simulate_protocol_lo(const Protocol& p,
                                                        const QubitTensor& input) {
    int n = p.horizon;
    if (static_cast<int>(input.n_out) != n + 1 || input.n_in != 0)
        throw std::invalid_argument("simulate_protocol_lo: input must be a pure state on n+1 qubits");
    LoCircuit c;
    c.mode_count = 2 * (n + 1);
    bool measured = false;
    for (const auto& comp : p.chain) {
        using Kind = ComponentSpec::Kind;
        if (comp.kind == Kind::Correction) {
            if (measured)
                throw std::invalid_argument("simulate_protocol_lo: correction after measurement");
            for (int t = 0; t <= n; ++t) {
                const std::string& xb = detail::cyclic(
                    comp.x_bits.empty() ? std::vector<std::string>{"0"} : comp.x_bits, t, "correction");
                const std::string& zb = detail::cyclic(
                    comp.z_bits.empty() ? std::vector<std::string>{"0"} : comp.z_bits, t, "correction");
                if ((xb != "0" && xb != "1") || (zb != "0" && zb != "1"))
                    throw std::invalid_argument(
                        "simulate_protocol_lo: symbolic correction controls are not LO-expressible");
                append_correction_lo(c, t, xb == "1", zb == "1");
            }
        } else if (comp.kind == Kind::Measurement) {
            for (int t = 0; t <= n; ++t) {
                Plane pl = detail::plane_from_name(detail::cyclic(comp.planes, t, "measurement"));
                double al = comp.angles.empty() ? 0.0
                                                : detail::cyclic(comp.angles, t, "measurement");
                append_measurement_lo(c, t, pl, al, "a" + std::to_string(t));
            }
            measured = true;
        } else {
            throw std::invalid_argument(
                "simulate_protocol_lo: only correction/measurement chains are supported");
        }
    }
    std::vector<DetectionBranch> raw = run_circuit(c, dual_rail_encode(input));
    std::vector<ProtocolBranch> out;
    for (const auto& br : raw) {
        ProtocolBranch b;
        for (const auto& [var, count] : br.outcome)
            if (var.size() < 4 || var.substr(var.size() - 4) != "_bar") b.outcome[var] = count;
        b.probability = br.residual.norm_sq();
        b.map = QubitTensor(0, 0);
        out.push_back(std::move(b));
    }
    return out;
}

// ---- routing schedules -------------------------------------------------------------

struct RouterSchedules {
    int d = 0;               // permutation length; the rail bank has 2d rails
    std::vector<int> x, y;   // write and read rail schedules over 2d steps
};

// Router schedules realizing the permutation sigma of length d in time
// encoding: x_t = (t + sigma(t)) mod 2d, y_t = (d + t) mod 2d. The photon of
// input slot t leaves on output slot d + sigma(t).
inline RouterSchedules permutation_schedule(const std::vector<int>& sigma) {
    int d = static_cast<int>(sigma.size());
    std::vector<bool> seen(sigma.size(), false);
    for (int v : sigma) {
        if (v < 0 || v >= d || seen[v])
            throw std::invalid_argument("permutation_schedule: sigma must be a bijection");
        seen[v] = true;
    }
    RouterSchedules r;
    r.d = d;
    for (int t = 0; t < 2 * d; ++t) {
        r.x.push_back((t + sigma[t % d]) % (2 * d));
        r.y.push_back((d + t) % (2 * d));
    }
    return r;
}

// Fock-level simulation of the routed paths. The setup is a demultiplexer
// into a bank of 2d storage rails and a collecting multiplexer: the write
// router addresses rails relative to the arriving slot (photon of slot t is
// stored on rail (x_t - t) mod 2d), the read router absolutely (rail y_u is
// coupled out at step u). Returns the output slot of each input photon,
// simulated one labelled photon at a time.
inline std::vector<int> route_photons(const RouterSchedules& r) {
    int d = r.d, rails = 2 * d;
    int bus_in = rails, bus_out = rails + 1, modes = rails + 2;
    auto swap_unitary = [&](int i, int j) {
        ModeUnitary u(modes);
        for (int k = 0; k < modes; ++k) u.at(k, k) = 1.0;
        u.at(i, i) = 0.0;
        u.at(j, j) = 0.0;
        u.at(i, j) = 1.0;
        u.at(j, i) = 1.0;
        return u;
    };
    std::vector<int> out_slot(static_cast<std::size_t>(d), -1);
    for (int t = 0; t < d; ++t) {
        Occupation occ(static_cast<std::size_t>(modes), 0);
        FockVector state = FockVector::basis(occ);
        for (int u = 0; u < 2 * d && out_slot[t] < 0; ++u) {
            // read before write: a stored photon needs at least one step in the bank
            state = fock_evolve(swap_unitary(r.y[u], bus_out), state);
            double p_out = 0.0;
            for (const auto& [o, amp] : state.amps)
                if (o[static_cast<std::size_t>(bus_out)] == 1) p_out += std::norm(amp);
            if (p_out > 0.5) {
                out_slot[t] = u;
                break;
            }
            if (u == t) {
                Occupation inj(static_cast<std::size_t>(modes), 0);
                inj[static_cast<std::size_t>(bus_in)] = 1;
                state = FockVector::basis(inj);
            }
            int rail = ((r.x[u] - u) % rails + rails) % rails;
            state = fock_evolve(swap_unitary(bus_in, rail), state);
        }
        if (out_slot[t] < 0)
            throw std::runtime_error("route_photons: photon " + std::to_string(t) +
                                     " was not collected within 2d steps");
    }
    return out_slot;
}

// Control bits for the binary-router delay network of size 2^stages: stage i
// bypasses or inserts a delay of 2^i, so the controls are the binary digits
// of the requested delay.
inline std::vector<int> bitstring_delay_controls(int delay, int stages) {
    if (delay < 0 || delay >= (1 << stages))
        throw std::invalid_argument("bitstring_delay_controls: delay out of range");
    std::vector<int> bits;
    for (int i = 0; i < stages; ++i) bits.push_back((delay >> i) & 1);
    return bits;
}

// ---- repeat-until-success fusion ----------------------------------------------------

struct RusTrace {
    std::vector<int> s;  // success flag per round
    std::vector<int> k;  // fused-wire parity error (failure rounds and the success round)
    std::vector<int> j;  // residual measurement outcome (success round only)
    std::vector<int> a, b;  // X-measurement outcomes of leftover photons (post-success)
    int T = -1;              // first-success round, -1 if none
    std::vector<int> c, d;   // correction accumulators
};

struct RusBranchResult {
    RusTrace trace;
    double probability = 0.0;
    QubitTensor map;  // state on the two surviving resource wires
    bool has_pauli_match = false;       // map ~ (Pauli (x) Pauli) . ideal
    std::array<int, 4> pauli = {0, 0, 0, 0};  // xa, za, xb, zb of one match
    bool matches_corollary = false;
};

struct RusReport {
    int rounds = 0;  // attempts (n+1, rounds t = 0..n)
    FusionFamily family = FusionFamily::None;
    std::vector<RusBranchResult> branches;
    std::vector<double> p_first_success;  // P(T = t)
    double p_success = 0.0, p_no_success = 0.0, total_probability = 0.0;
    QubitTensor ideal;           // reference success state (all-zero outcome branch)
    int pauli_match_failures = 0;
    int corollary_divergences = 0;  // success branches where the family formula misses
};

namespace detail {

// Both parties supply one leg per round plus a surviving wire, as (n+2)-leg
// GHZ states. Outputs: [wire A, wire B]; photon pairs are consumed round by
// round by the given per-round effects (2-in 0-out each).
inline ZxDiagram rus_branch_diagram(int n, const std::vector<ZxDiagram>& round_effects) {
    ZxDiagram r;
    int a = r.add_spider(Color::Z), b = r.add_spider(Color::Z);
    r.add_output(a);
    r.add_output(b);
    for (int t = 0; t <= n; ++t) {
        r.add_output(a);
        r.add_output(b);
    }
    r.scalar.star_count = 2;  // two normalized GHZ resources
    ZxDiagram effects = ZxDiagram::identity(2);
    for (const auto& e : round_effects) effects = effects.tensor_with(e);
    return r.compose_with(effects);
}

inline QubitTensor pauli_1q(int x, int z) {
    QubitTensor t = QubitTensor::identity(1);
    if (x) {
        QubitTensor q(1, 1);
        q.at(0, 1) = 1.0;
        q.at(1, 0) = 1.0;
        t = q.compose(t);
    }
    if (z) {
        QubitTensor q(1, 1);
        q.at(0, 0) = 1.0;
        q.at(1, 1) = -1.0;
        t = q.compose(t);
    }
    return t;
}

}  // namespace detail

// A protocol description for the repeat-until-success boosted fusion.
inline Protocol rus_protocol(const FusionSpec& spec, int n_max) {
    if (!has_green_failure(spec))
        throw std::invalid_argument("rus_protocol: the fusion must have green failure");
    ComponentSpec c;
    c.kind = ComponentSpec::Kind::RusBlock;
    c.d = n_max;
    c.fusion = spec;
    FusionClass cls = classify(spec);
    c.family = to_string(cls.family);
    Protocol p;
    p.chain.push_back(std::move(c));
    p.horizon = n_max;
    return p;
}

// Exact branch enumeration of the repeat-until-success protocol with rounds
// t = 0..n against a pair of (n+2)-leg GHZ resources. Failed rounds apply the
// fusion's failure effect (error bit k_t) to the round's photon pair; the
// first success applies the success effect (bits k_T, j_T); leftover photons
// are removed by X measurements (bits a_t, b_t). Correction accumulators
// follow c_t = c_{t-1} + (1-s_t) k_t + s_t a_t and
// d_t = d_{t-1} + (1-s_t)(1-k_t) + s_t b_t (mod 2) from c_{-1} = d_{-1} = 1.
// Every success branch is matched against the all-zero reference branch up to
// a Pauli on each surviving wire; the family-specific correction formulas
// (x = k_T + j_T, z from the accumulators) are checked and divergences
// counted rather than assumed.
inline RusReport rus_statistics(const FusionSpec& spec, int n) {
    if (!has_green_failure(spec))
        throw std::invalid_argument("rus_statistics: the fusion must have green failure");
    if (n < 0 || n > 7) throw std::invalid_argument("rus_statistics: rounds out of range");
    FusionBranchMaps bm = branch_maps(spec);
    FusionClass cls = classify(spec);

    RusReport rep;
    rep.rounds = n + 1;
    rep.family = cls.family;
    rep.p_first_success.assign(static_cast<std::size_t>(n + 1), 0.0);

    auto x_effect = [](int bit) {
        return ZxDiagram::equatorial_effect(Phase(bit ? Angle::pi() : Angle::zero()));
    };

    auto finish_trace = [&](RusTrace& tr) {
        int c = 1, d = 1;
        tr.c.clear();
        tr.d.clear();
        for (int t = 0; t <= n; ++t) {
            int st = tr.s[static_cast<std::size_t>(t)];
            int kt = tr.k[static_cast<std::size_t>(t)];
            int at = tr.a[static_cast<std::size_t>(t)];
            int bt = tr.b[static_cast<std::size_t>(t)];
            c ^= (st ? at : kt);
            d ^= (st ? bt : (1 ^ kt));
            tr.c.push_back(c);
            tr.d.push_back(d);
        }
    };

    auto eval_trace = [&](const RusTrace& tr) {
        std::vector<ZxDiagram> effects;
        for (int t = 0; t <= n; ++t) {
            if (tr.T >= 0 && t < tr.T) {
                effects.push_back(bm.failure.substituted({{"k", tr.k[static_cast<std::size_t>(t)]}}));
            } else if (tr.T < 0) {
                effects.push_back(bm.failure.substituted({{"k", tr.k[static_cast<std::size_t>(t)]}}));
            } else if (t == tr.T) {
                effects.push_back(bm.success.substituted(
                    {{"k", tr.k[static_cast<std::size_t>(t)]}, {"j", tr.j[static_cast<std::size_t>(t)]}}));
            } else {
                effects.push_back(x_effect(tr.a[static_cast<std::size_t>(t)])
                                      .tensor_with(x_effect(tr.b[static_cast<std::size_t>(t)])));
            }
        }
        RusBranchResult res;
        res.trace = tr;
        res.map = detail::rus_branch_diagram(n, effects).eval_tensor();
        double p = 0.0;
        for (const auto& v : res.map.a) p += std::norm(v);
        res.probability = p;
        return res;
    };

    // first-success branches
    for (int T = 0; T <= n; ++T) {
        int pre = T, post = n - T;
        for (int pm = 0; pm < (1 << pre); ++pm)
            for (int kj = 0; kj < 4; ++kj)
                for (std::size_t ab = 0; ab < (std::size_t{1} << (2 * post)); ++ab) {
                    RusTrace tr;
                    tr.T = T;
                    tr.s.assign(static_cast<std::size_t>(n + 1), 0);
                    tr.k.assign(static_cast<std::size_t>(n + 1), 0);
                    tr.j.assign(static_cast<std::size_t>(n + 1), 0);
                    tr.a.assign(static_cast<std::size_t>(n + 1), 0);
                    tr.b.assign(static_cast<std::size_t>(n + 1), 0);
                    for (int t = 0; t < pre; ++t) tr.k[static_cast<std::size_t>(t)] = (pm >> t) & 1;
                    tr.s[static_cast<std::size_t>(T)] = 1;
                    tr.k[static_cast<std::size_t>(T)] = kj & 1;
                    tr.j[static_cast<std::size_t>(T)] = (kj >> 1) & 1;
                    for (int t = T + 1; t <= n; ++t) {
                        tr.s[static_cast<std::size_t>(t)] = 1;
                        std::size_t i = static_cast<std::size_t>(2 * (t - T - 1));
                        tr.a[static_cast<std::size_t>(t)] = (ab >> i) & 1;
                        tr.b[static_cast<std::size_t>(t)] = (ab >> (i + 1)) & 1;
                    }
                    finish_trace(tr);
                    rep.branches.push_back(eval_trace(tr));
                    rep.p_first_success[static_cast<std::size_t>(T)] +=
                        rep.branches.back().probability;
                }
    }
    // all-fail branches
    for (int pm = 0; pm < (1 << (n + 1)); ++pm) {
        RusTrace tr;
        tr.T = -1;
        tr.s.assign(static_cast<std::size_t>(n + 1), 0);
        tr.k.assign(static_cast<std::size_t>(n + 1), 0);
        tr.j.assign(static_cast<std::size_t>(n + 1), 0);
        tr.a.assign(static_cast<std::size_t>(n + 1), 0);
        tr.b.assign(static_cast<std::size_t>(n + 1), 0);
        for (int t = 0; t <= n; ++t) tr.k[static_cast<std::size_t>(t)] = (pm >> t) & 1;
        finish_trace(tr);
        rep.branches.push_back(eval_trace(tr));
        rep.p_no_success += rep.branches.back().probability;
    }

    for (double p : rep.p_first_success) rep.p_success += p;
    rep.total_probability = rep.p_success + rep.p_no_success;

    // reference ideal: the all-zero-outcome immediate-success branch
    for (const auto& br : rep.branches)
        if (br.trace.T == 0) {
            bool zero = br.trace.k[0] == 0 && br.trace.j[0] == 0;
            for (int t = 1; t <= n && zero; ++t)
                zero = br.trace.a[static_cast<std::size_t>(t)] == 0 &&
                       br.trace.b[static_cast<std::size_t>(t)] == 0;
            if (zero) {
                rep.ideal = br.map;
                break;
            }
        }

    // Pauli decomposition of every success branch against the reference
    for (auto& br : rep.branches) {
        if (br.trace.T < 0) continue;
        for (int mask = 0; mask < 16 && !br.has_pauli_match; ++mask) {
            int xa = mask & 1, za = (mask >> 1) & 1, xb = (mask >> 2) & 1, zb = (mask >> 3) & 1;
            QubitTensor cand = detail::pauli_1q(xa, za).kron(detail::pauli_1q(xb, zb))
                                   .compose(rep.ideal);
            cplx lambda;
            if (proportional(br.map, cand, 1e-8, &lambda) && std::abs(lambda) > 1e-9) {
                br.has_pauli_match = true;
                br.pauli = {xa, za, xb, zb};
            }
        }
        if (!br.has_pauli_match) {
            ++rep.pauli_match_failures;
            continue;
        }
        // Family formulas: x = k_T + j_T on the fused wire, z bits from the
        // final accumulators relative to the reference branch's own bits.
        int T = br.trace.T;
        int x = br.trace.k[static_cast<std::size_t>(T)] ^ br.trace.j[static_cast<std::size_t>(T)];
        int zA = br.trace.c.back() ^ 1;  // reference branch has c_n = d_n = 1
        int zB = br.trace.d.back() ^ 1;
        bool ok = false;
        for (int mask = 0; mask < 16 && !ok; ++mask) {
            int xa = mask & 1, za = (mask >> 1) & 1, xb = (mask >> 2) & 1, zb = (mask >> 3) & 1;
            if ((xa ^ xb) != x || za != zA || zb != zB) continue;
            QubitTensor cand = detail::pauli_1q(xa, za).kron(detail::pauli_1q(xb, zb))
                                   .compose(rep.ideal);
            cplx lambda;
            ok = proportional(br.map, cand, 1e-8, &lambda) && std::abs(lambda) > 1e-9;
        }
        br.matches_corollary = ok;
        if (!ok) ++rep.corollary_divergences;
    }
    return rep;
}

}  // namespace fbqc
