// fbqc: fusion-based photonic quantum computing toolkit.
//
// SPDX-License-Identifier: MIT
//
// Open graphs with measurement labels, fusion networks, flow structures
// (gflow, Pauli flow, XY-flow) with verifiers and finders, target-graph
// constructions, and flow-preserving graph rewrites.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fbqc/fusion.hpp"
#include "fbqc/zx.hpp"

namespace fbqc {

// Measurement planes reuse the fusion family enum: XY/XZ/YZ are proper
// planes (with a free angle), X/Y/Z are Pauli measurements (angle 0).
using Plane = FusionFamily;

inline bool is_pauli_plane(Plane p) {
    return p == Plane::X || p == Plane::Y || p == Plane::Z;
}
inline bool is_proper_plane(Plane p) {
    return p == Plane::XY || p == Plane::XZ || p == Plane::YZ;
}

inline Plane plane_from_string(const std::string& s) {
    if (s == "XY") return Plane::XY;
    if (s == "XZ") return Plane::XZ;
    if (s == "YZ") return Plane::YZ;
    if (s == "X") return Plane::X;
    if (s == "Y") return Plane::Y;
    if (s == "Z") return Plane::Z;
    throw std::invalid_argument("plane_from_string: unknown plane '" + s + "'");
}

// ---- labelled open graphs ------------------------------------------------

struct LabelledOpenGraph {
    std::set<int> vertices;
    std::set<std::pair<int, int>> edges;  // stored with first < second
    std::set<int> inputs;
    std::set<int> outputs;
    std::map<int, Plane> plane;   // defined on measured vertices
    std::map<int, double> angle;  // defined on measured vertices (0 if Pauli)

    static std::pair<int, int> normalized(int a, int b) {
        return a < b ? std::pair{a, b} : std::pair{b, a};
    }

    int add_vertex(int v, Plane p = Plane::None, double a = 0.0) {
        vertices.insert(v);
        if (p != Plane::None) {
            plane[v] = p;
            angle[v] = a;
        }
        return v;
    }
    int fresh_vertex() const { return vertices.empty() ? 0 : *vertices.rbegin() + 1; }
    bool has_edge(int a, int b) const { return edges.count(normalized(a, b)) != 0; }
    void add_edge(int a, int b) {
        if (a == b) throw std::invalid_argument("LabelledOpenGraph: self loop");
        edges.insert(normalized(a, b));
    }
    void remove_edge(int a, int b) { edges.erase(normalized(a, b)); }
    // XOR semantics: parallel Hadamard edges cancel
    void toggle_edge(int a, int b) {
        auto e = normalized(a, b);
        if (a == b) throw std::invalid_argument("LabelledOpenGraph: self loop");
        if (!edges.insert(e).second) edges.erase(e);
    }
    std::set<int> neighbours(int v) const {
        std::set<int> r;
        for (const auto& [a, b] : edges) {
            if (a == v) r.insert(b);
            if (b == v) r.insert(a);
        }
        return r;
    }
    // vertices carrying a single-qubit measurement
    std::set<int> measured() const {
        std::set<int> r;
        for (int v : vertices)
            if (!outputs.count(v)) r.insert(v);
        return r;
    }

    void validate() const {
        for (int v : inputs)
            if (!vertices.count(v)) throw std::invalid_argument("graph: input not a vertex");
        for (int v : outputs)
            if (!vertices.count(v)) throw std::invalid_argument("graph: output not a vertex");
        for (const auto& [a, b] : edges)
            if (!vertices.count(a) || !vertices.count(b))
                throw std::invalid_argument("graph: edge endpoint not a vertex");
        for (int v : measured()) {
            auto it = plane.find(v);
            if (it == plane.end() || it->second == Plane::None)
                throw std::invalid_argument("graph: measured vertex without plane");
            if (!angle.count(v)) throw std::invalid_argument("graph: measured vertex without angle");
            if (is_pauli_plane(it->second) &&
                std::abs(std::remainder(angle.at(v), kPi)) > 1e-9)
                throw std::invalid_argument(
                    "graph: Pauli-measured vertex with an angle not a multiple of pi");
        }
    }
};

inline std::set<int> odd_neighbourhood(const LabelledOpenGraph& g, const std::set<int>& k) {
    std::map<int, int> count;
    for (int v : k)
        for (int u : g.neighbours(v)) count[u]++;
    std::set<int> r;
    for (const auto& [u, c] : count)
        if (c % 2) r.insert(u);
    return r;
}

// ---- flow certificates and verifiers --------------------------------------

// The strict partial order is represented by layers: v < w iff
// layer(v) < layer(w); same-layer vertices are incomparable.
struct FlowCertificate {
    std::map<int, std::set<int>> corrections;  // p: measured vertex -> subset of V\I
    std::map<int, int> layer;                  // every vertex; larger = measured later
};

namespace detail {

inline bool flow_fail(std::string* diag, const std::string& msg) {
    if (diag) *diag = msg;
    return false;
}

}  // namespace detail

// Checks the nine Pauli-flow conditions literally; on failure reports the
// first violated condition in `diag`.
inline bool verify_pauli_flow(const LabelledOpenGraph& g, const FlowCertificate& cert,
                              std::string* diag = nullptr) {
    g.validate();
    std::set<int> meas = g.measured();
    for (int v : g.vertices)
        if (!cert.layer.count(v)) return detail::flow_fail(diag, "missing layer for a vertex");
    for (int v : meas)
        if (!cert.corrections.count(v)) return detail::flow_fail(diag, "missing correction set");
    auto lt = [&](int a, int b) { return cert.layer.at(a) < cert.layer.at(b); };
    for (int v : meas) {
        const std::set<int>& p = cert.corrections.at(v);
        for (int w : p) {
            if (!g.vertices.count(w)) return detail::flow_fail(diag, "correction not a vertex");
            if (g.inputs.count(w)) return detail::flow_fail(diag, "correction set touches an input");
        }
        std::set<int> odd = odd_neighbourhood(g, p);
        auto plane_of = [&](int w) { return meas.count(w) ? g.plane.at(w) : Plane::None; };
        // 1: non-X/Y corrections must be strictly later
        for (int w : p) {
            Plane lw = plane_of(w);
            if (lw != Plane::X && lw != Plane::Y && w != v && !lt(v, w))
                return detail::flow_fail(diag, "condition 1: early correction on vertex");
        }
        // 2: non-Y/Z odd-neighbourhood members must be strictly later
        for (int w : odd) {
            Plane lw = plane_of(w);
            if (lw != Plane::Y && lw != Plane::Z && w != v && !lt(v, w))
                return detail::flow_fail(diag, "condition 2: early Z-correction on vertex");
        }
        // 3: earlier Y vertices appear in p(v) iff in Odd(p(v))
        for (int w : meas) {
            if (w == v || plane_of(w) != Plane::Y || !lt(w, v)) continue;
            if (p.count(w) != odd.count(w))
                return detail::flow_fail(diag, "condition 3: unbalanced Y vertex");
        }
        Plane lv = g.plane.at(v);
        bool self = p.count(v) != 0, self_odd = odd.count(v) != 0;
        if (lv == Plane::XY && !(!self && self_odd))
            return detail::flow_fail(diag, "condition 4: XY vertex");
        if (lv == Plane::XZ && !(self && self_odd)) return detail::flow_fail(diag, "condition 5: XZ vertex");
        if (lv == Plane::YZ && !(self && !self_odd))
            return detail::flow_fail(diag, "condition 6: YZ vertex");
        if (lv == Plane::X && !self_odd) return detail::flow_fail(diag, "condition 7: X vertex");
        if (lv == Plane::Z && !self) return detail::flow_fail(diag, "condition 8: Z vertex");
        if (lv == Plane::Y && !(self != self_odd)) return detail::flow_fail(diag, "condition 9: Y vertex");
    }
    if (diag) diag->clear();
    return true;
}

// gflow restricts the planes to XY/XZ/YZ and demands strict lateness of the
// whole correction set and odd neighbourhood.
inline bool verify_gflow(const LabelledOpenGraph& g, const FlowCertificate& cert,
                         std::string* diag = nullptr) {
    g.validate();
    std::set<int> meas = g.measured();
    for (int v : meas)
        if (!is_proper_plane(g.plane.at(v)))
            return detail::flow_fail(diag, "gflow: Pauli-labelled vertex present");
    for (int v : g.vertices)
        if (!cert.layer.count(v)) return detail::flow_fail(diag, "missing layer for a vertex");
    auto lt = [&](int a, int b) { return cert.layer.at(a) < cert.layer.at(b); };
    for (int v : meas) {
        auto it = cert.corrections.find(v);
        if (it == cert.corrections.end()) return detail::flow_fail(diag, "missing correction set");
        const std::set<int>& p = it->second;
        for (int w : p)
            if (g.inputs.count(w)) return detail::flow_fail(diag, "correction set touches an input");
        std::set<int> odd = odd_neighbourhood(g, p);
        for (int w : p)
            if (w != v && !lt(v, w)) return detail::flow_fail(diag, "condition 1: early correction");
        for (int w : odd)
            if (w != v && !lt(v, w)) return detail::flow_fail(diag, "condition 2: early Z-correction");
        Plane lv = g.plane.at(v);
        bool self = p.count(v) != 0, self_odd = odd.count(v) != 0;
        if (lv == Plane::XY && !(!self && self_odd)) return detail::flow_fail(diag, "condition 3: XY");
        if (lv == Plane::XZ && !(self && self_odd)) return detail::flow_fail(diag, "condition 4: XZ");
        if (lv == Plane::YZ && !(self && !self_odd)) return detail::flow_fail(diag, "condition 5: YZ");
    }
    if (diag) diag->clear();
    return true;
}

// ---- flow finders ----------------------------------------------------------

namespace detail {

// dense GF(2) system: rows of 0/1 coefficients with last column the rhs
struct Gf2System {
    std::size_t n_vars = 0;
    std::vector<std::vector<uint8_t>> rows;

    void add_row(std::vector<uint8_t> coeffs, int rhs) {
        coeffs.push_back(static_cast<uint8_t>(rhs));
        rows.push_back(std::move(coeffs));
    }
    // returns one solution if consistent
    std::optional<std::vector<uint8_t>> solve() const {
        std::vector<std::vector<uint8_t>> m = rows;
        std::vector<int> pivot_col;
        std::size_t r = 0;
        for (std::size_t c = 0; c < n_vars && r < m.size(); ++c) {
            std::size_t sel = r;
            while (sel < m.size() && !m[sel][c]) ++sel;
            if (sel == m.size()) continue;
            std::swap(m[r], m[sel]);
            for (std::size_t i = 0; i < m.size(); ++i)
                if (i != r && m[i][c])
                    for (std::size_t j = c; j <= n_vars; ++j) m[i][j] ^= m[r][j];
            pivot_col.push_back(static_cast<int>(c));
            ++r;
        }
        for (std::size_t i = r; i < m.size(); ++i)
            if (m[i][n_vars]) return std::nullopt;
        std::vector<uint8_t> x(n_vars, 0);
        for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = m[i][n_vars];
        return x;
    }
};

// Feasibility of a correction set for v when `later` is the set of vertices
// measured strictly after v (outputs included). All flow conditions become
// GF(2)-linear in the indicator vector of the correction set over V\I.
// `forbidden_odd` lists vertices that must stay outside Odd(p(v)) regardless
// of order (the X-fusion-node constraint); `balanced` lists vertices that must
// be in p(v) exactly when they are in Odd(p(v)) (Y-fusion nodes, which are
// measured before everything else and so can only absorb sign errors).
inline std::optional<std::set<int>> correction_set_for(const LabelledOpenGraph& g, int v,
                                                       const std::set<int>& later,
                                                       const std::set<int>& forbidden_odd = {},
                                                       const std::set<int>& balanced = {}) {
    std::vector<int> support;  // candidate correction vertices
    for (int u : g.vertices)
        if (!g.inputs.count(u)) support.push_back(u);
    std::map<int, int> col;
    for (std::size_t i = 0; i < support.size(); ++i) col[support[i]] = static_cast<int>(i);

    Gf2System sys;
    sys.n_vars = support.size();
    auto row_member = [&](int u) {
        std::vector<uint8_t> r(sys.n_vars, 0);
        if (col.count(u)) r[col.at(u)] = 1;
        return r;
    };
    auto row_odd = [&](int u) {
        std::vector<uint8_t> r(sys.n_vars, 0);
        for (int w : g.neighbours(u))
            if (col.count(w)) r[col.at(w)] ^= 1;
        return r;
    };
    auto row_xor = [](std::vector<uint8_t> a, const std::vector<uint8_t>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
        return a;
    };

    std::set<int> meas = g.measured();
    for (int w : meas) {
        if (w == v || later.count(w)) continue;
        Plane lw = g.plane.at(w);
        if (lw != Plane::X && lw != Plane::Y) sys.add_row(row_member(w), 0);
        if (lw != Plane::Y && lw != Plane::Z) sys.add_row(row_odd(w), 0);
        if (lw == Plane::Y) sys.add_row(row_xor(row_member(w), row_odd(w)), 0);
    }
    for (int w : forbidden_odd)
        if (w != v) sys.add_row(row_odd(w), 0);
    for (int w : balanced)
        if (w != v) sys.add_row(row_xor(row_member(w), row_odd(w)), 0);

    switch (g.plane.at(v)) {
        case Plane::XY:
            sys.add_row(row_member(v), 0);
            sys.add_row(row_odd(v), 1);
            break;
        case Plane::XZ:
            sys.add_row(row_member(v), 1);
            sys.add_row(row_odd(v), 1);
            break;
        case Plane::YZ:
            sys.add_row(row_member(v), 1);
            sys.add_row(row_odd(v), 0);
            break;
        case Plane::X:
            sys.add_row(row_odd(v), 1);
            break;
        case Plane::Z:
            sys.add_row(row_member(v), 1);
            break;
        case Plane::Y:
            sys.add_row(row_xor(row_member(v), row_odd(v)), 1);
            break;
        default:
            throw std::invalid_argument("correction_set_for: vertex without plane");
    }
    auto sol = sys.solve();
    if (!sol) return std::nullopt;
    std::set<int> k;
    for (std::size_t i = 0; i < support.size(); ++i)
        if ((*sol)[i]) k.insert(support[i]);
    return k;
}

inline FlowCertificate layers_to_certificate(const LabelledOpenGraph& g,
                                             const std::vector<std::vector<int>>& rounds,
                                             const std::map<int, std::set<int>>& corr) {
    // rounds[0] holds the vertices measured last
    FlowCertificate cert;
    cert.corrections = corr;
    int top = static_cast<int>(rounds.size());
    for (std::size_t r = 0; r < rounds.size(); ++r)
        for (int v : rounds[r]) cert.layer[v] = top - 1 - static_cast<int>(r);
    for (int v : g.vertices)
        if (!cert.layer.count(v)) cert.layer[v] = top;  // outputs, latest layer
    return cert;
}

// maximally-delayed greedy layering; complete because per-vertex feasibility
// is monotone in the set of strictly-later vertices
inline std::optional<FlowCertificate> find_flow_greedy(const LabelledOpenGraph& g,
                                                       const std::set<int>& forbidden_odd = {},
                                                       const std::set<int>& balanced = {}) {
    g.validate();
    std::set<int> later = g.outputs;
    std::set<int> remaining = g.measured();
    std::vector<std::vector<int>> rounds;
    std::map<int, std::set<int>> corr;
    while (!remaining.empty()) {
        std::vector<int> placed;
        for (int v : remaining) {
            auto k = correction_set_for(g, v, later, forbidden_odd, balanced);
            if (k) {
                placed.push_back(v);
                corr[v] = *k;
            }
        }
        if (placed.empty()) return std::nullopt;
        for (int v : placed) {
            remaining.erase(v);
            later.insert(v);
        }
        rounds.push_back(std::move(placed));
    }
    return layers_to_certificate(g, rounds, corr);
}

// exhaustive reachability over measurement suffixes (sets measured after the
// current vertex); ground-truth oracle for small instances
inline std::optional<FlowCertificate> find_flow_exhaustive(const LabelledOpenGraph& g,
                                                           const std::set<int>& forbidden_odd = {},
                                                           const std::set<int>& balanced = {}) {
    g.validate();
    std::set<int> measured = g.measured();
    std::vector<int> meas(measured.begin(), measured.end());
    if (meas.size() > 14) throw std::runtime_error("find_flow_exhaustive: more than 14 measured vertices");
    std::map<int, int> idx;
    for (std::size_t i = 0; i < meas.size(); ++i) idx[meas[i]] = static_cast<int>(i);
    const std::size_t full = (std::size_t{1} << meas.size()) - 1;
    // parent[mask] = vertex appended to reach mask (-1 unreached, -2 start)
    std::vector<int> parent(full + 1, -1);
    parent[0] = -2;
    std::vector<std::size_t> frontier{0};
    while (!frontier.empty() && parent[full] == -1) {
        std::vector<std::size_t> next;
        for (std::size_t mask : frontier) {
            std::set<int> later = g.outputs;
            for (std::size_t i = 0; i < meas.size(); ++i)
                if ((mask >> i) & 1) later.insert(meas[i]);
            for (std::size_t i = 0; i < meas.size(); ++i) {
                if ((mask >> i) & 1) continue;
                std::size_t m2 = mask | (std::size_t{1} << i);
                if (parent[m2] != -1) continue;
                if (correction_set_for(g, meas[i], later, forbidden_odd, balanced)) {
                    parent[m2] = static_cast<int>(i);
                    next.push_back(m2);
                }
            }
        }
        frontier = std::move(next);
    }
    if (parent[full] == -1) return std::nullopt;
    // walk back to recover a total measurement order (first appended = last measured)
    std::vector<std::vector<int>> rounds;
    std::map<int, std::set<int>> corr;
    std::size_t mask = full;
    while (mask) {
        int i = parent[mask];
        mask ^= std::size_t{1} << i;
        std::set<int> later = g.outputs;
        for (std::size_t j = 0; j < meas.size(); ++j)
            if ((mask >> j) & 1) later.insert(meas[j]);
        corr[meas[i]] = *correction_set_for(g, meas[i], later, forbidden_odd, balanced);
        rounds.push_back({meas[i]});
    }
    std::reverse(rounds.begin(), rounds.end());  // rounds[0] = measured last
    return layers_to_certificate(g, rounds, corr);
}

}  // namespace detail

inline std::optional<FlowCertificate> find_pauli_flow(const LabelledOpenGraph& g) {
    return detail::find_flow_greedy(g);
}
inline std::optional<FlowCertificate> find_pauli_flow_exhaustive(const LabelledOpenGraph& g) {
    return detail::find_flow_exhaustive(g);
}

// ---- measurement effects and target linear maps ----------------------------

// Basis states of the three measurement planes:
//   |+-_{XY,a}> = (|0> +- e^{ia}|1>)/sqrt2
//   |+-_{YZ,a}> = (|+> +- e^{ia}|->)/sqrt2
//   |+-_{XZ,a}> = (|i> +- e^{ia}|-i>)/sqrt2
// Pauli labels are the shared axes: X = (XY,0), Y = (XY,pi/2), Z = (YZ,0).
// Pauli labels tolerate an angle of pi, which selects the flipped basis state.
inline QubitTensor plane_effect(Plane p, double alpha, int outcome = 0) {
    double a = alpha + (outcome ? kPi : 0.0);
    if (p == Plane::X) return plane_effect(Plane::XY, alpha, outcome);
    if (p == Plane::Y) return plane_effect(Plane::XY, kPi / 2 + alpha, outcome);
    if (p == Plane::Z) return plane_effect(Plane::YZ, alpha, outcome);
    cplx e0, e1;  // effect = (e0 e1) as a row
    const double s = std::sqrt(0.5);
    if (p == Plane::XY) {
        e0 = s;
        e1 = s * std::exp(cplx{0, -a});
    } else if (p == Plane::YZ) {
        e0 = 0.5 * (1.0 + std::exp(cplx{0, -a}));
        e1 = 0.5 * (1.0 - std::exp(cplx{0, -a}));
    } else if (p == Plane::XZ) {
        e0 = 0.5 * (1.0 + std::exp(cplx{0, -a}));
        e1 = cplx{0, -0.5} * (1.0 - std::exp(cplx{0, -a}));
    } else {
        throw std::invalid_argument("plane_effect: not a measurement label");
    }
    QubitTensor t(1, 0);
    t.a[0] = e0;
    t.a[1] = e1;
    return t;
}

// 1-in/0-out ZX effect for a plane measurement; if `outcome_var` is nonempty
// the outcome enters as a symbolic k*pi term.
inline ZxDiagram plane_effect_diagram(Plane p, double alpha, const std::string& outcome_var = "") {
    if (p == Plane::X) return plane_effect_diagram(Plane::XY, alpha, outcome_var);
    if (p == Plane::Y) return plane_effect_diagram(Plane::XY, kPi / 2 + alpha, outcome_var);
    if (p == Plane::Z) return plane_effect_diagram(Plane::YZ, alpha, outcome_var);
    Phase ph(Angle::radians(-alpha));
    if (!outcome_var.empty()) ph.pi_terms.insert(outcome_var);
    ZxDiagram d;
    if (p == Plane::XY) {
        int sp = d.add_spider(Color::Z, std::move(ph));
        d.add_input(sp);
    } else if (p == Plane::YZ) {
        int sp = d.add_spider(Color::X, std::move(ph));
        d.add_input(sp);
    } else if (p == Plane::XZ) {
        int frame = d.add_spider(Color::Z, Phase(Angle::of_pi(-1, 2)));
        int sp = d.add_spider(Color::X, std::move(ph));
        d.add_edge(frame, sp);
        d.add_input(frame);
    } else {
        throw std::invalid_argument("plane_effect_diagram: not a measurement label");
    }
    d.scalar.star_count = 1;
    return d;
}

// Graph-state diagram of a labelled open graph with one boundary wire per
// vertex (inputs first, then an output port for every vertex, measured or
// not); vertex_to_node reports the spider of each vertex.
inline ZxDiagram open_graph_state_diagram(const LabelledOpenGraph& g,
                                          std::map<int, int>* vertex_to_node = nullptr) {
    g.validate();
    ZxDiagram d;
    std::map<int, int> node;
    for (int v : g.vertices) node[v] = d.add_spider(Color::Z);
    for (const auto& [a, b] : g.edges) d.add_edge(node[a], node[b], true);
    for (int v : g.inputs) d.add_input(node[v]);
    for (int v : g.vertices) d.add_output(node[v]);
    d.scalar.star_count =
        static_cast<int>(g.vertices.size()) - static_cast<int>(g.inputs.size()) - static_cast<int>(g.edges.size());
    if (vertex_to_node) *vertex_to_node = node;
    return d;
}

// Target linear map: graph state with plane effects attached to measured
// vertices. With `with_outcome_vars`, each measured vertex v gets outcome
// variable "k<v>". Port order of the result: inputs as given, outputs are the
// output vertices in ascending order.
inline ZxDiagram target_linear_map(const LabelledOpenGraph& g, bool with_outcome_vars = false) {
    ZxDiagram d = open_graph_state_diagram(g);
    ZxDiagram effects;
    std::size_t idx = 0;
    for (int v : g.vertices) {
        ZxDiagram cell;
        if (g.outputs.count(v)) {
            cell = ZxDiagram::identity(1);
        } else {
            std::string var = with_outcome_vars ? ("k" + std::to_string(v)) : "";
            cell = plane_effect_diagram(g.plane.at(v), g.angle.at(v), var);
        }
        effects = (idx++ == 0) ? cell : effects.tensor_with(cell);
    }
    return d.compose_with(effects);
}

// ---- fusion networks -------------------------------------------------------

struct NetworkFusion {
    int a = 0;
    int b = 0;
    Plane plane = Plane::X;
    double angle = 0.0;
};

struct FusionNetwork {
    LabelledOpenGraph resource;
    std::vector<NetworkFusion> fusions;  // multiset; same pair may repeat
    std::map<int, int> clifford;         // c: measured vertex -> {0..3}; absent = 0

    int clifford_of(int v) const {
        auto it = clifford.find(v);
        return it == clifford.end() ? 0 : ((it->second % 4) + 4) % 4;
    }
    bool is_xy() const {
        for (const auto& f : fusions)
            if (f.plane != Plane::X && f.plane != Plane::Y) return false;
        for (const auto& [v, c] : clifford)
            if (c % 4 != 0) return false;
        return true;
    }
    void validate() const {
        resource.validate();
        for (const auto& f : fusions) {
            if (!resource.vertices.count(f.a) || !resource.vertices.count(f.b) || f.a == f.b)
                throw std::invalid_argument("network: bad fusion endpoints");
            if (resource.outputs.count(f.a) || resource.outputs.count(f.b))
                throw std::invalid_argument("network: fusion endpoint is an output");
            if (f.plane == Plane::None) throw std::invalid_argument("network: unlabelled fusion");
            if (is_pauli_plane(f.plane) && std::abs(f.angle) > 1e-12)
                throw std::invalid_argument("network: Pauli fusion with nonzero angle");
        }
        for (const auto& [v, c] : clifford) {
            (void)c;
            if (!resource.vertices.count(v) || resource.outputs.count(v))
                throw std::invalid_argument("network: Clifford parameter on non-measured vertex");
        }
    }
};

// Measurement-label change induced by the Clifford parameter c; equivalent to
// measuring after the inverse phase gate S^{-c}:
//   XY: angle += c*pi/2
//   XZ: plane swaps to YZ when c odd, angle *= (-1)^{ceil(c/2)}
//   YZ: plane swaps to XZ when c odd, angle *= (-1)^{floor(c/2)}
//   X/Y swap when c odd; Z unchanged.
inline void apply_clifford_parameter(Plane& p, double& alpha, int c) {
    c = ((c % 4) + 4) % 4;
    if (c == 0) return;
    const Plane p0 = p;
    const double a0 = alpha;
    switch (p) {
        case Plane::XY:
            alpha = wrap_angle(alpha + c * kPi / 2);
            break;
        case Plane::XZ:
            alpha = wrap_angle(((c + 1) / 2) % 2 ? -alpha : alpha);
            if (c % 2) p = Plane::YZ;
            break;
        case Plane::YZ:
            alpha = wrap_angle((c / 2) % 2 ? -alpha : alpha);
            if (c % 2) p = Plane::XZ;
            break;
        case Plane::X:
            if (c % 2) p = Plane::Y;
            break;
        case Plane::Y:
            if (c % 2) p = Plane::X;
            break;
        default:
            break;  // Z and unmeasured unchanged
    }
    // Pick the basis-state representative exactly: the relabelled effect must
    // equal effect(p0, a0) composed with the inverse phase gate; a pi shift on
    // the angle selects the flipped state.
    QubitTensor folded = plane_effect(p0, a0, 0);
    folded.a[1] *= std::exp(cplx{0, -c * kPi / 2});
    cplx lambda;
    if (!proportional(plane_effect(p, alpha, 0), folded, 1e-9, &lambda))
        alpha = wrap_angle(alpha + kPi);
}

// Adds one vertex per fusion (adjacent to its endpoints, carrying the fusion
// label) and folds the Clifford parameters into the measurement labels.
inline LabelledOpenGraph target_open_graph(const FusionNetwork& n,
                                           std::vector<int>* fusion_vertices = nullptr) {
    n.validate();
    LabelledOpenGraph g = n.resource;
    for (int v : g.measured()) {
        Plane p = g.plane.at(v);
        double a = g.angle.at(v);
        apply_clifford_parameter(p, a, n.clifford_of(v));
        g.plane[v] = p;
        g.angle[v] = a;
    }
    int next = g.fresh_vertex();
    if (fusion_vertices) fusion_vertices->clear();
    for (const auto& f : n.fusions) {
        int vf = next++;
        g.add_vertex(vf, f.plane, f.angle);
        g.add_edge(vf, f.a);
        g.add_edge(vf, f.b);
        if (fusion_vertices) fusion_vertices->push_back(vf);
    }
    return g;
}

// Simplified target graph of an XY network: X fusions merge their endpoints
// into the fusion vertex; Y fusions toggle a Hadamard edge between the
// endpoints and advance each endpoint's Clifford parameter by one.
//
// Preconditions beyond the XY restriction: no vertex may belong to two X
// fusions, X-fused endpoints must be non-adjacent non-input vertices, and at
// least one endpoint of every X fusion is X-measured (the merged vertex
// inherits the other endpoint's label).
inline LabelledOpenGraph simplified_target_graph(const FusionNetwork& n,
                                                 std::map<int, int>* vertex_map = nullptr) {
    n.validate();
    if (!n.is_xy()) throw std::invalid_argument("simplified_target_graph: not an XY network");
    LabelledOpenGraph g;
    g.inputs = n.resource.inputs;
    g.outputs = n.resource.outputs;

    std::map<int, int> quot;  // resource vertex -> representative in the result
    for (int v : n.resource.vertices) quot[v] = v;
    int next = n.resource.fresh_vertex();
    std::set<int> in_x_fusion;
    for (const auto& f : n.fusions) {
        if (f.plane != Plane::X) continue;
        if (in_x_fusion.count(f.a) || in_x_fusion.count(f.b))
            throw std::invalid_argument("simplified_target_graph: vertex in two X fusions");
        if (n.resource.has_edge(f.a, f.b))
            throw std::invalid_argument("simplified_target_graph: adjacent X-fused vertices");
        if (n.resource.inputs.count(f.a) || n.resource.inputs.count(f.b))
            throw std::invalid_argument("simplified_target_graph: X fusion on an input");
        Plane pa = n.resource.plane.at(f.a), pb = n.resource.plane.at(f.b);
        int vf = next++;
        if (pb == Plane::X)
            g.add_vertex(vf, pa, n.resource.angle.at(f.a));
        else if (pa == Plane::X)
            g.add_vertex(vf, pb, n.resource.angle.at(f.b));
        else
            throw std::invalid_argument("simplified_target_graph: X fusion without X-measured endpoint");
        quot[f.a] = quot[f.b] = vf;
        in_x_fusion.insert(f.a);
        in_x_fusion.insert(f.b);
    }
    for (int v : n.resource.vertices) {
        if (in_x_fusion.count(v)) continue;
        Plane p = n.resource.outputs.count(v) ? Plane::None : n.resource.plane.at(v);
        g.add_vertex(v, p, p == Plane::None ? 0.0 : n.resource.angle.at(v));
    }
    for (const auto& [a, b] : n.resource.edges) {
        if (quot.at(a) == quot.at(b))
            throw std::invalid_argument("simplified_target_graph: X fusion merges adjacent vertices");
        g.toggle_edge(quot.at(a), quot.at(b));
    }
    std::map<int, int> extra_c;
    for (const auto& f : n.fusions) {
        if (f.plane != Plane::Y) continue;
        int a = quot.at(f.a), b = quot.at(f.b);
        if (a == b) throw std::invalid_argument("simplified_target_graph: Y fusion on merged vertex");
        g.toggle_edge(a, b);
        // the zero-outcome success branch leaves an S gate on each endpoint,
        // which folds into the endpoint's effect as Clifford parameter 3
        extra_c[a] += 3;
        extra_c[b] += 3;
    }
    for (const auto& [v, c] : extra_c) {
        if (g.outputs.count(v))
            throw std::invalid_argument("simplified_target_graph: Y fusion on an output");
        Plane p = g.plane.at(v);
        double a = g.angle.at(v);
        apply_clifford_parameter(p, a, c % 4);
        g.plane[v] = p;
        g.angle[v] = a;
    }
    if (vertex_map) *vertex_map = quot;
    return g;
}

// ---- XY-flow ----------------------------------------------------------------

namespace detail {

// X-fusion vertices of the target open graph: corrections must never appear
// in their odd neighbourhood
inline std::set<int> x_fusion_vertices(const FusionNetwork& n, const LabelledOpenGraph&,
                                       const std::vector<int>& fusion_vertices) {
    std::set<int> r;
    for (std::size_t i = 0; i < n.fusions.size(); ++i)
        if (n.fusions[i].plane == Plane::X) r.insert(fusion_vertices[i]);
    return r;
}

inline std::set<int> y_fusion_vertices(const FusionNetwork& n,
                                       const std::vector<int>& fusion_vertices) {
    std::set<int> r;
    for (std::size_t i = 0; i < n.fusions.size(); ++i)
        if (n.fusions[i].plane == Plane::Y) r.insert(fusion_vertices[i]);
    return r;
}

}  // namespace detail

inline bool verify_xy_flow(const FusionNetwork& n, const FlowCertificate& cert,
                           std::string* diag = nullptr) {
    if (!n.is_xy()) return detail::flow_fail(diag, "not an XY network");
    std::vector<int> fusion_vertices;
    LabelledOpenGraph target = target_open_graph(n, &fusion_vertices);
    if (!verify_pauli_flow(target, cert, diag)) return false;
    std::set<int> xf = detail::x_fusion_vertices(n, target, fusion_vertices);
    std::set<int> yf = detail::y_fusion_vertices(n, fusion_vertices);
    for (const auto& [v, p] : cert.corrections) {
        std::set<int> odd = odd_neighbourhood(target, p);
        for (int f : xf)
            if (f != v && odd.count(f))
                return detail::flow_fail(diag, "correction routed through an X-fusion vertex");
        // fusions are measured first, so a Y-fusion node can only take the
        // sign-safe combined X and Z correction
        for (int f : yf)
            if (f != v && p.count(f) != odd.count(f))
                return detail::flow_fail(diag, "unbalanced correction on a Y-fusion vertex");
    }
    if (diag) diag->clear();
    return true;
}

inline std::optional<FlowCertificate> find_xy_flow(const FusionNetwork& n) {
    if (!n.is_xy()) throw std::invalid_argument("find_xy_flow: not an XY network");
    std::vector<int> fusion_vertices;
    LabelledOpenGraph target = target_open_graph(n, &fusion_vertices);
    return detail::find_flow_greedy(target, detail::x_fusion_vertices(n, target, fusion_vertices),
                                    detail::y_fusion_vertices(n, fusion_vertices));
}
inline std::optional<FlowCertificate> find_xy_flow_exhaustive(const FusionNetwork& n) {
    if (!n.is_xy()) throw std::invalid_argument("find_xy_flow_exhaustive: not an XY network");
    std::vector<int> fusion_vertices;
    LabelledOpenGraph target = target_open_graph(n, &fusion_vertices);
    return detail::find_flow_exhaustive(target,
                                        detail::x_fusion_vertices(n, target, fusion_vertices),
                                        detail::y_fusion_vertices(n, fusion_vertices));
}

// ---- flow-preserving rewrites ------------------------------------------------

// Splits vertex v into the chain v — f — b: neighbours listed in `to_b` move
// to the new vertex b, the rest stay on v; f and b are X-measured and v keeps
// its label. Inverse of merging an X fusion into the simplified graph.
inline LabelledOpenGraph x_fusion_split(const LabelledOpenGraph& g, int v, const std::set<int>& to_b,
                                        int* b_out = nullptr, int* f_out = nullptr) {
    g.validate();
    if (!g.vertices.count(v) || g.outputs.count(v) || g.inputs.count(v))
        throw std::invalid_argument("x_fusion_split: vertex must be measured and not an input");
    std::set<int> nv = g.neighbours(v);
    for (int w : to_b)
        if (!nv.count(w)) throw std::invalid_argument("x_fusion_split: not a neighbour of the vertex");
    LabelledOpenGraph r = g;
    int f = r.fresh_vertex();
    r.add_vertex(f, Plane::X, 0.0);
    int b = r.fresh_vertex();
    r.add_vertex(b, Plane::X, 0.0);
    for (int w : to_b) {
        r.remove_edge(v, w);
        r.add_edge(b, w);
    }
    r.add_edge(v, f);
    r.add_edge(f, b);
    if (b_out) *b_out = b;
    if (f_out) *f_out = f;
    return r;
}

// Replaces the Hadamard edge (a, b) by a Y-measured vertex adjacent to both
// endpoints, undoing the endpoint Clifford parameters (c: 1 -> 0).
inline LabelledOpenGraph y_fusion_insert(const LabelledOpenGraph& g, int a, int b, int* f_out = nullptr) {
    g.validate();
    if (!g.has_edge(a, b)) throw std::invalid_argument("y_fusion_insert: edge not present");
    if (g.outputs.count(a) || g.outputs.count(b))
        throw std::invalid_argument("y_fusion_insert: endpoint is an output");
    LabelledOpenGraph r = g;
    r.remove_edge(a, b);
    int f = r.fresh_vertex();
    r.add_vertex(f, Plane::Y, 0.0);
    r.add_edge(f, a);
    r.add_edge(f, b);
    for (int v : {a, b}) {
        Plane p = r.plane.at(v);
        double al = r.angle.at(v);
        apply_clifford_parameter(p, al, 1);  // inverse of the c = 3 fold
        r.plane[v] = p;
        r.angle[v] = al;
    }
    if (f_out) *f_out = f;
    return r;
}

// Rewrites each fusion to act on fresh leaf chains (two X-measured vertices
// per endpoint), so every resource vertex takes part in at most one fusion
// and all fused vertices are X-measured.
inline FusionNetwork destructive_inflate(const FusionNetwork& n) {
    n.validate();
    FusionNetwork r = n;
    r.fusions.clear();
    int next = r.resource.fresh_vertex();
    for (const auto& f : n.fusions) {
        int u0 = next++, u1 = next++, v0 = next++, v1 = next++;
        for (int w : {u0, u1, v0, v1}) r.resource.add_vertex(w, Plane::X, 0.0);
        r.resource.add_edge(f.a, u0);
        r.resource.add_edge(u0, u1);
        r.resource.add_edge(f.b, v0);
        r.resource.add_edge(v0, v1);
        r.fusions.push_back({u1, v1, f.plane, f.angle});
    }
    return r;
}

// ---- DOT export ----------------------------------------------------------------

inline std::string graph_to_dot(const LabelledOpenGraph& g) {
    std::ostringstream os;
    os << "graph open_graph {\n";
    for (int v : g.vertices) {
        std::string color = "gray";
        std::string label = std::to_string(v);
        if (!g.outputs.count(v)) {
            Plane p = g.plane.at(v);
            color = (p == Plane::XY || p == Plane::X)   ? "green"
                    : (p == Plane::XZ || p == Plane::Y) ? "orange"
                                                        : "red";
            label += std::string(":") + to_string(p);
        }
        os << "  v" << v << " [label=\"" << label << "\", color=" << color;
        if (g.inputs.count(v)) os << ", shape=box";
        os << "];\n";
    }
    for (const auto& [a, b] : g.edges) os << "  v" << a << " -- v" << b << " [style=dashed];\n";
    os << "}\n";
    return os.str();
}

}  // namespace fbqc
