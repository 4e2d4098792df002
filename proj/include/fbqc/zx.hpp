// fbqc: fusion-based photonic quantum computing toolkit.
//
// SPDX-License-Identifier: MIT
//
// ZX diagrams: Z/X spiders with symbolic Boolean-affine phases, plain and
// Hadamard edges, explicit scalar, ordered input/output ports. Exact tensor
// evaluation, composition, substitution, proportionality checks, graph
// states, and CP (Born-rule) probabilities.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fbqc/phase.hpp"
#include "fbqc/tensor.hpp"

namespace fbqc {

enum class Color { Z, X };

using OutcomeAssignment = std::map<std::string, int>;

// A diagram node: either a spider or a boundary stub (degree-1 marker for an
// input/output port; a bare wire is an edge joining two boundary stubs).
struct ZxNode {
    bool boundary = false;
    Color color = Color::Z;
    Phase phase;
};

struct ZxEdge {
    int a = 0;
    int b = 0;
    bool h = false;  // Hadamard edge
};

class ZxDiagram {
  public:
    std::map<int, ZxNode> nodes;
    std::vector<ZxEdge> edges;
    std::vector<int> inputs;   // boundary node ids, port order
    std::vector<int> outputs;  // boundary node ids, port order
    Scalar scalar;

    int add_spider(Color c, Phase p = Phase()) {
        int id = next_id_++;
        nodes[id] = ZxNode{false, c, std::move(p)};
        return id;
    }
    int add_boundary() {
        int id = next_id_++;
        nodes[id] = ZxNode{true, Color::Z, Phase()};
        return id;
    }
    void add_edge(int a, int b, bool h = false) { edges.push_back({a, b, h}); }

    // Keeps freshly allocated ids above ids injected by deserialization.
    void bump_next_id(int id) {
        if (id >= next_id_) next_id_ = id + 1;
    }

    // Adds an input port attached to node v (or a fresh dangling port).
    int add_input(int v = -1, bool h = false) {
        int b = add_boundary();
        if (v >= 0) add_edge(b, v, h);
        inputs.push_back(b);
        return b;
    }
    int add_output(int v = -1, bool h = false) {
        int b = add_boundary();
        if (v >= 0) add_edge(b, v, h);
        outputs.push_back(b);
        return b;
    }

    std::set<std::string> variables() const {
        std::set<std::string> vs;
        for (const auto& [id, n] : nodes)
            for (const auto& v : n.phase.pi_terms) vs.insert(v);
        for (const auto& v : scalar.sign_vars) vs.insert(v);
        return vs;
    }

    std::vector<ZxEdge> incident(int v) const {
        std::vector<ZxEdge> r;
        for (const auto& e : edges)
            if (e.a == v || e.b == v) r.push_back(e);
        return r;
    }
    int degree(int v) const {
        int d = 0;
        for (const auto& e : edges) {
            if (e.a == v) ++d;
            if (e.b == v) ++d;  // self loop counts twice
        }
        return d;
    }

    // ---- substitution ------------------------------------------------------

    ZxDiagram substituted(const OutcomeAssignment& a) const {
        ZxDiagram d = *this;
        for (auto& [id, n] : d.nodes) {
            for (const auto& [var, val] : a) {
                auto it = n.phase.pi_terms.find(var);
                if (it != n.phase.pi_terms.end()) {
                    n.phase.pi_terms.erase(it);
                    if (val) n.phase.static_angle = n.phase.static_angle + Angle::pi();
                }
            }
        }
        for (const auto& [var, val] : a) {
            auto it = d.scalar.sign_vars.find(var);
            if (it != d.scalar.sign_vars.end()) {
                d.scalar.sign_vars.erase(it);
                if (val) d.scalar.factor = -d.scalar.factor;
            }
        }
        return d;
    }

    // ---- tensor evaluation -------------------------------------------------

    QubitTensor eval_tensor(const OutcomeAssignment& asg = {}) const {
        // Resolve phases; error on unassigned variables.
        auto angle_of = [&](const Phase& p) -> double {
            double v = p.static_angle.value();
            for (const auto& var : p.pi_terms) {
                auto it = asg.find(var);
                if (it == asg.end())
                    throw std::runtime_error("eval_tensor: unassigned outcome variable '" + var + "'");
                if (it->second) v += kPi;
            }
            return v;
        };

        // One leg id per edge end; plain edges share a single id, Hadamard
        // edges get an explicit H tensor between two ids.
        std::vector<Tensor> net;
        std::map<int, std::vector<int>> node_legs;  // node id -> leg ids
        int next_leg = 0;
        int loop_stars = 0;      // scalar corrections from self loops
        int loop_pi_count = 0;   // unused; self-loop pi folded into phase below
        (void)loop_pi_count;
        std::map<int, int> extra_pi;  // node -> # of H self loops (each adds pi + star)

        for (const auto& e : edges) {
            if (e.a == e.b) {
                // Self loop: plain is a no-op on a spider; Hadamard self loop
                // multiplies each branch by (1/sqrt2)(-1)^z = star + pi phase.
                if (e.h) { ++loop_stars; extra_pi[e.a] += 1; }
                continue;
            }
            if (!e.h) {
                if (nodes.at(e.a).boundary && nodes.at(e.b).boundary) {
                    // Bare wire: no spider claims this leg, so emit an
                    // explicit identity tensor between two fresh legs.
                    int la = next_leg++, lb = next_leg++;
                    node_legs[e.a].push_back(la);
                    node_legs[e.b].push_back(lb);
                    Tensor idt({la, lb});
                    idt.a[0] = 1.0; idt.a[3] = 1.0;
                    net.push_back(std::move(idt));
                } else {
                    int l = next_leg++;
                    node_legs[e.a].push_back(l);
                    node_legs[e.b].push_back(l);
                }
            } else {
                int la = next_leg++, lb = next_leg++;
                node_legs[e.a].push_back(la);
                node_legs[e.b].push_back(lb);
                Tensor h({la, lb});
                const double s = 1.0 / std::sqrt(2.0);
                h.a[0] = s; h.a[1] = s; h.a[2] = s; h.a[3] = -s;
                net.push_back(std::move(h));
            }
        }

        std::map<int, int> boundary_leg;  // boundary node -> free leg id
        for (const auto& [id, n] : nodes) {
            auto legs_it = node_legs.find(id);
            std::vector<int> legs = (legs_it == node_legs.end()) ? std::vector<int>{} : legs_it->second;
            if (n.boundary) {
                if (legs.size() != 1)
                    throw std::runtime_error("eval_tensor: boundary port must have degree exactly 1");
                boundary_leg[id] = legs[0];
                continue;
            }
            double phi = angle_of(n.phase) + kPi * (extra_pi.count(id) ? extra_pi[id] : 0);
            Tensor t(legs);
            const std::size_t nl = legs.size();
            if (n.color == Color::Z) {
                t.a[0] += 1.0;
                t.a[t.a.size() - 1] += expi(phi);
            } else {
                // X spider: amplitude(b) = 2^{-n/2} (1 + e^{i phi} (-1)^{|b|}).
                double norm = std::pow(2.0, -static_cast<double>(nl) / 2.0);
                for (std::size_t b = 0; b < t.a.size(); ++b) {
                    int par = __builtin_popcountll(b) & 1;
                    t.a[b] = norm * (cplx{1, 0} + expi(phi) * (par ? -1.0 : 1.0));
                }
            }
            net.push_back(std::move(t));
        }

        Tensor result = contract_network(std::move(net));

        // Assemble into (out, in) matrix layout, port 0 most significant.
        QubitTensor q(inputs.size(), outputs.size());
        cplx sc = scalar.factor * std::pow(std::sqrt(0.5), scalar.star_count + loop_stars);
        for (const auto& var : scalar.sign_vars) {
            auto it = asg.find(var);
            if (it == asg.end())
                throw std::runtime_error("eval_tensor: unassigned scalar sign variable '" + var + "'");
            if (it->second) sc = -sc;
        }

        std::vector<int> port_bitpos;  // bit position in result index per port, outputs then inputs
        auto leg_pos = [&](int node) {
            int leg = boundary_leg.at(node);
            auto it = std::find(result.legs.begin(), result.legs.end(), leg);
            if (it == result.legs.end()) throw std::runtime_error("eval_tensor: lost boundary leg");
            return static_cast<int>(result.legs.size() - 1 - (it - result.legs.begin()));
        };
        for (std::size_t idx = 0; idx < result.a.size(); ++idx) {
            std::size_t in = 0, out = 0;
            for (std::size_t p = 0; p < outputs.size(); ++p)
                if ((idx >> leg_pos(outputs[p])) & 1) out |= std::size_t{1} << (outputs.size() - 1 - p);
            for (std::size_t p = 0; p < inputs.size(); ++p)
                if ((idx >> leg_pos(inputs[p])) & 1) in |= std::size_t{1} << (inputs.size() - 1 - p);
            q.at(out, in) = result.a[idx] * sc;
        }
        return q;
    }

    // ---- composition -------------------------------------------------------

    // Disjoint union with port concatenation.
    ZxDiagram tensor_with(const ZxDiagram& o) const {
        ZxDiagram d = *this;
        std::map<int, int> remap;
        for (const auto& [id, n] : o.nodes) {
            int nid = d.next_id_++;
            d.nodes[nid] = n;
            remap[id] = nid;
        }
        for (const auto& e : o.edges) d.edges.push_back({remap.at(e.a), remap.at(e.b), e.h});
        for (int i : o.inputs) d.inputs.push_back(remap.at(i));
        for (int i : o.outputs) d.outputs.push_back(remap.at(i));
        d.scalar = d.scalar * o.scalar;
        return d;
    }

    // Sequential composition: o applied after *this (outputs of *this plug
    // into inputs of o). Shared variable names stay shared.
    ZxDiagram compose_with(const ZxDiagram& o) const {
        if (outputs.size() != o.inputs.size())
            throw std::invalid_argument("compose: arity mismatch");
        ZxDiagram d = *this;
        std::map<int, int> remap;
        for (const auto& [id, n] : o.nodes) {
            int nid = d.next_id_++;
            d.nodes[nid] = n;
            remap[id] = nid;
        }
        for (const auto& e : o.edges) d.edges.push_back({remap.at(e.a), remap.at(e.b), e.h});
        d.scalar = d.scalar * o.scalar;

        std::vector<int> lhs_out = d.outputs;
        std::vector<int> rhs_in;
        for (int i : o.inputs) rhs_in.push_back(remap.at(i));
        d.outputs.clear();
        for (int i : o.outputs) d.outputs.push_back(remap.at(i));

        for (std::size_t k = 0; k < lhs_out.size(); ++k) d.eliminate_pair(lhs_out[k], rhs_in[k]);
        return d;
    }

    // ---- helpers / zoo -----------------------------------------------------

    static ZxDiagram identity(std::size_t n) {
        ZxDiagram d;
        for (std::size_t i = 0; i < n; ++i) {
            int a = d.add_boundary(), b = d.add_boundary();
            d.add_edge(a, b, false);
            d.inputs.push_back(a);
            d.outputs.push_back(b);
        }
        return d;
    }

    static ZxDiagram hadamard() {
        ZxDiagram d;
        int a = d.add_boundary(), b = d.add_boundary();
        d.add_edge(a, b, true);
        d.inputs.push_back(a);
        d.outputs.push_back(b);
        return d;
    }

    // 1-in/1-out phase spider.
    static ZxDiagram phase_gate(Color c, Phase p) {
        ZxDiagram d;
        int s = d.add_spider(c, std::move(p));
        d.add_input(s);
        d.add_output(s);
        return d;
    }
    // A single spider with the given boundary arity.
    static ZxDiagram spider(Color c, std::size_t n_in, std::size_t n_out, Phase p = Phase()) {
        ZxDiagram d;
        int s = d.add_spider(c, std::move(p));
        for (std::size_t i = 0; i < n_in; ++i) d.add_input(s);
        for (std::size_t i = 0; i < n_out; ++i) d.add_output(s);
        return d;
    }

    static ZxDiagram z_phase(Angle a) { return phase_gate(Color::Z, Phase(a)); }
    static ZxDiagram x_phase(Angle a) { return phase_gate(Color::X, Phase(a)); }

    // Exact CZ gate (two Z spiders, Hadamard edge, one negative star).
    static ZxDiagram cz() {
        ZxDiagram d;
        int u = d.add_spider(Color::Z), v = d.add_spider(Color::Z);
        d.add_edge(u, v, true);
        d.add_input(u); d.add_input(v);
        d.add_output(u); d.add_output(v);
        d.scalar.star_count = -1;
        return d;
    }

    // Normalized |+_alpha> = (|0> + e^{i alpha}|1>)/sqrt2 state (0-in/1-out).
    static ZxDiagram plus_state(Phase p = Phase()) {
        ZxDiagram d;
        int s = d.add_spider(Color::Z, std::move(p));
        d.add_output(s);
        d.scalar.star_count = 1;
        return d;
    }

    // Normalized equatorial effect <+_alpha| = (<0| + e^{-i alpha}<1|)/sqrt2
    // represented as a Z spider effect with phase -alpha (1-in/0-out).
    static ZxDiagram equatorial_effect(Phase p) {
        ZxDiagram d;
        Phase q(-p.static_angle, p.pi_terms);
        int s = d.add_spider(Color::Z, std::move(q));
        d.add_input(s);
        d.scalar.star_count = 1;
        return d;
    }

    // ---- comparisons -------------------------------------------------------

    std::optional<cplx> equal_up_to_scalar(const ZxDiagram& other, double tol = kTol) const {
        if (inputs.size() != other.inputs.size() || outputs.size() != other.outputs.size())
            return std::nullopt;
        std::set<std::string> vars = variables();
        for (const auto& v : other.variables()) vars.insert(v);
        std::vector<std::string> vv(vars.begin(), vars.end());
        if (vv.size() > 20) throw std::runtime_error("equal_up_to_scalar: too many variables");
        QubitTensor all1(0, 0), all2(0, 0);
        std::vector<cplx> e1, e2;
        for (std::size_t m = 0; m < (std::size_t{1} << vv.size()); ++m) {
            OutcomeAssignment a;
            for (std::size_t i = 0; i < vv.size(); ++i) a[vv[i]] = (m >> i) & 1;
            QubitTensor t1 = eval_tensor(a), t2 = other.eval_tensor(a);
            e1.insert(e1.end(), t1.a.begin(), t1.a.end());
            e2.insert(e2.end(), t2.a.begin(), t2.a.end());
        }
        QubitTensor q1(0, 0), q2(0, 0);
        q1.a = std::move(e1);
        q2.a = std::move(e2);
        cplx lambda;
        if (proportional(q1, q2, tol, &lambda)) return lambda;
        return std::nullopt;
    }

    bool tensor_equal(const ZxDiagram& other, double tol = kTol) const {
        std::set<std::string> vars = variables();
        for (const auto& v : other.variables()) vars.insert(v);
        std::vector<std::string> vv(vars.begin(), vars.end());
        for (std::size_t m = 0; m < (std::size_t{1} << vv.size()); ++m) {
            OutcomeAssignment a;
            for (std::size_t i = 0; i < vv.size(); ++i) a[vv[i]] = (m >> i) & 1;
            if (eval_tensor(a).max_abs_diff(other.eval_tensor(a)) > tol) return false;
        }
        return true;
    }

    // ---- CP semantics ------------------------------------------------------

    // Born-rule probability of the branch selected by `fixed`, on input
    // density matrix rho (2^k x 2^k, k = |inputs|); open outputs are traced,
    // unassigned variables are summed over.
    double cp_probability(const OutcomeAssignment& fixed, const QubitTensor& rho) const {
        std::set<std::string> vars = variables();
        std::vector<std::string> open;
        for (const auto& v : vars)
            if (!fixed.count(v)) open.push_back(v);
        double p = 0;
        for (std::size_t m = 0; m < (std::size_t{1} << open.size()); ++m) {
            OutcomeAssignment a = fixed;
            for (std::size_t i = 0; i < open.size(); ++i) a[open[i]] = (m >> i) & 1;
            QubitTensor B = eval_tensor(a);
            p += B.compose(rho).compose(B.dagger()).trace().real();
        }
        if (p < -1e-7) throw std::runtime_error("cp_probability: negative probability (non-CP construction)");
        return p;
    }

    // ---- DOT export --------------------------------------------------------

    std::string to_dot() const {
        std::ostringstream os;
        os << "graph zx {\n  rankdir=LR;\n";
        for (const auto& [id, n] : nodes) {
            if (n.boundary) {
                os << "  n" << id << " [shape=none,label=\"\"];\n";
            } else {
                std::string fill = (n.color == Color::Z) ? "palegreen" : "lightcoral";
                std::ostringstream lbl;
                double a = n.phase.static_angle.value();
                if (std::abs(a) > 1e-12) lbl << a / kPi << "pi";
                for (const auto& v : n.phase.pi_terms) lbl << (lbl.str().empty() ? "" : "+") << v << "pi";
                os << "  n" << id << " [shape=circle,style=filled,fillcolor=" << fill
                   << ",label=\"" << lbl.str() << "\"];\n";
            }
        }
        for (const auto& e : edges)
            os << "  n" << e.a << " -- n" << e.b << (e.h ? " [style=dashed,color=blue]" : "") << ";\n";
        os << "}\n";
        return os.str();
    }

  private:
    int next_id_ = 0;

    // Remove a (boundary, boundary) pair joined to the rest of the diagram,
    // splicing their neighbours together. Used by compose_with.
    void eliminate_pair(int o, int i) {
        auto find_edge = [&](int v) -> std::size_t {
            for (std::size_t k = 0; k < edges.size(); ++k)
                if (edges[k].a == v || edges[k].b == v) return k;
            throw std::runtime_error("compose: dangling boundary node");
        };
        std::size_t eo = find_edge(o);
        int u = (edges[eo].a == o) ? edges[eo].b : edges[eo].a;
        bool h1 = edges[eo].h;
        if (u == i) {
            // Closed loop: scalar 2 for a plain circle, 0 for a Hadamard circle.
            scalar.factor *= (h1 ? cplx{0, 0} : cplx{2, 0});
            edges.erase(edges.begin() + eo);
            nodes.erase(o);
            nodes.erase(i);
            return;
        }
        edges.erase(edges.begin() + eo);
        std::size_t ei = find_edge(i);
        int v = (edges[ei].a == i) ? edges[ei].b : edges[ei].a;
        bool h2 = edges[ei].h;
        edges.erase(edges.begin() + ei);
        nodes.erase(o);
        nodes.erase(i);
        edges.push_back({u, v, static_cast<bool>(h1 ^ h2)});
    }
};

// Graph state |G>: one Z spider per vertex, Hadamard edge per graph edge,
// one output per vertex; exact normalization (star per vertex, anti-star per
// edge, i.e. star_count = |V| - |E|).
inline ZxDiagram graph_state_diagram(std::size_t n_vertices,
                                     const std::vector<std::pair<int, int>>& graph_edges,
                                     std::map<int, int>* vertex_to_node = nullptr) {
    ZxDiagram d;
    std::vector<int> vnode(n_vertices);
    for (std::size_t v = 0; v < n_vertices; ++v) {
        vnode[v] = d.add_spider(Color::Z);
        if (vertex_to_node) (*vertex_to_node)[static_cast<int>(v)] = vnode[v];
    }
    for (auto [a, b] : graph_edges) d.add_edge(vnode[a], vnode[b], true);
    for (std::size_t v = 0; v < n_vertices; ++v) d.add_output(vnode[v]);
    d.scalar.star_count = static_cast<int>(n_vertices) - static_cast<int>(graph_edges.size());
    return d;
}

}  // namespace fbqc
