// fbqc: fusion-based photonic quantum computing toolkit.
//
// SPDX-License-Identifier: MIT
//
// JSON serialization for ZX diagrams:
//   {spiders:[{id,color,angle_num,angle_den,pi_vars[]}], edges:[{a,b,h}],
//    inputs[], outputs[], scalar:{stars,re,im,sign_vars[]}}
// Boundary nodes are implicit: any id listed in inputs/outputs refers to a
// boundary port; angles that are not exact rational multiples of pi are
// stored with angle_den = 0 and an angle_rad field.
#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "fbqc/flow.hpp"
#include "fbqc/patterns.hpp"
#include "fbqc/zx.hpp"

namespace fbqc {

using json = nlohmann::json;

inline json diagram_to_json(const ZxDiagram& d) {
    json spiders = json::array();
    for (const auto& [id, n] : d.nodes) {
        if (n.boundary) continue;
        json s;
        s["id"] = id;
        s["color"] = (n.color == Color::Z) ? "Z" : "X";
        if (n.phase.static_angle.exact()) {
            s["angle_num"] = n.phase.static_angle.num();
            s["angle_den"] = n.phase.static_angle.den();
        } else {
            s["angle_num"] = 0;
            s["angle_den"] = 0;
            s["angle_rad"] = n.phase.static_angle.value();
        }
        s["pi_vars"] = n.phase.pi_terms;
        spiders.push_back(s);
    }
    json edges = json::array();
    for (const auto& e : d.edges) edges.push_back({{"a", e.a}, {"b", e.b}, {"h", e.h}});
    return json{{"spiders", spiders},
                {"edges", edges},
                {"inputs", d.inputs},
                {"outputs", d.outputs},
                {"scalar",
                 {{"stars", d.scalar.star_count},
                  {"re", d.scalar.factor.real()},
                  {"im", d.scalar.factor.imag()},
                  {"sign_vars", d.scalar.sign_vars}}}};
}

inline ZxDiagram diagram_from_json(const json& j) {
    ZxDiagram d;
    for (const auto& s : j.at("spiders")) {
        std::string color = s.at("color").get<std::string>();
        if (color != "Z" && color != "X")
            throw std::invalid_argument("diagram_from_json: color must be Z or X");
        Angle a;
        long long den = s.at("angle_den").get<long long>();
        if (den == 0)
            a = Angle::radians(s.at("angle_rad").get<double>());
        else
            a = Angle::of_pi(s.at("angle_num").get<long long>(), den);
        Phase p(a);
        if (s.contains("pi_vars"))
            for (const auto& v : s.at("pi_vars")) p.pi_terms.insert(v.get<std::string>());
        int id = s.at("id").get<int>();
        ZxNode node;
        node.boundary = false;
        node.color = (color == "Z") ? Color::Z : Color::X;
        node.phase = p;
        d.nodes[id] = node;
        d.bump_next_id(id);
    }
    for (int id : j.at("inputs")) {
        ZxNode node;
        node.boundary = true;
        d.nodes[id] = node;
        d.bump_next_id(id);
        d.inputs.push_back(id);
    }
    for (int id : j.at("outputs")) {
        if (!d.nodes.count(id) || !d.nodes.at(id).boundary) {
            ZxNode node;
            node.boundary = true;
            d.nodes[id] = node;
            d.bump_next_id(id);
        }
        d.outputs.push_back(id);
    }
    for (const auto& e : j.at("edges")) {
        int a = e.at("a").get<int>(), b = e.at("b").get<int>();
        if (!d.nodes.count(a) || !d.nodes.count(b))
            throw std::invalid_argument("diagram_from_json: edge endpoint does not exist");
        d.edges.push_back({a, b, e.value("h", false)});
    }
    if (j.contains("scalar")) {
        const auto& s = j.at("scalar");
        d.scalar.star_count = s.value("stars", 0);
        d.scalar.factor = cplx(s.value("re", 1.0), s.value("im", 0.0));
        if (s.contains("sign_vars"))
            for (const auto& v : s.at("sign_vars")) d.scalar.sign_vars.insert(v.get<std::string>());
    }
    return d;
}

// ---- labelled open graphs / fusion networks ---------------------------------
// {vertices:[{id, plane?, angle?}], edges:[[a,b]], inputs:[], outputs:[]}

inline json graph_to_json(const LabelledOpenGraph& g) {
    json vertices = json::array();
    for (int v : g.vertices) {
        json jv{{"id", v}};
        if (g.plane.count(v)) {
            jv["plane"] = to_string(g.plane.at(v));
            jv["angle"] = g.angle.at(v);
        }
        vertices.push_back(jv);
    }
    json edges = json::array();
    for (const auto& [a, b] : g.edges) edges.push_back(json::array({a, b}));
    return json{{"vertices", vertices}, {"edges", edges}, {"inputs", g.inputs}, {"outputs", g.outputs}};
}

inline LabelledOpenGraph graph_from_json(const json& j) {
    LabelledOpenGraph g;
    for (const auto& jv : j.at("vertices")) {
        int id = jv.at("id").get<int>();
        if (jv.contains("plane"))
            g.add_vertex(id, plane_from_string(jv.at("plane").get<std::string>()), jv.value("angle", 0.0));
        else
            g.add_vertex(id);
    }
    for (const auto& e : j.at("edges")) g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    for (int v : j.at("inputs")) g.inputs.insert(v);
    for (int v : j.at("outputs")) g.outputs.insert(v);
    g.validate();
    return g;
}

inline json network_to_json(const FusionNetwork& n) {
    json fusions = json::array();
    for (const auto& f : n.fusions)
        fusions.push_back(
            json{{"a", f.a}, {"b", f.b}, {"plane", to_string(f.plane)}, {"angle", f.angle}});
    json clifford = json::array();
    for (const auto& [v, c] : n.clifford) clifford.push_back(json::array({v, c}));
    return json{{"resource", graph_to_json(n.resource)}, {"fusions", fusions}, {"clifford", clifford}};
}

inline FusionNetwork network_from_json(const json& j) {
    FusionNetwork n;
    n.resource = graph_from_json(j.at("resource"));
    for (const auto& f : j.value("fusions", json::array()))
        n.fusions.push_back({f.at("a").get<int>(), f.at("b").get<int>(),
                             plane_from_string(f.at("plane").get<std::string>()), f.value("angle", 0.0)});
    for (const auto& c : j.value("clifford", json::array()))
        n.clifford[c.at(0).get<int>()] = c.at(1).get<int>();
    n.validate();
    return n;
}

// ---- patterns ----------------------------------------------------------------
// {qubits:[], inputs:[], outputs:[], commands:[{op:"N",q}|{op:"E",a,b}|
//  {op:"M",q,plane,angle,outcome}|{op:"F",a,b,plane,success,outcome}|
//  {op:"X"|"Z",q,constant,vars:[]}]}

inline json pattern_to_json(const Pattern& p) {
    json commands = json::array();
    for (const Command& c : p.commands) {
        json jc;
        switch (c.kind) {
            case Command::Kind::Prepare: jc = {{"op", "N"}, {"q", c.a}}; break;
            case Command::Kind::Entangle: jc = {{"op", "E"}, {"a", c.a}, {"b", c.b}}; break;
            case Command::Kind::Measure:
                jc = {{"op", "M"}, {"q", c.a}, {"plane", to_string(c.plane)},
                      {"angle", c.angle}, {"outcome", c.outcome}};
                break;
            case Command::Kind::Fuse:
                jc = {{"op", "F"}, {"a", c.a}, {"b", c.b}, {"plane", to_string(c.plane)},
                      {"success", c.success}, {"outcome", c.outcome}};
                break;
            case Command::Kind::CorrectX:
            case Command::Kind::CorrectZ:
                jc = {{"op", c.kind == Command::Kind::CorrectX ? "X" : "Z"}, {"q", c.a},
                      {"constant", c.cond.constant}, {"vars", c.cond.vars}};
                break;
        }
        commands.push_back(std::move(jc));
    }
    return json{{"qubits", p.qubits}, {"inputs", p.inputs}, {"outputs", p.outputs},
                {"commands", commands}};
}

inline Pattern pattern_from_json(const json& j) {
    Pattern p;
    for (int q : j.at("qubits")) p.qubits.insert(q);
    for (int q : j.value("inputs", json::array())) p.inputs.insert(q);
    for (int q : j.value("outputs", json::array())) p.outputs.insert(q);
    for (const auto& jc : j.at("commands")) {
        std::string op = jc.at("op").get<std::string>();
        if (op == "N") {
            p.commands.push_back(Command::prepare(jc.at("q").get<int>()));
        } else if (op == "E") {
            p.commands.push_back(Command::entangle(jc.at("a").get<int>(), jc.at("b").get<int>()));
        } else if (op == "M") {
            p.commands.push_back(Command::measure(jc.at("q").get<int>(),
                                                  plane_from_string(jc.at("plane").get<std::string>()),
                                                  jc.value("angle", 0.0),
                                                  jc.at("outcome").get<std::string>()));
        } else if (op == "F") {
            p.commands.push_back(Command::fuse(jc.at("a").get<int>(), jc.at("b").get<int>(),
                                               plane_from_string(jc.at("plane").get<std::string>()),
                                               jc.at("success").get<std::string>(),
                                               jc.at("outcome").get<std::string>()));
        } else if (op == "X" || op == "Z") {
            Condition cond;
            cond.constant = jc.value("constant", false);
            for (const auto& v : jc.value("vars", json::array())) cond.vars.insert(v.get<std::string>());
            int q = jc.at("q").get<int>();
            p.commands.push_back(op == "X" ? Command::correct_x(q, cond) : Command::correct_z(q, cond));
        } else {
            throw std::invalid_argument("pattern_from_json: unknown op '" + op + "'");
        }
    }
    std::string why;
    if (!is_runnable(p, &why)) throw std::invalid_argument("pattern_from_json: not runnable: " + why);
    return p;
}

}  // namespace fbqc
