// fbqc: fusion-based photonic quantum computing toolkit.
//
// SPDX-License-Identifier: MIT
//
// Fock-space semantics for linear-optical circuits: mode unitaries, permanent
// based multi-photon evolution, source/detector staging, dual-rail encoding,
// the fusion circuits, and numerical Kraus extraction.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fbqc/tensor.hpp"

namespace fbqc {

// ---- circuit description ---------------------------------------------------

struct BeamSplitter {
    int i, j;  // acts as the Hadamard matrix on the (i, j) mode pair
};
struct PhaseShift {
    int mode;
    double theta;
};
struct Source {
    int mode;
    int photons;
};
struct Detector {
    int mode;
    std::string var;  // outcome variable name holding the photon count
};
using LoComponent = std::variant<BeamSplitter, PhaseShift, Source, Detector>;

struct LoCircuit {
    int mode_count = 0;
    std::vector<LoComponent> components;

    void bs(int i, int j) { components.push_back(BeamSplitter{i, j}); }
    void ps(int mode, double theta) { components.push_back(PhaseShift{mode, theta}); }
    void source(int mode, int photons = 1) { components.push_back(Source{mode, photons}); }
    void detector(int mode, std::string var) { components.push_back(Detector{mode, std::move(var)}); }

    // Swap of two modes, built from physical gates: BS . PS(pi) . BS.
    void swap(int i, int j) {
        bs(i, j);
        ps(j, kPi);
        bs(i, j);
    }

    // A detector consumes its mode; a source's mode has no earlier component.
    void check_staging() const {
        std::vector<bool> seen(mode_count, false), dead(mode_count, false);
        auto touch = [&](int m) {
            if (m < 0 || m >= mode_count) throw std::invalid_argument("lo: mode index out of range");
            if (dead[m]) throw std::invalid_argument("lo: component on a detected mode");
            seen[m] = true;
        };
        for (const auto& c : components) {
            if (auto* b = std::get_if<BeamSplitter>(&c)) {
                touch(b->i);
                touch(b->j);
            } else if (auto* p = std::get_if<PhaseShift>(&c)) {
                touch(p->mode);
            } else if (auto* s = std::get_if<Source>(&c)) {
                if (seen[s->mode]) throw std::invalid_argument("lo: source after another component");
                touch(s->mode);
            } else if (auto* d = std::get_if<Detector>(&c)) {
                touch(d->mode);
                dead[d->mode] = true;
            }
        }
    }
};

// ---- mode unitary ------------------------------------------------------------

struct ModeUnitary {
    int m = 0;
    std::vector<cplx> a;  // row-major m x m

    explicit ModeUnitary(int modes = 0) : m(modes), a(static_cast<std::size_t>(modes) * modes) {
        for (int i = 0; i < modes; ++i) at(i, i) = 1.0;
    }
    cplx& at(int r, int c) { return a[static_cast<std::size_t>(r) * m + c]; }
    const cplx& at(int r, int c) const { return a[static_cast<std::size_t>(r) * m + c]; }

    bool is_unitary(double tol = 1e-10) const {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                cplx s = 0.0;
                for (int k = 0; k < m; ++k) s += std::conj(at(k, i)) * at(k, j);
                if (std::abs(s - (i == j ? cplx(1.0) : cplx(0.0))) > tol) return false;
            }
        return true;
    }
};

// Left-multiplies u by the 2x2 Hadamard block on modes (i, j).
inline void apply_bs(ModeUnitary& u, int i, int j) {
    const double r = 1.0 / std::sqrt(2.0);
    for (int c = 0; c < u.m; ++c) {
        cplx ri = u.at(i, c), rj = u.at(j, c);
        u.at(i, c) = r * (ri + rj);
        u.at(j, c) = r * (ri - rj);
    }
}
inline void apply_ps(ModeUnitary& u, int mode, double theta) {
    cplx f = expi(theta);
    for (int c = 0; c < u.m; ++c) u.at(mode, c) *= f;
}

// Product of the embedded blocks in component order (pure interferometer).
inline ModeUnitary circuit_unitary(const LoCircuit& c) {
    ModeUnitary u(c.mode_count);
    for (const auto& comp : c.components) {
        if (auto* b = std::get_if<BeamSplitter>(&comp))
            apply_bs(u, b->i, b->j);
        else if (auto* p = std::get_if<PhaseShift>(&comp))
            apply_ps(u, p->mode, p->theta);
        else
            throw std::invalid_argument("circuit_unitary: circuit has sources or detectors");
    }
    return u;
}

// ---- Fock states -------------------------------------------------------------

using Occupation = std::vector<int>;

struct FockVector {
    int modes = 0;
    std::map<Occupation, cplx> amps;

    FockVector() = default;
    explicit FockVector(int m) : modes(m) {}

    void add(const Occupation& occ, cplx amp) {
        if (std::abs(amp) < 1e-15) return;
        auto [it, fresh] = amps.try_emplace(occ, amp);
        if (!fresh) {
            it->second += amp;
            if (std::abs(it->second) < 1e-15) amps.erase(it);
        }
    }
    double norm_sq() const {
        double s = 0.0;
        for (const auto& [occ, amp] : amps) s += std::norm(amp);
        return s;
    }
    static FockVector basis(const Occupation& occ) {
        FockVector f(static_cast<int>(occ.size()));
        f.amps[occ] = 1.0;
        return f;
    }
};

// Permanent by Ryser's formula with Gray-code updates; exact for n <= ~20.
inline cplx permanent(const std::vector<cplx>& a, int n) {
    if (n == 0) return 1.0;
    std::vector<cplx> rowsum(n, 0.0);
    cplx total = 0.0;
    unsigned long long gray = 0;
    double sign = (n % 2 == 0) ? 1.0 : -1.0;  // (-1)^n prefactor folded per subset
    for (unsigned long long k = 1; k < (1ull << n); ++k) {
        unsigned long long next = k ^ (k >> 1);
        unsigned long long diff = next ^ gray;
        int col = std::countr_zero(diff);
        double dir = (next & diff) ? 1.0 : -1.0;
        for (int r = 0; r < n; ++r) rowsum[r] += dir * a[static_cast<std::size_t>(r) * n + col];
        gray = next;
        cplx prod = 1.0;
        for (int r = 0; r < n; ++r) prod *= rowsum[r];
        double subset_sign = (std::popcount(next) % 2 == 0) ? 1.0 : -1.0;
        total += subset_sign * prod;
    }
    return sign * total;
}

namespace detail {

inline void enumerate_occupations(int modes, int photons, Occupation& cur,
                                  const std::function<void(const Occupation&)>& emit) {
    int idx = static_cast<int>(cur.size());
    if (idx == modes - 1) {
        cur.push_back(photons);
        emit(cur);
        cur.pop_back();
        return;
    }
    for (int k = 0; k <= photons; ++k) {
        cur.push_back(k);
        enumerate_occupations(modes, photons - k, cur, emit);
        cur.pop_back();
    }
}

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace detail

inline void for_each_occupation(int modes, int photons, const std::function<void(const Occupation&)>& emit) {
    if (modes == 0) {
        if (photons == 0) emit({});
        return;
    }
    Occupation cur;
    detail::enumerate_occupations(modes, photons, cur, emit);
}

// <out| phi(U) |in> = Per(U[out-rows, in-cols]) / sqrt(prod in_i! prod out_j!).
inline FockVector fock_evolve(const ModeUnitary& u, const FockVector& s) {
    FockVector out(s.modes);
    for (const auto& [in_occ, amp] : s.amps) {
        int n = 0;
        for (int k : in_occ) n += k;
        std::vector<int> in_modes;
        for (int m = 0; m < s.modes; ++m)
            for (int r = 0; r < in_occ[m]; ++r) in_modes.push_back(m);
        double in_fact = 1.0;
        for (int k : in_occ) in_fact *= detail::factorial(k);
        for_each_occupation(s.modes, n, [&](const Occupation& out_occ) {
            std::vector<int> out_modes;
            for (int m = 0; m < s.modes; ++m)
                for (int r = 0; r < out_occ[m]; ++r) out_modes.push_back(m);
            std::vector<cplx> sub(static_cast<std::size_t>(n) * n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) sub[static_cast<std::size_t>(r) * n + c] = u.at(out_modes[r], in_modes[c]);
            double out_fact = 1.0;
            for (int k : out_occ) out_fact *= detail::factorial(k);
            cplx a = permanent(sub, n) / std::sqrt(in_fact * out_fact);
            out.add(out_occ, amp * a);
        });
    }
    return out;
}

// ---- full circuit runs -------------------------------------------------------

struct DetectionBranch {
    std::map<std::string, int> outcome;  // detector variable -> photon count
    FockVector residual;                 // state of the undetected modes, in mode order
};

// Sources inject photons, the interferometer evolves, detectors project onto
// photon-number outcomes (enumerated exhaustively). Amplitudes are exact.
inline std::vector<DetectionBranch> run_circuit(const LoCircuit& c, const FockVector& input) {
    c.check_staging();
    FockVector state = input.modes == 0 ? FockVector::basis(Occupation(c.mode_count, 0)) : input;
    if (state.modes != c.mode_count) throw std::invalid_argument("run_circuit: input mode count mismatch");

    ModeUnitary u(c.mode_count);
    std::vector<std::pair<int, std::string>> detectors;
    for (const auto& comp : c.components) {
        if (auto* b = std::get_if<BeamSplitter>(&comp))
            apply_bs(u, b->i, b->j);
        else if (auto* p = std::get_if<PhaseShift>(&comp))
            apply_ps(u, p->mode, p->theta);
        else if (auto* s = std::get_if<Source>(&comp)) {
            FockVector injected(state.modes);
            for (const auto& [occ, amp] : state.amps) {
                if (occ[s->mode] != 0)
                    throw std::invalid_argument("run_circuit: source on an occupied mode");
                Occupation o = occ;
                o[s->mode] = s->photons;
                injected.add(o, amp);
            }
            state = std::move(injected);
        } else if (auto* d = std::get_if<Detector>(&comp)) {
            detectors.emplace_back(d->mode, d->var);
        }
    }
    state = fock_evolve(u, state);

    std::vector<bool> is_detected(c.mode_count, false);
    for (const auto& [m, var] : detectors) is_detected[m] = true;
    int residual_modes = 0;
    for (int m = 0; m < c.mode_count; ++m)
        if (!is_detected[m]) ++residual_modes;

    std::map<std::map<std::string, int>, FockVector> grouped;
    for (const auto& [occ, amp] : state.amps) {
        std::map<std::string, int> outcome;
        for (const auto& [m, var] : detectors) outcome[var] = occ[m];
        Occupation rest;
        for (int m = 0; m < c.mode_count; ++m)
            if (!is_detected[m]) rest.push_back(occ[m]);
        auto [it, fresh] = grouped.try_emplace(outcome, FockVector(residual_modes));
        it->second.add(rest, amp);
    }
    std::vector<DetectionBranch> out;
    for (auto& [outcome, residual] : grouped) out.push_back({outcome, std::move(residual)});
    return out;
}

// ---- dual-rail encoding --------------------------------------------------------

// Computational basis |0> -> (1,0) occupation on the qubit's mode pair,
// |1> -> (0,1). Qubit q uses modes (2q, 2q+1); qubit 0 is the most significant
// bit, matching the QubitTensor port convention.
inline FockVector dual_rail_encode(const QubitTensor& state) {
    if (state.n_in != 0) throw std::invalid_argument("dual_rail_encode: expected a state (no inputs)");
    int k = state.n_out;
    FockVector f(2 * k);
    for (unsigned long long b = 0; b < (1ull << k); ++b) {
        cplx amp = state.at(b, 0);
        if (std::abs(amp) < 1e-15) continue;
        Occupation occ(2 * k, 0);
        for (int q = 0; q < k; ++q) {
            int bit = static_cast<int>((b >> (k - 1 - q)) & 1);
            occ[2 * q + bit] = 1;
        }
        f.add(occ, amp);
    }
    return f;
}

inline FockVector dual_rail_encode_basis(unsigned long long b, int k) {
    QubitTensor t(0, k);
    t.at(b, 0) = 1.0;
    return dual_rail_encode(t);
}

// Left inverse of encode; none if any support tuple leaves the one-photon-per-
// pair subspace (leakage).
inline std::optional<QubitTensor> dual_rail_decode(const FockVector& f) {
    if (f.modes % 2 != 0) return std::nullopt;
    int k = f.modes / 2;
    QubitTensor t(0, k);
    for (const auto& [occ, amp] : f.amps) {
        unsigned long long b = 0;
        for (int q = 0; q < k; ++q) {
            int n0 = occ[2 * q], n1 = occ[2 * q + 1];
            if (n0 + n1 != 1) return std::nullopt;
            b = (b << 1) | static_cast<unsigned long long>(n1);
        }
        t.at(b, 0) = amp;
    }
    return t;
}

// ---- fusion circuits ----------------------------------------------------------

// Type I fusion on two dual-rail qubits (modes 0..3, qubit 1 kept), with phase
// shifts theta1/theta2 on the input |1>-rails and theta3 on the kept |1>-rail.
// At (0,0,0) this is the plain Type I fusion: swap the |1>-rails, interfere the
// consumed pair, detect it (outcome vars "a" and "b").
inline LoCircuit type1_circuit(double theta1 = 0.0, double theta2 = 0.0, double theta3 = 0.0) {
    LoCircuit c;
    c.mode_count = 4;
    if (theta1 != 0.0) c.ps(1, theta1);
    if (theta2 != 0.0) c.ps(3, theta2);
    c.swap(1, 3);
    c.bs(2, 3);
    if (theta3 != 0.0) c.ps(1, theta3);
    c.detector(2, "a");
    c.detector(3, "b");
    return c;
}

// Type II fusion: Type I conjugated by beam splitters on both input pairs
// (the Hadamard frame), with the kept pair interfered and detected as well.
// Outcome vars: "a","b" for the consumed pair, "c","d" for the kept pair.
inline LoCircuit type2_circuit() {
    LoCircuit c;
    c.mode_count = 4;
    c.bs(0, 1);
    c.bs(2, 3);
    c.swap(1, 3);
    c.bs(2, 3);
    c.detector(2, "a");
    c.detector(3, "b");
    c.bs(0, 1);
    c.detector(0, "c");
    c.detector(1, "d");
    return c;
}

// n-GHZ state analyzer: an n-input Type I fusion (qubit 0 successively fused
// with qubits 1..n-1) whose kept pair is then interfered and detected too.
// Detector variables r1..r{2n} in physical order.
inline LoCircuit ghz_analyzer(int n) {
    if (n < 2) throw std::invalid_argument("ghz_analyzer: need at least 2 inputs");
    LoCircuit c;
    c.mode_count = 2 * n;
    int next_var = 1;
    for (int q = 1; q < n; ++q) {
        c.swap(1, 2 * q + 1);
        c.bs(2 * q, 2 * q + 1);
        c.detector(2 * q, "r" + std::to_string(next_var++));
        c.detector(2 * q + 1, "r" + std::to_string(next_var++));
    }
    c.bs(0, 1);
    c.detector(0, "r" + std::to_string(next_var++));
    c.detector(1, "r" + std::to_string(next_var++));
    return c;
}

// ---- Kraus extraction -----------------------------------------------------------

struct KrausBranch {
    std::map<std::string, int> outcome;
    // Qubit-level Kraus operators for the members of this (possibly coarse-
    // grained) outcome whose residual decodes; one operator per raw outcome.
    std::vector<QubitTensor> kraus;
    // Leakage members: residual leaves the dual-rail subspace. When the Fock-
    // level branch factors as (input effect) x (leaked state), the effect is
    // reported; `weight` is the squared norm of the branch matrix.
    struct Leak {
        std::map<std::string, int> raw_outcome;
        bool factored = false;
        QubitTensor effect;  // k inputs, 0 outputs; valid when factored
        FockVector leaked;   // normalized leaked residual; valid when factored
        double weight = 0.0;
    };
    std::vector<Leak> leaks;
};

struct KrausReport {
    int qubit_inputs = 0;
    int qubit_outputs = 0;
    std::vector<KrausBranch> branches;
    double completeness_defect = 0.0;  // max-abs deviation of sum K'K from I
};

using CoarseGrain = std::function<std::map<std::string, int>(const std::map<std::string, int>&)>;

// Runs the circuit on every dual-rail computational basis input and assembles
// the qubit-level Kraus operator per detector outcome. Residuals outside the
// dual-rail subspace become leakage branches; completeness is checked at the
// Fock level so leakage contributes exactly.
inline KrausReport kraus_report(const LoCircuit& c, int qubit_inputs, int qubit_outputs,
                                const CoarseGrain& coarse = nullptr) {
    const int k = qubit_inputs;
    const unsigned long long dim = 1ull << k;

    // branch matrix per raw outcome: rows = residual occupations, cols = input
    // basis index.
    std::map<std::map<std::string, int>, std::map<Occupation, std::vector<cplx>>> columns;
    int residual_modes = -1;
    for (unsigned long long b = 0; b < dim; ++b) {
        FockVector in = dual_rail_encode_basis(b, k);
        if (in.modes > c.mode_count) throw std::invalid_argument("kraus_report: circuit too small");
        // Pad with vacuum on the remaining modes.
        FockVector padded(c.mode_count);
        for (const auto& [occ, amp] : in.amps) {
            Occupation o = occ;
            o.resize(c.mode_count, 0);
            padded.add(o, amp);
        }
        for (const auto& br : run_circuit(c, padded)) {
            residual_modes = br.residual.modes;
            auto& mat = columns[br.outcome];
            for (const auto& [occ, amp] : br.residual.amps) {
                auto [it, fresh] = mat.try_emplace(occ, std::vector<cplx>(dim, cplx(0.0)));
                it->second[b] = amp;
            }
        }
    }
    if (residual_modes >= 0 && residual_modes != 2 * qubit_outputs)
        throw std::invalid_argument("kraus_report: undetected modes do not match qubit_outputs");

    // Fock-level completeness: sum over outcomes of (branch matrix)'(branch
    // matrix) must be the identity on the encoded subspace.
    std::vector<cplx> gram(dim * dim, 0.0);
    for (const auto& [outcome, mat] : columns)
        for (const auto& [occ, col] : mat)
            for (unsigned long long i = 0; i < dim; ++i)
                for (unsigned long long j = 0; j < dim; ++j)
                    gram[i * dim + j] += std::conj(col[i]) * col[j];
    double defect = 0.0;
    for (unsigned long long i = 0; i < dim; ++i)
        for (unsigned long long j = 0; j < dim; ++j)
            defect = std::max(defect,
                              std::abs(gram[i * dim + j] - (i == j ? cplx(1.0) : cplx(0.0))));

    KrausReport rep;
    rep.qubit_inputs = qubit_inputs;
    rep.qubit_outputs = qubit_outputs;
    rep.completeness_defect = defect;

    std::map<std::map<std::string, int>, KrausBranch> grouped;
    for (const auto& [outcome, mat] : columns) {
        std::map<std::string, int> label = coarse ? coarse(outcome) : outcome;
        auto [git, fresh] = grouped.try_emplace(label);
        git->second.outcome = label;

        // Try to decode each input column jointly: rebuild per-input residual
        // FockVectors and decode.
        bool decodable = true;
        QubitTensor op(k, qubit_outputs);
        for (unsigned long long b = 0; b < dim && decodable; ++b) {
            FockVector residual(residual_modes);
            for (const auto& [occ, col] : mat) residual.add(occ, col[b]);
            if (residual.amps.empty()) continue;
            auto dec = dual_rail_decode(residual);
            if (!dec) {
                decodable = false;
                break;
            }
            for (unsigned long long o = 0; o < (1ull << qubit_outputs); ++o) op.at(o, b) = dec->at(o, 0);
        }
        if (decodable) {
            git->second.kraus.push_back(op);
            continue;
        }

        // Leakage: attempt the rank-1 factorization mat = leaked x effect'.
        KrausBranch::Leak leak;
        leak.raw_outcome = outcome;
        double w = 0.0;
        for (const auto& [occ, col] : mat)
            for (const auto& amp : col) w += std::norm(amp);
        leak.weight = w;
        // Pick the row of largest norm as the reference leaked component.
        const std::vector<cplx>* ref = nullptr;
        Occupation ref_occ;
        double best = 0.0;
        for (const auto& [occ, col] : mat) {
            double s = 0.0;
            for (const auto& amp : col) s += std::norm(amp);
            if (s > best) {
                best = s;
                ref = &col;
                ref_occ = occ;
            }
        }
        bool rank1 = ref != nullptr;
        if (rank1) {
            // mat[occ][b] should equal leaked[occ] * effect[b].
            for (const auto& [occ, col] : mat) {
                // ratio of this row to the reference row must be constant.
                cplx ratio = 0.0;
                bool have = false;
                for (unsigned long long bcol = 0; bcol < dim; ++bcol) {
                    if (std::abs((*ref)[bcol]) < 1e-12) {
                        if (std::abs(col[bcol]) > 1e-9) rank1 = false;
                        continue;
                    }
                    cplx r = col[bcol] / (*ref)[bcol];
                    if (!have) {
                        ratio = r;
                        have = true;
                    } else if (std::abs(r - ratio) > 1e-8) {
                        rank1 = false;
                    }
                }
            }
        }
        if (rank1) {
            leak.factored = true;
            // effect' = reference row normalized so the leaked state has norm 1.
            double col_norm = 0.0;
            std::map<Occupation, cplx> leaked_amp;
            for (const auto& [occ, col] : mat) {
                cplx ratio = 0.0;
                for (unsigned long long bcol = 0; bcol < dim; ++bcol)
                    if (std::abs((*ref)[bcol]) > 1e-12) {
                        ratio = col[bcol] / (*ref)[bcol];
                        break;
                    }
                leaked_amp[occ] = ratio;
                col_norm += std::norm(ratio);
            }
            double inv = 1.0 / std::sqrt(col_norm);
            leak.leaked = FockVector(residual_modes);
            for (const auto& [occ, amp] : leaked_amp) leak.leaked.add(occ, amp * inv);
            leak.effect = QubitTensor(k, 0);
            for (unsigned long long bcol = 0; bcol < dim; ++bcol)
                leak.effect.at(0, bcol) = (*ref)[bcol] * std::sqrt(col_norm);
        }
        git->second.leaks.push_back(std::move(leak));
    }
    for (auto& [label, branch] : grouped) rep.branches.push_back(std::move(branch));
    return rep;
}

}  // namespace fbqc
