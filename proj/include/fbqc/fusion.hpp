// fbqc: fusion-based photonic quantum computing toolkit.
//
// SPDX-License-Identifier: MIT
//
// Parametrized two-qubit fusion measurements: Euler-angle specification,
// compositional ZX branch maps with symbolic error bits, failure/error
// classification (green failure, Pauli error, symmetry), the canonical
// plane-labelled families and their Pauli X/Y/Z instances, and Born-rule
// success probabilities on arbitrary and graph-state inputs.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fbqc/zx.hpp"

namespace fbqc {

// ---- single-qubit unitaries as Euler triples -------------------------------

// U = Z(gamma) . X(beta) . Z(alpha), applied right to left, where
// Z(t) = diag(1, e^{it}) and X(t) = H Z(t) H.
struct EulerZXZ {
    double alpha = 0;
    double beta = 0;
    double gamma = 0;
};

inline QubitTensor z_rotation_matrix(double t) {
    QubitTensor m(1, 1);
    m.at(0, 0) = 1.0;
    m.at(1, 1) = std::exp(cplx{0, t});
    return m;
}

inline QubitTensor x_rotation_matrix(double t) {
    QubitTensor m(1, 1);
    cplx e = std::exp(cplx{0, t});
    m.at(0, 0) = (1.0 + e) / 2.0;
    m.at(0, 1) = (1.0 - e) / 2.0;
    m.at(1, 0) = (1.0 - e) / 2.0;
    m.at(1, 1) = (1.0 + e) / 2.0;
    return m;
}

inline QubitTensor hadamard_matrix() {
    QubitTensor m(1, 1);
    double s = std::sqrt(0.5);
    m.at(0, 0) = s;
    m.at(0, 1) = s;
    m.at(1, 0) = s;
    m.at(1, 1) = -s;
    return m;
}

inline QubitTensor euler_matrix(const EulerZXZ& u) {
    return z_rotation_matrix(u.gamma).compose(x_rotation_matrix(u.beta)).compose(z_rotation_matrix(u.alpha));
}

inline double wrap_angle(double t) {
    double two_pi = 2 * kPi;
    t = std::fmod(t, two_pi);
    if (t < 0) t += two_pi;
    if (t > two_pi - 1e-12) t = 0;
    return t;
}

// Decomposes a 2x2 unitary (up to global phase) into Z-X-Z Euler angles.
inline EulerZXZ euler_from_matrix(const QubitTensor& m, double tol = 1e-9) {
    if (m.n_in != 1 || m.n_out != 1) throw std::invalid_argument("euler_from_matrix: expected a 1-qubit map");
    cplx m00 = m.at(0, 0), m01 = m.at(0, 1), m10 = m.at(1, 0);
    double beta = 2.0 * std::atan2(std::abs(m10), std::abs(m00));
    EulerZXZ u;
    u.beta = wrap_angle(beta);
    if (std::abs(m10) <= tol) {  // diagonal
        u.alpha = wrap_angle(std::arg(m.at(1, 1) / m00));
        u.gamma = 0;
    } else if (std::abs(m00) <= tol) {  // anti-diagonal
        u.alpha = wrap_angle(std::arg(m01 / m10));
        u.gamma = 0;
    } else {
        cplx eb = std::exp(cplx{0, beta});
        cplx c = (1.0 + eb) / 2.0, s = (1.0 - eb) / 2.0;
        cplx g = m00 / c;
        u.alpha = wrap_angle(std::arg(m01 / (g * s)));
        u.gamma = wrap_angle(std::arg(m10 / (g * s)));
    }
    QubitTensor rebuilt = euler_matrix(u);
    cplx lambda;
    if (!proportional(m, rebuilt, 1e-7, &lambda))
        throw std::runtime_error("euler_from_matrix: decomposition failed (input not unitary?)");
    return u;
}

// ---- fusion specification ---------------------------------------------------

enum class FusionFamily { None, YZ, XZ, XY, X, Y, Z };

inline const char* to_string(FusionFamily f) {
    switch (f) {
        case FusionFamily::None: return "none";
        case FusionFamily::YZ: return "YZ";
        case FusionFamily::XZ: return "XZ";
        case FusionFamily::XY: return "XY";
        case FusionFamily::X: return "X";
        case FusionFamily::Y: return "Y";
        case FusionFamily::Z: return "Z";
    }
    return "?";
}

// A general two-qubit entangling measurement: local unitaries u1, u2 on the
// inputs and u3 before the residual single-qubit measurement of the fused
// wire. The residual measurement plane/angle is informative metadata filled
// in by canonical constructors.
struct FusionSpec {
    EulerZXZ u1, u2, u3;
    std::optional<std::pair<FusionFamily, double>> measurement_plane_and_angle;
};

// ---- branch maps ------------------------------------------------------------

// Success and failure Kraus effects (2 inputs, 0 outputs) as ZX diagrams with
// symbolic error bits: "k" flags the fused-wire parity error, "j" the residual
// single-qubit measurement outcome.
struct FusionBranchMaps {
    ZxDiagram success;  // variables k, j
    ZxDiagram failure;  // variable k

    QubitTensor success_at(int k, int j) const { return success.eval_tensor({{"k", k}, {"j", j}}); }
    QubitTensor failure_at(int k) const { return failure.eval_tensor({{"k", k}}); }

    // max-norm distance of sum_{k,j} S'S + sum_k F'F from the identity.
    double completeness_defect() const {
        QubitTensor acc(2, 2);
        for (int k = 0; k < 2; ++k) {
            for (int j = 0; j < 2; ++j) {
                QubitTensor s = success_at(k, j);
                QubitTensor t = s.dagger().compose(s);
                for (std::size_t i = 0; i < acc.a.size(); ++i) acc.a[i] += t.a[i];
            }
            QubitTensor f = failure_at(k);
            QubitTensor t = f.dagger().compose(f);
            for (std::size_t i = 0; i < acc.a.size(); ++i) acc.a[i] += t.a[i];
        }
        return acc.max_abs_diff(QubitTensor::identity(2));
    }
};

namespace detail {

// Appends the spider chain for U = Z(gamma) X(beta) Z(alpha) reading from the
// fresh input boundary; returns the id of the last (output-side) spider.
inline int append_euler_chain(ZxDiagram& d, const EulerZXZ& u) {
    int za = d.add_spider(Color::Z, Phase(Angle::radians(u.alpha)));
    int xb = d.add_spider(Color::X, Phase(Angle::radians(u.beta)));
    int zg = d.add_spider(Color::Z, Phase(Angle::radians(u.gamma)));
    d.add_input(za);
    d.add_edge(za, xb);
    d.add_edge(xb, zg);
    return zg;
}

}  // namespace detail

// Builds the measurement instrument of a general fusion. Success effect:
//   (1/sqrt2) <j| U3 H Zspider(k pi) (H U1 (x) H U2),
// failure effect:
//   (<1-k| H U1) (x) (<k| H U2).
// The four success and two failure effects form a complete instrument.
inline FusionBranchMaps branch_maps(const FusionSpec& spec) {
    FusionBranchMaps bm;
    {
        ZxDiagram& d = bm.success;
        int g1 = detail::append_euler_chain(d, spec.u1);
        int g2 = detail::append_euler_chain(d, spec.u2);
        int ctr = d.add_spider(Color::Z, Phase(Angle::zero(), {"k"}));
        d.add_edge(g1, ctr, true);
        d.add_edge(g2, ctr, true);
        int a3 = d.add_spider(Color::Z, Phase(Angle::radians(spec.u3.alpha)));
        int x3 = d.add_spider(Color::X, Phase(Angle::radians(spec.u3.beta)));
        int g3 = d.add_spider(Color::Z, Phase(Angle::radians(spec.u3.gamma)));
        d.add_edge(ctr, a3, true);
        d.add_edge(a3, x3);
        d.add_edge(x3, g3);
        int eff = d.add_spider(Color::X, Phase(Angle::zero(), {"j"}));
        d.add_edge(g3, eff);
        // one star for the normalized <j| effect, one for the 1/sqrt2 prefactor
        d.scalar.star_count += 2;
    }
    {
        ZxDiagram& d = bm.failure;
        int g1 = detail::append_euler_chain(d, spec.u1);
        int e1 = d.add_spider(Color::X, Phase(Angle::pi(), {"k"}));
        d.add_edge(g1, e1, true);
        int g2 = detail::append_euler_chain(d, spec.u2);
        int e2 = d.add_spider(Color::X, Phase(Angle::zero(), {"k"}));
        d.add_edge(g2, e2, true);
        d.scalar.star_count += 2;  // two normalized basis effects
    }
    return bm;
}

// ---- classification predicates ----------------------------------------------

namespace detail {

struct EquatorialFactor {
    double theta;  // <0| + e^{i theta} <1|, up to the scalar below
    cplx scale;
};

// Decomposes a 2-qubit effect as (e1 (x) e2) with both factors equatorial
// (equal-magnitude components). Returns factors normalized to leading
// coefficient 1; overall scale carried on the first factor.
inline bool split_equatorial_pair(const QubitTensor& f, double tol,
                                  EquatorialFactor& e1, EquatorialFactor& e2) {
    if (f.n_in != 2 || f.n_out != 0) return false;
    auto m = [&](int x, int y) { return f.a[(x << 1) | y]; };
    // rank-1 check
    if (std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) > tol) return false;
    double n00 = std::abs(m(0, 0)), n01 = std::abs(m(0, 1));
    double n10 = std::abs(m(1, 0)), n11 = std::abs(m(1, 1));
    // equatorial factors have all four entries of equal magnitude
    double mx = std::max({n00, n01, n10, n11});
    if (mx < tol) return false;
    if (std::abs(n00 - mx) > tol || std::abs(n01 - mx) > tol ||
        std::abs(n10 - mx) > tol || std::abs(n11 - mx) > tol)
        return false;
    e2.theta = std::arg(m(0, 1) / m(0, 0));
    e2.scale = cplx{1, 0};
    e1.theta = std::arg(m(1, 0) / m(0, 0));
    e1.scale = 2.0 * m(0, 0);  // effect = scale * <+_t1| (x) <+_t2| (normalized bras)
    return true;
}

inline bool angles_differ_by_pi(double a, double b, double tol) {
    double d = wrap_angle(a - b);
    return std::abs(d - kPi) < tol;
}

}  // namespace detail

// True iff the failure branch is a pair of equatorial (Z-plane) projectors
// with the error bit entering as a pi flip on both factors and a branch-
// independent scalar up to sign: F_k = s (+-1)^k <+_{t1+k pi}| (x) <+_{t2+k pi}|.
// This keeps the measured resource nodes connected to their neighbourhood on
// failure; basis-collapsing or branch-phase-skewed failures are rejected.
inline bool has_green_failure(const FusionSpec& spec, double tol = 1e-7) {
    FusionBranchMaps bm = branch_maps(spec);
    detail::EquatorialFactor a1, a2, b1, b2;
    if (!detail::split_equatorial_pair(bm.failure_at(0), tol, a1, a2)) return false;
    if (!detail::split_equatorial_pair(bm.failure_at(1), tol, b1, b2)) return false;
    if (!detail::angles_differ_by_pi(a1.theta, b1.theta, 1e-6)) return false;
    if (!detail::angles_differ_by_pi(a2.theta, b2.theta, 1e-6)) return false;
    cplx ratio = b1.scale / a1.scale;
    return std::abs(ratio - cplx{1, 0}) < 1e-6 || std::abs(ratio + cplx{1, 0}) < 1e-6;
}

inline QubitTensor pauli_matrix(int p) {
    QubitTensor m(1, 1);
    switch (p) {
        case 0: m.at(0, 0) = 1; m.at(1, 1) = 1; break;
        case 1: m.at(0, 1) = 1; m.at(1, 0) = 1; break;
        case 2: m.at(0, 1) = cplx{0, -1}; m.at(1, 0) = cplx{0, 1}; break;
        default: m.at(0, 0) = 1; m.at(1, 1) = -1; break;
    }
    return m;
}

// True iff every success branch equals the reference branch composed with a
// pair of Pauli gates on the inputs, up to a unit-modulus scalar; the error
// bits are then correctable by local Pauli corrections.
inline bool has_pauli_error(const FusionSpec& spec, double tol = 1e-7) {
    FusionBranchMaps bm = branch_maps(spec);
    QubitTensor ref = bm.success_at(0, 0);
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) {
            if (k == 0 && j == 0) continue;
            QubitTensor s = bm.success_at(k, j);
            bool found = false;
            for (int p1 = 0; p1 < 4 && !found; ++p1)
                for (int p2 = 0; p2 < 4 && !found; ++p2) {
                    QubitTensor cand = ref.compose(pauli_matrix(p1).kron(pauli_matrix(p2)));
                    cplx lambda;
                    if (proportional(s, cand, tol, &lambda) && std::abs(std::abs(lambda) - 1.0) < 1e-6)
                        found = true;
                }
            if (!found) return false;
        }
    return true;
}

// True iff every success branch is invariant under swapping the two inputs.
inline bool is_symmetric(const FusionSpec& spec, double tol = 1e-7) {
    FusionBranchMaps bm = branch_maps(spec);
    QubitTensor swap(2, 2);
    swap.at(0, 0) = 1;
    swap.at(1, 2) = 1;
    swap.at(2, 1) = 1;
    swap.at(3, 3) = 1;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) {
            QubitTensor s = bm.success_at(k, j);
            if (s.max_abs_diff(s.compose(swap)) > tol) return false;
        }
    return true;
}

// ---- canonical plane-labelled fusions ---------------------------------------

namespace detail {

// Effect applied to the fused wire for plane lambda at angle t, written in
// the Hadamard-edge frame of the central spider. The three families are
// fixed by which Pauli fusions they hit at multiples of pi/2.
inline std::array<cplx, 2> central_effect(FusionFamily lambda, double t) {
    switch (lambda) {
        case FusionFamily::XZ:  // equatorial: merges the fused nodes
            return {std::sqrt(0.5), std::sqrt(0.5) * std::exp(cplx{0, t})};
        case FusionFamily::XY:  // real meridian: collapses at even multiples
            return {std::cos(t / 2), std::sin(t / 2)};
        case FusionFamily::YZ:  // imaginary meridian
            return {std::cos(t / 2), cplx{0, 1} * std::sin(t / 2)};
        default:
            throw std::invalid_argument("central_effect: lambda must be YZ, XZ, or XY");
    }
}

inline FusionFamily pauli_family(FusionFamily lambda, int a) {
    bool odd = (a % 2) != 0;
    switch (lambda) {
        case FusionFamily::YZ: return odd ? FusionFamily::Y : FusionFamily::Z;
        case FusionFamily::XY: return odd ? FusionFamily::X : FusionFamily::Z;
        case FusionFamily::XZ: return odd ? FusionFamily::Y : FusionFamily::X;
        default: return FusionFamily::None;
    }
}

}  // namespace detail

// The canonical symmetric fusion with green failure and Pauli error:
// plane label lambda in {YZ, XZ, XY}, angle alpha, Clifford parameter c.
// u1 = u2 = S^c; u3 realizes the plane-lambda measurement of the fused wire.
inline FusionSpec canonical_fusion(FusionFamily lambda, double alpha, int c) {
    if (c != 0 && c != 1) throw std::invalid_argument("canonical_fusion: c must be 0 or 1");
    FusionSpec spec;
    spec.u1 = EulerZXZ{wrap_angle(c * kPi / 2), 0, 0};
    spec.u2 = spec.u1;
    auto e0 = detail::central_effect(lambda, alpha);
    auto e1 = detail::central_effect(lambda, alpha + kPi);
    // rows of (U3 H) are the two central effects; so U3 = M H.
    QubitTensor m(1, 1);
    m.at(0, 0) = e0[0];
    m.at(0, 1) = e0[1];
    m.at(1, 0) = e1[0];
    m.at(1, 1) = e1[1];
    spec.u3 = euler_from_matrix(m.compose(hadamard_matrix()));
    spec.measurement_plane_and_angle = {{lambda, wrap_angle(alpha)}};
    return spec;
}

// ---- classification ----------------------------------------------------------

struct FusionClass {
    bool green_failure = false;
    bool pauli_error = false;
    bool symmetric = false;
    bool entangling = false;
    FusionFamily family = FusionFamily::None;
    // canonical parameters (lambda, alpha, c) when the fusion matches a
    // canonical form up to Pauli errors and branch phases
    std::optional<FusionFamily> lambda;
    std::optional<double> alpha;
    std::optional<int> c;
};

namespace detail {

// Fits the central-effect pair (E0, E1) from a success effect for Clifford
// parameter c, inverting S[xy] = (1/sqrt2) sum_a E_a (1/2)(-1)^{a(x+y)} i^{c(x+y)}.
inline bool fit_central_effect(const QubitTensor& s00, int c, std::array<cplx, 2>& e, double tol) {
    // Invert on the parity basis: for xy with x+y even/odd the two T-columns
    // are orthogonal, so solve by least squares on the 4 entries.
    cplx t[2][4];
    for (int a = 0; a < 2; ++a)
        for (int xy = 0; xy < 4; ++xy) {
            int x = xy >> 1, y = xy & 1;
            cplx ipow = std::pow(cplx{0, 1}, c * (x + y));
            t[a][xy] = std::sqrt(0.5) * 0.5 * std::pow(-1.0, a * (x + y)) * ipow;
        }
    // normal equations for the 4x2 system
    cplx g00{}, g01{}, g10{}, g11{}, r0{}, r1{};
    for (int xy = 0; xy < 4; ++xy) {
        g00 += std::conj(t[0][xy]) * t[0][xy];
        g01 += std::conj(t[0][xy]) * t[1][xy];
        g10 += std::conj(t[1][xy]) * t[0][xy];
        g11 += std::conj(t[1][xy]) * t[1][xy];
        r0 += std::conj(t[0][xy]) * s00.a[xy];
        r1 += std::conj(t[1][xy]) * s00.a[xy];
    }
    cplx det = g00 * g11 - g01 * g10;
    if (std::abs(det) < 1e-12) return false;
    e[0] = (g11 * r0 - g01 * r1) / det;
    e[1] = (g00 * r1 - g10 * r0) / det;
    // residual check
    double resid = 0;
    for (int xy = 0; xy < 4; ++xy)
        resid = std::max(resid, std::abs(t[0][xy] * e[0] + t[1][xy] * e[1] - s00.a[xy]));
    return resid < tol;
}

// Extracts the family angle from a fitted central effect, if it has the
// family's shape (up to a global phase).
inline std::optional<double> family_angle(FusionFamily lambda, const std::array<cplx, 2>& e, double tol) {
    double n0 = std::abs(e[0]), n1 = std::abs(e[1]);
    double norm = std::sqrt(n0 * n0 + n1 * n1);
    if (std::abs(norm - 1.0) > 10 * tol) return std::nullopt;
    if (lambda == FusionFamily::XZ) {
        if (std::abs(n0 - n1) > tol) return std::nullopt;
        return wrap_angle(std::arg(e[1] / e[0]));
    }
    if (n0 < tol) return kPi;
    cplx r = e[1] / e[0];
    if (lambda == FusionFamily::XY) {
        if (std::abs(r.imag()) > tol * std::max(1.0, std::abs(r))) return std::nullopt;
        return wrap_angle(2 * std::atan(r.real()));
    }
    // YZ: ratio purely imaginary
    if (std::abs(r.real()) > tol * std::max(1.0, std::abs(r))) return std::nullopt;
    return wrap_angle(2 * std::atan(r.imag()));
}

// All six branch effects, evaluated once.
struct BranchTensors {
    std::array<std::array<QubitTensor, 2>, 2> s{{{QubitTensor(2, 0), QubitTensor(2, 0)},
                                                 {QubitTensor(2, 0), QubitTensor(2, 0)}}};
    std::array<QubitTensor, 2> f{QubitTensor(2, 0), QubitTensor(2, 0)};

    explicit BranchTensors(const FusionBranchMaps& bm) {
        for (int k = 0; k < 2; ++k) {
            for (int j = 0; j < 2; ++j) s[k][j] = bm.success_at(k, j);
            f[k] = bm.failure_at(k);
        }
    }
};

inline bool unit_proportional(const QubitTensor& a, const QubitTensor& b, double tol) {
    cplx lambda;
    return proportional(a, b, tol, &lambda) && std::abs(std::abs(lambda) - 1.0) < 1e-6;
}

// Branch-wise comparison up to one shared Pauli pair and per-branch unit phases.
inline bool matches_up_to_pauli(const BranchTensors& lhs, const BranchTensors& rhs, double tol) {
    for (int p1 = 0; p1 < 4; ++p1)
        for (int p2 = 0; p2 < 4; ++p2) {
            QubitTensor pp = pauli_matrix(p1).kron(pauli_matrix(p2));
            bool ok = true;
            for (int k = 0; k < 2 && ok; ++k) {
                for (int j = 0; j < 2 && ok; ++j)
                    if (!unit_proportional(lhs.s[k][j], rhs.s[k][j].compose(pp), tol)) ok = false;
                if (ok && !unit_proportional(lhs.f[k], rhs.f[k].compose(pp), tol) &&
                    !unit_proportional(lhs.f[k], rhs.f[1 - k].compose(pp), tol))
                    ok = false;
            }
            if (ok) return true;
        }
    return false;
}

}  // namespace detail

inline bool is_entangling_success(const FusionSpec& spec, double tol = 1e-9) {
    QubitTensor s00 = branch_maps(spec).success_at(0, 0);
    auto m = [&](int x, int y) { return s00.a[(x << 1) | y]; };
    return std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) > tol;
}

inline FusionClass classify(const FusionSpec& spec, double tol = 1e-7) {
    FusionClass cls;
    cls.green_failure = has_green_failure(spec, tol);
    cls.pauli_error = has_pauli_error(spec, tol);
    cls.symmetric = is_symmetric(spec, tol);
    cls.entangling = is_entangling_success(spec);
    if (!cls.green_failure || !cls.pauli_error) return cls;
    detail::BranchTensors bt(branch_maps(spec));
    const QubitTensor& s00 = bt.s[0][0];
    for (FusionFamily lambda : {FusionFamily::XZ, FusionFamily::XY, FusionFamily::YZ}) {
        for (int c = 0; c < 2; ++c) {
            for (int p1 = 0; p1 < 4; ++p1)
                for (int p2 = 0; p2 < 4; ++p2) {
                    QubitTensor undressed = s00.compose(pauli_matrix(p1).kron(pauli_matrix(p2)));
                    std::array<cplx, 2> e;
                    // quotient the global phase before fitting
                    cplx lead{0, 0};
                    for (const auto& v : undressed.a)
                        if (std::abs(v) > std::abs(lead)) lead = v;
                    if (std::abs(lead) < tol) continue;
                    QubitTensor rotated = undressed.scaled(std::abs(lead) / lead);
                    if (!detail::fit_central_effect(rotated, c, e, 100 * tol)) continue;
                    auto alpha = detail::family_angle(lambda, e, 1e-5);
                    if (!alpha) continue;
                    FusionSpec cand = canonical_fusion(lambda, *alpha, c);
                    if (!detail::matches_up_to_pauli(bt, detail::BranchTensors(branch_maps(cand)), tol)) continue;
                    cls.lambda = lambda;
                    cls.alpha = *alpha;
                    cls.c = c;
                    double steps = *alpha / (kPi / 2);
                    long a = std::lround(steps);
                    if (std::abs(steps - a) < 1e-5)
                        cls.family = detail::pauli_family(lambda, static_cast<int>(((a % 4) + 4) % 4));
                    else
                        cls.family = lambda;
                    return cls;
                }
        }
    }
    return cls;
}

// ---- success probabilities ---------------------------------------------------

// Born-rule probability that the fusion succeeds on the given 2-qubit input
// density matrix.
inline double success_probability(const FusionSpec& spec, const QubitTensor& rho) {
    if (rho.n_in != 2 || rho.n_out != 2) throw std::invalid_argument("success_probability: rho must be 2-qubit");
    return branch_maps(spec).success.cp_probability({}, rho);
}

// Probability that the fusion succeeds when applied non-destructively to two
// unmeasured qubits of the graph state on `n` vertices: each fused qubit is
// fanned out of its vertex spider (a Z-spider copy), the fusion consumes the
// copies, and all `n` graph qubits remain as outputs.
inline double graph_input_success_probability(const FusionSpec& spec, std::size_t n,
                                              const std::vector<std::pair<int, int>>& graph_edges,
                                              int u, int v) {
    if (u == v || u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
        throw std::invalid_argument("graph_input_success_probability: bad vertex pair");
    QubitTensor psi = graph_state_diagram(n, graph_edges).eval_tensor();
    FusionBranchMaps bm = branch_maps(spec);
    // output port q occupies bit (n-1-q) of the state index
    int bu = static_cast<int>(n) - 1 - u, bv = static_cast<int>(n) - 1 - v;
    double p = 0;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) {
            QubitTensor s = bm.success_at(k, j);
            // the Z-spider fan-out copies the computational-basis value of each
            // fused vertex onto the fusion wire, so the branch amplitude at a
            // basis state z is S[z_u, z_v] * psi[z]
            for (std::size_t z = 0; z < psi.a.size(); ++z) {
                int a = static_cast<int>((z >> bu) & 1), b = static_cast<int>((z >> bv) & 1);
                p += std::norm(s.a[(a << 1) | b] * psi.a[z]);
            }
        }
    return p;
}

}  // namespace fbqc
