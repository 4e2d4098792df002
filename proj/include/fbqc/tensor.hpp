// fbqc: fusion-based photonic quantum computing toolkit.
//
// SPDX-License-Identifier: MIT
//
// Small dense complex tensors over qubit legs and a greedy contraction
// engine. Everything here is desk scale (<= ~30 nodes), so indices are plain
// bit positions and tensors are vectors of 2^rank amplitudes.
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fbqc/phase.hpp"

namespace fbqc {

// Linear-map view of a diagram: matrix of shape 2^n_out x 2^n_in,
// index = (out << n_in) | in, with port 0 as the most significant bit.
struct QubitTensor {
    std::size_t n_in = 0;
    std::size_t n_out = 0;
    std::vector<cplx> a;

    QubitTensor() = default;
    QubitTensor(std::size_t in, std::size_t out)
        : n_in(in), n_out(out), a(std::size_t{1} << (in + out), cplx{0, 0}) {}

    cplx& at(std::size_t out, std::size_t in) { return a[(out << n_in) | in]; }
    const cplx& at(std::size_t out, std::size_t in) const { return a[(out << n_in) | in]; }

    std::size_t rows() const { return std::size_t{1} << n_out; }
    std::size_t cols() const { return std::size_t{1} << n_in; }

    static QubitTensor identity(std::size_t n) {
        QubitTensor t(n, n);
        for (std::size_t i = 0; i < t.cols(); ++i) t.at(i, i) = 1.0;
        return t;
    }

    // Matrix product this * o (apply o first).
    QubitTensor compose(const QubitTensor& o) const {
        if (cols() != o.rows()) throw std::invalid_argument("QubitTensor::compose: arity mismatch");
        QubitTensor r(o.n_in, n_out);
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t k = 0; k < cols(); ++k) {
                cplx v = at(i, k);
                if (v == cplx{0, 0}) continue;
                for (std::size_t j = 0; j < o.cols(); ++j) r.at(i, j) += v * o.at(k, j);
            }
        return r;
    }

    QubitTensor dagger() const {
        QubitTensor r(n_out, n_in);
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols(); ++j) r.at(j, i) = std::conj(at(i, j));
        return r;
    }

    QubitTensor kron(const QubitTensor& o) const {
        QubitTensor r(n_in + o.n_in, n_out + o.n_out);
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols(); ++j)
                for (std::size_t k = 0; k < o.rows(); ++k)
                    for (std::size_t l = 0; l < o.cols(); ++l)
                        r.at((i << o.n_out) | k, (j << o.n_in) | l) = at(i, j) * o.at(k, l);
        return r;
    }

    QubitTensor scaled(cplx s) const {
        QubitTensor r = *this;
        for (auto& v : r.a) v *= s;
        return r;
    }

    cplx trace() const {
        if (n_in != n_out) throw std::invalid_argument("QubitTensor::trace: not square");
        cplx t{0, 0};
        for (std::size_t i = 0; i < rows(); ++i) t += at(i, i);
        return t;
    }

    double max_abs_diff(const QubitTensor& o) const {
        if (a.size() != o.a.size()) return 1e300;
        double m = 0;
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - o.a[i]));
        return m;
    }

    double norm_inf() const {
        double m = 0;
        for (const auto& v : a) m = std::max(m, std::abs(v));
        return m;
    }
};

// Returns lambda with A = lambda * B entrywise within tol, if one exists.
inline bool proportional(const QubitTensor& A, const QubitTensor& B, double tol, cplx* lambda_out) {
    if (A.a.size() != B.a.size()) return false;
    // Pick the largest entry of B as the reference.
    std::size_t best = 0;
    double bm = 0;
    for (std::size_t i = 0; i < B.a.size(); ++i)
        if (std::abs(B.a[i]) > bm) { bm = std::abs(B.a[i]); best = i; }
    if (bm < tol) {  // B ~ 0: proportional iff A ~ 0 (ratio then ill-defined; report 0)
        if (A.norm_inf() < tol) { if (lambda_out) *lambda_out = 0.0; return true; }
        return false;
    }
    cplx lambda = A.a[best] / B.a[best];
    for (std::size_t i = 0; i < A.a.size(); ++i)
        if (std::abs(A.a[i] - lambda * B.a[i]) > tol * std::max(1.0, std::abs(lambda))) return false;
    if (lambda_out) *lambda_out = lambda;
    return true;
}

// General tensor over named qubit legs; legs[0] is the most significant bit.
struct Tensor {
    std::vector<int> legs;
    std::vector<cplx> a;

    Tensor() : a(1, cplx{1, 0}) {}
    explicit Tensor(std::vector<int> lg) : legs(std::move(lg)), a(std::size_t{1} << legs.size(), cplx{0, 0}) {}

    std::size_t rank() const { return legs.size(); }
};

// Contract all legs shared between t1 and t2. Free legs appear in the result
// ordered (free of t1, then free of t2).
inline Tensor contract_pair(const Tensor& t1, const Tensor& t2) {
    std::vector<int> shared;
    for (int l : t1.legs)
        if (std::find(t2.legs.begin(), t2.legs.end(), l) != t2.legs.end()) shared.push_back(l);
    std::vector<int> free1, free2;
    for (int l : t1.legs)
        if (std::find(shared.begin(), shared.end(), l) == shared.end()) free1.push_back(l);
    for (int l : t2.legs)
        if (std::find(shared.begin(), shared.end(), l) == shared.end()) free2.push_back(l);

    auto positions = [](const std::vector<int>& legs, const std::vector<int>& subset) {
        std::vector<int> pos;
        for (int l : subset) {
            auto it = std::find(legs.begin(), legs.end(), l);
            pos.push_back(static_cast<int>(legs.size() - 1 - (it - legs.begin())));  // bit position
        }
        return pos;
    };
    std::vector<int> p1f = positions(t1.legs, free1), p1s = positions(t1.legs, shared);
    std::vector<int> p2f = positions(t2.legs, free2), p2s = positions(t2.legs, shared);

    std::vector<int> rlegs = free1;
    rlegs.insert(rlegs.end(), free2.begin(), free2.end());
    Tensor r(rlegs);

    const std::size_t nf1 = free1.size(), nf2 = free2.size(), ns = shared.size();
    auto scatter = [](std::size_t bits, const std::vector<int>& pos) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < pos.size(); ++i)
            if ((bits >> (pos.size() - 1 - i)) & 1) idx |= std::size_t{1} << pos[i];
        return idx;
    };
    for (std::size_t f1 = 0; f1 < (std::size_t{1} << nf1); ++f1) {
        std::size_t base1 = scatter(f1, p1f);
        for (std::size_t f2 = 0; f2 < (std::size_t{1} << nf2); ++f2) {
            std::size_t base2 = scatter(f2, p2f);
            cplx sum{0, 0};
            for (std::size_t s = 0; s < (std::size_t{1} << ns); ++s)
                sum += t1.a[base1 | scatter(s, p1s)] * t2.a[base2 | scatter(s, p2s)];
            r.a[(f1 << nf2) | f2] = sum;
        }
    }
    return r;
}

// Greedy contraction: repeatedly contract the pair whose result has the
// smallest rank. Correctness is order-independent; only cost varies.
inline Tensor contract_network(std::vector<Tensor> ts) {
    if (ts.empty()) return Tensor();
    while (ts.size() > 1) {
        std::size_t bi = 0, bj = 1;
        long best = -1;
        for (std::size_t i = 0; i < ts.size(); ++i)
            for (std::size_t j = i + 1; j < ts.size(); ++j) {
                long shared = 0;
                for (int l : ts[i].legs)
                    if (std::find(ts[j].legs.begin(), ts[j].legs.end(), l) != ts[j].legs.end()) ++shared;
                long rank = static_cast<long>(ts[i].rank() + ts[j].rank()) - 2 * shared;
                // Prefer pairs that actually share legs; among them, min rank.
                long score = (shared > 0 ? rank : rank + 1000);
                if (best < 0 || score < best) { best = score; bi = i; bj = j; }
            }
        Tensor merged = contract_pair(ts[bi], ts[bj]);
        ts.erase(ts.begin() + bj);
        ts[bi] = std::move(merged);
    }
    return ts[0];
}

}  // namespace fbqc
