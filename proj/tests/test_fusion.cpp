#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fbqc/fusion.hpp"
#include "fbqc/linear_optics.hpp"

using namespace fbqc;

namespace {

const double kSqrtHalf = std::sqrt(0.5);

FusionSpec identity_spec() { return FusionSpec{}; }

EulerZXZ z_rot(double t) { return EulerZXZ{t, 0, 0}; }
EulerZXZ x_rot(double t) { return EulerZXZ{0, t, 0}; }

EulerZXZ hadamard_euler() { return euler_from_matrix(hadamard_matrix()); }

// effect <a| (x) <b| with parity-projector style entries
QubitTensor parity_effect(int e, double scale) {
    QubitTensor t(2, 0);
    t.a[0b00] = (e == 0) ? scale : 0.0;
    t.a[0b11] = (e == 0) ? scale : 0.0;
    t.a[0b01] = (e == 1) ? scale : 0.0;
    t.a[0b10] = (e == 1) ? scale : 0.0;
    return t;
}

QubitTensor equatorial_pair(double t1, double t2, cplx scale) {
    QubitTensor t(2, 0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            t.a[(x << 1) | y] = scale * 0.5 * std::exp(cplx{0, t1 * x}) * std::exp(cplx{0, t2 * y});
    return t;
}

QubitTensor mixed_state_2q() {
    QubitTensor rho(2, 2);
    for (int i = 0; i < 4; ++i) rho.at(i, i) = 0.25;
    return rho;
}

}  // namespace

TEST_CASE("Euler decomposition round-trips random unitaries") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
    for (int trial = 0; trial < 50; ++trial) {
        EulerZXZ u{ang(rng), ang(rng), ang(rng)};
        QubitTensor m = euler_matrix(u);
        EulerZXZ v = euler_from_matrix(m);
        cplx lambda;
        REQUIRE(proportional(euler_matrix(v), m, 1e-9, &lambda));
        REQUIRE(std::abs(std::abs(lambda) - 1.0) < 1e-9);
    }
    // degenerate cases
    for (double t : {0.0, 0.3, kPi, 1.5 * kPi}) {
        for (const QubitTensor& m : {z_rotation_matrix(t), x_rotation_matrix(t), hadamard_matrix()}) {
            cplx lambda;
            REQUIRE(proportional(euler_matrix(euler_from_matrix(m)), m, 1e-9, &lambda));
        }
    }
}

TEST_CASE("bare fusion branch maps: X-spider success, equatorial failure") {
    FusionBranchMaps bm = branch_maps(identity_spec());
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
            REQUIRE(bm.success_at(k, j).max_abs_diff(parity_effect((k + j) % 2, 0.5)) < 1e-9);
    // failure k: <-| (x) <+| then <+| (x) <-|
    REQUIRE(bm.failure_at(0).max_abs_diff(equatorial_pair(kPi, 0, 1.0)) < 1e-9);
    REQUIRE(bm.failure_at(1).max_abs_diff(equatorial_pair(0, kPi, 1.0)) < 1e-9);
    REQUIRE(bm.completeness_defect() < 1e-9);
}

TEST_CASE("Hadamard-frame spec reproduces the partial fusion followed by a Z measurement") {
    // u1 = u2 = u3 = H undoes the Hadamard frame: success effect
    // (1/sqrt2) <j| Zspider(k pi) = (1/sqrt2) (-1)^{kj} <jj|.
    FusionSpec spec{hadamard_euler(), hadamard_euler(), hadamard_euler(), {}};
    FusionBranchMaps bm = branch_maps(spec);
    // the Euler decomposition of H fixes the unitaries only up to a global
    // phase, so compare each branch family up to one common unit scalar
    cplx ls = bm.success_at(0, 0).a[0b00] / kSqrtHalf;
    REQUIRE(std::abs(std::abs(ls) - 1.0) < 1e-9);
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) {
            QubitTensor expect(2, 0);
            expect.a[(j << 1) | j] = ls * kSqrtHalf * ((k * j) % 2 ? -1.0 : 1.0);
            REQUIRE(bm.success_at(k, j).max_abs_diff(expect) < 1e-9);
        }
    // failure collapses in the Z basis (basis-state projector pair)
    cplx lf = bm.failure_at(0).a[0b10];
    REQUIRE(std::abs(std::abs(lf) - 1.0) < 1e-9);
    for (int k = 0; k < 2; ++k) {
        QubitTensor expect(2, 0);
        expect.a[((1 - k) << 1) | k] = lf;
        REQUIRE(bm.failure_at(k).max_abs_diff(expect) < 1e-9);
    }
    REQUIRE(bm.completeness_defect() < 1e-9);
}

TEST_CASE("branch maps stay complete for random specs") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
    for (int trial = 0; trial < 20; ++trial) {
        FusionSpec spec{{ang(rng), ang(rng), ang(rng)},
                        {ang(rng), ang(rng), ang(rng)},
                        {ang(rng), ang(rng), ang(rng)},
                        {}};
        REQUIRE(branch_maps(spec).completeness_defect() < 1e-8);
    }
}

TEST_CASE("bare fusion branch maps agree with the two-detector-pair optical circuit") {
    KrausReport rep = kraus_report(type2_circuit(), 2, 0);
    REQUIRE(rep.completeness_defect < 1e-9);
    FusionBranchMaps bm = branch_maps(identity_spec());

    double success_weight = 0.0, failure_weight = 0.0;
    QubitTensor fail_sum(2, 2);
    for (const auto& br : rep.branches) {
        int a = br.outcome.at("a"), b = br.outcome.at("b");
        int c = br.outcome.at("c"), d = br.outcome.at("d");
        if (a + b == 1 && c + d == 1) {
            REQUIRE(br.kraus.size() == 1);
            REQUIRE(br.kraus[0].max_abs_diff(bm.success_at(b, d)) < 1e-9);
            success_weight += br.kraus[0].dagger().compose(br.kraus[0]).trace().real();
        } else {
            for (const auto& k : br.kraus) {
                cplx lambda;
                bool m0 = proportional(k, bm.failure_at(0), 1e-9, &lambda);
                bool m1 = proportional(k, bm.failure_at(1), 1e-9, &lambda);
                REQUIRE((m0 || m1));
                QubitTensor t = k.dagger().compose(k);
                for (std::size_t i = 0; i < fail_sum.a.size(); ++i) fail_sum.a[i] += t.a[i];
                failure_weight += t.trace().real();
            }
            for (const auto& leak : br.leaks) failure_weight += leak.weight;
        }
    }
    REQUIRE(success_weight == Catch::Approx(2.0).margin(1e-9));
    REQUIRE(failure_weight == Catch::Approx(2.0).margin(1e-9));
    // circuit failure POVM matches the two symbolic failure branches
    QubitTensor expect(2, 2);
    for (int k = 0; k < 2; ++k) {
        QubitTensor f = bm.failure_at(k);
        QubitTensor t = f.dagger().compose(f);
        for (std::size_t i = 0; i < expect.a.size(); ++i) expect.a[i] += t.a[i];
    }
    REQUIRE(fail_sum.max_abs_diff(expect) < 1e-9);
}

TEST_CASE("green failure predicate: named cases") {
    CHECK(has_green_failure(identity_spec()));
    CHECK(has_green_failure({z_rot(0.7), z_rot(0.7), {}, {}}));
    CHECK(has_green_failure({z_rot(1.1), z_rot(0.2), z_rot(2.4), {}}));
    // pi-flip composed with a rotation keeps the branch-sign pattern
    CHECK(has_green_failure({EulerZXZ{0.4, kPi, 1.3}, z_rot(0.9), {}, {}}));
    // quarter X rotation skews the branch phases: rejected
    CHECK_FALSE(has_green_failure({x_rot(kPi / 2), {}, {}, {}}));
    CHECK_FALSE(has_green_failure({{}, x_rot(kPi / 2), {}, {}}));
    // un-framed spec collapses in the Z basis: rejected
    CHECK_FALSE(has_green_failure({hadamard_euler(), hadamard_euler(), hadamard_euler(), {}}));
}

TEST_CASE("green failure predicate agrees with the Euler-angle criterion") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int trial = 0; trial < 40; ++trial) {
        bool green1 = bit(rng), green2 = bit(rng);
        auto make = [&](bool green) {
            double beta = green ? (bit(rng) ? kPi : 0.0) : ang(rng);
            if (!green) {  // keep clearly away from multiples of pi and collisions
                while (std::abs(std::sin(beta)) < 0.2) beta = ang(rng);
            }
            return EulerZXZ{ang(rng), beta, ang(rng)};
        };
        EulerZXZ u1 = make(green1), u2 = make(green2);
        if (!green1 && !green2 && std::abs(std::sin((u1.beta - u2.beta) / 1.0)) < 0.2) continue;
        // gamma rotations also skew branch phases unless they are 0 or pi
        bool aligned1 = green1 || std::abs(std::sin(u1.gamma)) < 1e-12;
        bool aligned2 = green2 || std::abs(std::sin(u2.gamma)) < 1e-12;
        (void)aligned1;
        (void)aligned2;
        FusionSpec spec{u1, u2, {ang(rng), ang(rng), ang(rng)}, {}};
        CHECK(has_green_failure(spec) == (green1 && green2));
    }
}

TEST_CASE("Pauli error predicate") {
    CHECK(has_pauli_error(identity_spec()));
    CHECK(has_pauli_error(canonical_fusion(FusionFamily::YZ, kPi / 5, 0)));  // phase gadget
    CHECK(has_pauli_error(canonical_fusion(FusionFamily::XZ, kPi / 5, 0)));
    CHECK(has_pauli_error(canonical_fusion(FusionFamily::XY, kPi / 5, 1)));
    // a non-Clifford phase on the fused wire breaks Pauli propagation
    FusionSpec skew = canonical_fusion(FusionFamily::YZ, kPi / 5, 0);
    skew.u1 = x_rot(kPi / 3);
    CHECK_FALSE(has_pauli_error(skew));
}

TEST_CASE("symmetry predicate") {
    CHECK(is_symmetric(identity_spec()));
    CHECK(is_symmetric(canonical_fusion(FusionFamily::XZ, 0.9, 1)));
    FusionSpec asym = identity_spec();
    asym.u1 = z_rot(0.6);
    CHECK_FALSE(is_symmetric(asym));
}

TEST_CASE("canonical fusions are green, Pauli, symmetric") {
    for (FusionFamily lambda : {FusionFamily::YZ, FusionFamily::XZ, FusionFamily::XY})
        for (int c = 0; c < 2; ++c)
            for (double alpha : {0.0, kPi / 5, kPi / 2, 1.3}) {
                FusionSpec spec = canonical_fusion(lambda, alpha, c);
                INFO(to_string(lambda) << " alpha=" << alpha << " c=" << c);
                CHECK(has_green_failure(spec));
                CHECK(has_pauli_error(spec));
                CHECK(is_symmetric(spec));
                CHECK(branch_maps(spec).completeness_defect() < 1e-8);
            }
}

TEST_CASE("classification of named instances") {
    // the bare two-detector-pair fusion is the X-fusion with c = 0
    FusionClass type2 = classify(identity_spec());
    CHECK(type2.family == FusionFamily::X);
    REQUIRE(type2.c.has_value());
    CHECK(*type2.c == 0);
    CHECK(type2.entangling);

    // the CZ-performing fusion: Y-fusion with c = 1
    FusionClass yfus = classify(canonical_fusion(FusionFamily::XZ, kPi / 2, 1));
    CHECK(yfus.family == FusionFamily::Y);
    REQUIRE(yfus.c.has_value());
    CHECK(*yfus.c == 1);
    CHECK(yfus.entangling);

    // Z-fusion is separable (trivial)
    FusionClass zfus = classify(canonical_fusion(FusionFamily::YZ, 0.0, 0));
    CHECK(zfus.family == FusionFamily::Z);
    CHECK_FALSE(zfus.entangling);

    // phase gadget: plane family with free angle
    FusionClass gadget = classify(canonical_fusion(FusionFamily::YZ, kPi / 5, 0));
    CHECK(gadget.family == FusionFamily::YZ);
    REQUIRE(gadget.alpha.has_value());
    CHECK(std::abs(*gadget.alpha - kPi / 5) < 1e-6);

    // non-Pauli spec stays unclassified
    FusionSpec skew = canonical_fusion(FusionFamily::YZ, kPi / 5, 0);
    skew.u1 = x_rot(kPi / 3);
    CHECK(classify(skew).family == FusionFamily::None);
}

TEST_CASE("classification parity table over all 24 Pauli cells") {
    for (FusionFamily lambda : {FusionFamily::YZ, FusionFamily::XZ, FusionFamily::XY})
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 2; ++c) {
                FusionClass cls = classify(canonical_fusion(lambda, a * kPi / 2, c));
                bool odd = a % 2;
                FusionFamily expect = FusionFamily::None;
                if (lambda == FusionFamily::YZ) expect = odd ? FusionFamily::Y : FusionFamily::Z;
                if (lambda == FusionFamily::XY) expect = odd ? FusionFamily::X : FusionFamily::Z;
                if (lambda == FusionFamily::XZ) expect = odd ? FusionFamily::Y : FusionFamily::X;
                INFO(to_string(lambda) << " a=" << a << " c=" << c
                                       << " got " << to_string(cls.family));
                CHECK(cls.family == expect);
                REQUIRE(cls.c.has_value());
                CHECK(*cls.c == c);
            }
}

TEST_CASE("classification round-trips the canonical grid") {
    for (FusionFamily lambda : {FusionFamily::YZ, FusionFamily::XZ, FusionFamily::XY})
        for (int step = 0; step < 16; ++step)
            for (int c = 0; c < 2; ++c) {
                double alpha = step * kPi / 8;
                FusionClass cls = classify(canonical_fusion(lambda, alpha, c));
                INFO(to_string(lambda) << " alpha=" << alpha << " c=" << c);
                REQUIRE(cls.lambda.has_value());
                REQUIRE(cls.c.has_value());
                CHECK(*cls.c == c);
                if (step % 4 != 0) {  // away from the Pauli points the cell is unique
                    CHECK(*cls.lambda == lambda);
                    CHECK(std::abs(*cls.alpha - alpha) < 1e-6);
                    CHECK(cls.family == lambda);
                }
            }
}

TEST_CASE("classification is stable under Pauli dressing") {
    std::mt19937 rng(37);
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
    const std::array<FusionFamily, 3> planes{FusionFamily::YZ, FusionFamily::XZ, FusionFamily::XY};
    for (int trial = 0; trial < 10; ++trial) {
        FusionFamily lambda = planes[pick(rng) % 3];
        int c = pick(rng) % 2;
        double alpha = ang(rng);
        FusionSpec spec = canonical_fusion(lambda, alpha, c);
        // dress an input with a Pauli (Z or X flip as extra Euler rotations)
        FusionSpec dressed = spec;
        int which = pick(rng);
        if (which == 0) dressed.u1 = euler_from_matrix(euler_matrix(spec.u1).compose(pauli_matrix(3)));
        if (which == 1) dressed.u1 = euler_from_matrix(euler_matrix(spec.u1).compose(pauli_matrix(1)));
        if (which == 2) dressed.u2 = euler_from_matrix(euler_matrix(spec.u2).compose(pauli_matrix(3)));
        if (which == 3) dressed.u2 = euler_from_matrix(euler_matrix(spec.u2).compose(pauli_matrix(1)));
        FusionClass base = classify(spec), cls = classify(dressed);
        INFO(to_string(lambda) << " alpha=" << alpha << " c=" << c << " dress=" << which);
        CHECK(cls.family == base.family);
        REQUIRE(cls.c.has_value());
        CHECK(*cls.c == c);
    }
}

TEST_CASE("success probability is 1/2 on the completely mixed input for green fusions") {
    CHECK(success_probability(identity_spec(), mixed_state_2q()) == Catch::Approx(0.5).margin(1e-9));
    CHECK(success_probability(canonical_fusion(FusionFamily::XZ, 0.7, 0), mixed_state_2q()) ==
          Catch::Approx(0.5).margin(1e-9));
    CHECK(success_probability(canonical_fusion(FusionFamily::YZ, 1.9, 1), mixed_state_2q()) ==
          Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("engineered product inputs make a green fusion succeed always") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
    for (int trial = 0; trial < 8; ++trial) {
        FusionSpec spec{z_rot(ang(rng)), z_rot(ang(rng)), {ang(rng), ang(rng), ang(rng)}, {}};
        REQUIRE(has_green_failure(spec));
        FusionBranchMaps bm = branch_maps(spec);
        // read the two failure angles off the failure branches
        QubitTensor f0 = bm.failure_at(0);
        double t1 = std::arg(f0.a[0b10] / f0.a[0b00]);
        double t2 = std::arg(f0.a[0b01] / f0.a[0b00]);
        // psi1 orthogonal to <+_{t1}|, psi2 orthogonal to <+_{t2+pi}|
        std::array<cplx, 2> psi1{1.0, -std::exp(cplx{0, -t1})};
        std::array<cplx, 2> psi2{1.0, std::exp(cplx{0, -t2})};
        QubitTensor rho(2, 2);
        for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s)
                rho.at(r, s) = 0.25 * psi1[r >> 1] * psi2[r & 1] *
                               std::conj(psi1[s >> 1] * psi2[s & 1]);
        CHECK(success_probability(spec, rho) == Catch::Approx(1.0).margin(1e-8));
    }
}

TEST_CASE("graph-state inputs: any green fusion succeeds with probability 1/2") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
    std::uniform_int_distribution<int> nv(3, 5);
    for (int trial = 0; trial < 10; ++trial) {
        int n = nv(rng);
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng() % 2) edges.emplace_back(u, v);
        int u = static_cast<int>(rng() % n), v = (u + 1 + static_cast<int>(rng() % (n - 1))) % n;
        FusionSpec spec = canonical_fusion(FusionFamily::XZ, ang(rng), static_cast<int>(rng() % 2));
        double p = graph_input_success_probability(spec, n, edges, u, v);
        INFO("n=" << n << " pair=(" << u << "," << v << ")");
        CHECK(p == Catch::Approx(0.5).margin(1e-9));
    }
}

TEST_CASE("graph fan-out oracle reproduces the graph-input probability") {
    // build the copied-qubit input state explicitly and apply the success
    // branches as plain tensors, as an independent check of the formula
    FusionSpec spec = canonical_fusion(FusionFamily::YZ, 0.8, 0);
    std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    const int n = 4, u = 0, v = 2;
    QubitTensor psi = graph_state_diagram(n, edges).eval_tensor();
    int bu = n - 1 - u, bv = n - 1 - v;
    // phi lives on n+2 qubits: two fusion copies (front) plus the n originals
    QubitTensor phi(0, n + 2);
    for (std::size_t z = 0; z < psi.a.size(); ++z) {
        std::size_t a = (z >> bu) & 1, b = (z >> bv) & 1;
        phi.a[(a << (n + 1)) | (b << n) | z] = psi.a[z];
    }
    FusionBranchMaps bm = branch_maps(spec);
    double ps = 0, pf = 0;
    for (int k = 0; k < 2; ++k) {
        for (int j = 0; j < 2; ++j) {
            QubitTensor out = bm.success_at(k, j).kron(QubitTensor::identity(n)).compose(phi);
            ps += out.dagger().compose(out).trace().real();
        }
        QubitTensor out = bm.failure_at(k).kron(QubitTensor::identity(n)).compose(phi);
        pf += out.dagger().compose(out).trace().real();
    }
    CHECK(ps == Catch::Approx(0.5).margin(1e-9));
    CHECK(graph_input_success_probability(spec, n, edges, u, v) == Catch::Approx(ps).margin(1e-9));
    CHECK(ps + pf == Catch::Approx(1.0).margin(1e-9));
}
