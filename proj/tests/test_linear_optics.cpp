// Tests for the linear-optics core: mode unitaries, permanent-based Fock
// evolution, circuit staging, dual-rail encoding, and the fusion circuits'
// Kraus decompositions checked against their ZX forms.
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fbqc/linear_optics.hpp"
#include "fbqc/zx.hpp"

using namespace fbqc;

namespace {

const double kSqrt2Inv = 1.0 / std::sqrt(2.0);

cplx branch_amp(const std::vector<DetectionBranch>& brs, const std::map<std::string, int>& outcome,
                const Occupation& residual) {
    for (const auto& b : brs)
        if (b.outcome == outcome) {
            auto it = b.residual.amps.find(residual);
            return it == b.residual.amps.end() ? cplx(0.0) : it->second;
        }
    return 0.0;
}

}  // namespace

TEST_CASE("single beam splitter unitary is the Hadamard matrix") {
    LoCircuit c;
    c.mode_count = 2;
    c.bs(0, 1);
    ModeUnitary u = circuit_unitary(c);
    REQUIRE(u.is_unitary());
    CHECK(std::abs(u.at(0, 0) - kSqrt2Inv) < kTol);
    CHECK(std::abs(u.at(0, 1) - kSqrt2Inv) < kTol);
    CHECK(std::abs(u.at(1, 0) - kSqrt2Inv) < kTol);
    CHECK(std::abs(u.at(1, 1) + kSqrt2Inv) < kTol);
}

TEST_CASE("phase shift unitary is a 1x1 phase") {
    LoCircuit c;
    c.mode_count = 1;
    c.ps(0, 0.7);
    CHECK(std::abs(circuit_unitary(c).at(0, 0) - expi(0.7)) < kTol);
}

TEST_CASE("two beam splitters on the same pair compose to the identity") {
    LoCircuit c;
    c.mode_count = 2;
    c.bs(0, 1);
    c.bs(0, 1);
    ModeUnitary u = circuit_unitary(c);
    CHECK(std::abs(u.at(0, 0) - 1.0) < kTol);
    CHECK(std::abs(u.at(0, 1)) < kTol);
    CHECK(std::abs(u.at(1, 1) - 1.0) < kTol);
}

TEST_CASE("circuit_unitary rejects sources and detectors") {
    LoCircuit c;
    c.mode_count = 2;
    c.source(0, 1);
    CHECK_THROWS(circuit_unitary(c));
}

TEST_CASE("mode swap built from physical gates swaps occupations") {
    LoCircuit c;
    c.mode_count = 2;
    c.swap(0, 1);
    FockVector out = fock_evolve(circuit_unitary(c), FockVector::basis({1, 0}));
    REQUIRE(out.amps.size() == 1);
    CHECK(std::abs(out.amps.at({0, 1}) - cplx(1.0)) < kTol);
}

TEST_CASE("vacuum evolves to vacuum with amplitude 1") {
    LoCircuit c;
    c.mode_count = 3;
    c.bs(0, 1);
    c.ps(2, 1.1);
    c.bs(1, 2);
    FockVector out = fock_evolve(circuit_unitary(c), FockVector::basis({0, 0, 0}));
    REQUIRE(out.amps.size() == 1);
    CHECK(std::abs(out.amps.at({0, 0, 0}) - cplx(1.0)) < kTol);
}

TEST_CASE("Hong-Ou-Mandel: (1,1) into a beam splitter never exits as (1,1)") {
    LoCircuit c;
    c.mode_count = 2;
    c.bs(0, 1);
    FockVector out = fock_evolve(circuit_unitary(c), FockVector::basis({1, 1}));
    CHECK(out.amps.count({1, 1}) == 0);
    // The photon pair bunches with amplitude 1/sqrt2 each way.
    CHECK(std::abs(out.amps.at({2, 0}) - kSqrt2Inv) < kTol);
    CHECK(std::abs(out.amps.at({0, 2}) + kSqrt2Inv) < kTol);
    CHECK(std::abs(out.norm_sq() - 1.0) < kTol);
}

TEST_CASE("single photon into a beam splitter splits evenly") {
    LoCircuit c;
    c.mode_count = 2;
    c.bs(0, 1);
    FockVector out = fock_evolve(circuit_unitary(c), FockVector::basis({1, 0}));
    CHECK(std::abs(out.amps.at({1, 0}) - kSqrt2Inv) < kTol);
    CHECK(std::abs(out.amps.at({0, 1}) - kSqrt2Inv) < kTol);
}

TEST_CASE("photon number is conserved through random interferometers") {
    std::mt19937 rng(5);
    for (int rep = 0; rep < 5; ++rep) {
        LoCircuit c;
        c.mode_count = 4;
        for (int g = 0; g < 6; ++g) {
            int i = static_cast<int>(rng() % 4), j = static_cast<int>(rng() % 4);
            if (i == j) {
                c.ps(i, (rng() % 8) * kPi / 4.0);
            } else {
                c.bs(std::min(i, j), std::max(i, j));
            }
        }
        ModeUnitary u = circuit_unitary(c);
        REQUIRE(u.is_unitary());
        FockVector out = fock_evolve(u, FockVector::basis({1, 0, 2, 0}));
        double total = 0.0;
        for (const auto& [occ, amp] : out.amps) {
            int n = 0;
            for (int k : occ) n += k;
            CHECK(n == 3);
            total += std::norm(amp);
        }
        CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("permanent matches brute force on random matrices") {
    std::mt19937 rng(9);
    auto uniform = [&] { return (static_cast<double>(rng() % 1000) / 500.0) - 1.0; };
    for (int n = 1; n <= 4; ++n) {
        std::vector<cplx> a(static_cast<std::size_t>(n) * n);
        for (auto& x : a) x = cplx(uniform(), uniform());
        // Brute force over permutations.
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        cplx ref = 0.0;
        do {
            cplx prod = 1.0;
            for (int r = 0; r < n; ++r) prod *= a[static_cast<std::size_t>(r) * n + perm[r]];
            ref += prod;
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(std::abs(permanent(a, n) - ref) < 1e-9);
    }
}

TEST_CASE("run_circuit stages sources and detectors") {
    LoCircuit c;
    c.mode_count = 2;
    c.source(0, 1);
    c.bs(0, 1);
    c.detector(0, "a");
    c.detector(1, "b");
    auto branches = run_circuit(c, FockVector{});
    double total = 0.0;
    for (const auto& b : branches) total += b.residual.norm_sq();
    CHECK(std::abs(total - 1.0) < kTol);
    CHECK(std::abs(branch_amp(branches, {{"a", 1}, {"b", 0}}, {}) - kSqrt2Inv) < kTol);
    CHECK(std::abs(branch_amp(branches, {{"a", 0}, {"b", 1}}, {}) - kSqrt2Inv) < kTol);
}

TEST_CASE("detector on a single-photon mode reports one photon") {
    LoCircuit c;
    c.mode_count = 1;
    c.source(0, 1);
    c.detector(0, "n");
    auto branches = run_circuit(c, FockVector{});
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].outcome.at("n") == 1);
    CHECK(std::abs(branches[0].residual.amps.at({}) - cplx(1.0)) < kTol);
}

TEST_CASE("staging invariants are enforced") {
    LoCircuit c;
    c.mode_count = 2;
    c.bs(0, 1);
    c.source(0, 1);  // source after another component on its mode
    CHECK_THROWS(run_circuit(c, FockVector{}));

    LoCircuit c2;
    c2.mode_count = 2;
    c2.detector(0, "a");
    c2.bs(0, 1);  // component on a detected mode
    CHECK_THROWS(run_circuit(c2, FockVector{}));
}

TEST_CASE("dual-rail encode maps basis states to one photon per pair") {
    FockVector f0 = dual_rail_encode_basis(0, 1);
    CHECK(std::abs(f0.amps.at({1, 0}) - cplx(1.0)) < kTol);
    FockVector f1 = dual_rail_encode_basis(1, 1);
    CHECK(std::abs(f1.amps.at({0, 1}) - cplx(1.0)) < kTol);
}

TEST_CASE("decode is a left inverse of encode on random 2-qubit states") {
    std::mt19937 rng(21);
    auto uniform = [&] { return (static_cast<double>(rng() % 1000) / 500.0) - 1.0; };
    QubitTensor psi(0, 2);
    for (int b = 0; b < 4; ++b) psi.at(b, 0) = cplx(uniform(), uniform());
    auto decoded = dual_rail_decode(dual_rail_encode(psi));
    REQUIRE(decoded.has_value());
    CHECK(decoded->max_abs_diff(psi) < 1e-12);
}

TEST_CASE("decode rejects leaked states") {
    FockVector f(2);
    f.add({2, 0}, 1.0);
    CHECK(!dual_rail_decode(f).has_value());
}

TEST_CASE("Type I fusion reproduces the Z-spider Kraus decomposition") {
    KrausReport rep = kraus_report(type1_circuit(), 2, 1);
    CHECK(rep.completeness_defect < 1e-8);

    // Success branches: exactly one photon detected; K = (1/sqrt2) * Z-spider
    // with k*pi phase, k = photon count on the second detector.
    ZxDiagram zsp = ZxDiagram::spider(Color::Z, 2, 1, Phase(Angle::zero(), {"k"}));
    for (const auto& br : rep.branches) {
        int a = br.outcome.at("a"), b = br.outcome.at("b");
        if (a + b != 1) continue;
        REQUIRE(br.kraus.size() == 1);
        REQUIRE(br.leaks.empty());
        QubitTensor expect = zsp.eval_tensor({{"k", b}}).scaled(kSqrt2Inv);
        CHECK(br.kraus[0].max_abs_diff(expect) < 1e-9);
    }

    // Failure branches: (0,0) leaks two photons into the kept pair and fires
    // on input |01>; the bunched outcomes fire on |10> leaving vacuum.
    for (const auto& br : rep.branches) {
        int a = br.outcome.at("a"), b = br.outcome.at("b");
        if (a + b == 1) continue;
        int k = 1 - (a + b) / 2;
        if (a + b == 0) {
            REQUIRE(br.leaks.size() == 1);
            REQUIRE(br.leaks[0].factored);
            // effect = <not-k| x <k| = <0|<1| for k = 1.
            QubitTensor eff = br.leaks[0].effect;
            for (int in = 0; in < 4; ++in) {
                cplx expect = (in == ((1 - k) << 1 | k)) ? cplx(1.0) : cplx(0.0);
                CHECK(std::abs(std::abs(eff.at(0, in)) - std::abs(expect)) < 1e-9);
            }
            CHECK(br.leaks[0].leaked.amps.count({1, 1}) == 1);
        } else {
            // Bunched outcomes leave the kept pair in vacuum (a leak out of
            // the qubit subspace), firing on |10> with weight 1/2 each.
            REQUIRE(br.kraus.empty());
            REQUIRE(br.leaks.size() == 1);
            REQUIRE(br.leaks[0].factored);
            CHECK(std::abs(br.leaks[0].weight - 0.5) < 1e-9);
            for (int in = 0; in < 4; ++in) {
                double mag = std::abs(br.leaks[0].effect.at(0, in));
                CHECK(std::abs(mag - (in == 2 ? kSqrt2Inv : 0.0)) < 1e-9);
            }
        }
    }
}

TEST_CASE("Type I coarse-grained failure is the Z-basis projector pair") {
    // Coarse-grain by s = a+b mod 2 (success bit) and k = 1 - (a+b)/2 on
    // failure. The k=0 failure map must be <1| x <0| with total weight 1.
    CoarseGrain cg = [](const std::map<std::string, int>& o) {
        int a = o.at("a"), b = o.at("b");
        std::map<std::string, int> out;
        out["s"] = (a + b) % 2;
        out["k"] = (a + b) % 2 == 1 ? b : 1 - (a + b) / 2;
        return out;
    };
    KrausReport rep = kraus_report(type1_circuit(), 2, 1, cg);
    CHECK(rep.completeness_defect < 1e-8);
    double failure0_weight = 0.0;
    for (const auto& br : rep.branches) {
        if (br.outcome.at("s") == 1) continue;
        if (br.outcome.at("k") != 0) continue;
        // Two bunched raw outcomes, each a vacuum leak firing on |10> only.
        CHECK(br.kraus.empty());
        REQUIRE(br.leaks.size() == 2);
        for (const auto& leak : br.leaks) {
            REQUIRE(leak.factored);
            for (int in = 0; in < 4; ++in) {
                double mag = std::abs(leak.effect.at(0, in));
                if (in == 2)
                    failure0_weight += mag * mag;
                else
                    CHECK(mag < 1e-9);
            }
        }
    }
    CHECK(std::abs(failure0_weight - 1.0) < 1e-8);
}

TEST_CASE("Type II success branches are X-spider effects with (c+d)pi error") {
    KrausReport rep = kraus_report(type2_circuit(), 2, 0);
    CHECK(rep.completeness_defect < 1e-8);
    // Success: one photon in each detected pair.
    ZxDiagram xsp = ZxDiagram::spider(Color::X, 2, 0, Phase(Angle::zero(), {"e"}));
    int success_branches = 0;
    for (const auto& br : rep.branches) {
        int a = br.outcome.at("a"), b = br.outcome.at("b");
        int cc = br.outcome.at("c"), d = br.outcome.at("d");
        if (a + b != 1 || cc + d != 1) continue;
        ++success_branches;
        REQUIRE(br.kraus.size() == 1);
        int e = (b + d) % 2;
        QubitTensor expect = xsp.eval_tensor({{"e", e}}).scaled(0.5);
        CHECK(br.kraus[0].max_abs_diff(expect) < 1e-9);
    }
    CHECK(success_branches == 4);
}

TEST_CASE("total outcome probability sums to one for fusion circuits") {
    for (const LoCircuit& c : {type1_circuit(), type2_circuit(), ghz_analyzer(3)}) {
        int qubits = c.mode_count / 2;
        for (unsigned long long b = 0; b < (1ull << qubits); ++b) {
            FockVector in = dual_rail_encode_basis(b, qubits);
            double total = 0.0;
            for (const auto& br : run_circuit(c, in)) total += br.residual.norm_sq();
            CHECK(std::abs(total - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("parametrized Type I applies Z rotations around the fusion") {
    // Success Kraus must equal (1/sqrt2) Z(t3) Zspider(k pi) (Z(t1) x Z(t2)).
    const double t1 = 0.3, t2 = 1.1, t3 = 0.7;
    KrausReport rep = kraus_report(type1_circuit(t1, t2, t3), 2, 1);
    CHECK(rep.completeness_defect < 1e-8);
    ZxDiagram core = ZxDiagram::spider(Color::Z, 2, 1, Phase(Angle::zero(), {"k"}));
    ZxDiagram pre = ZxDiagram::z_phase(Angle::radians(t1)).tensor_with(ZxDiagram::z_phase(Angle::radians(t2)));
    ZxDiagram full = pre.compose_with(core).compose_with(ZxDiagram::z_phase(Angle::radians(t3)));
    for (const auto& br : rep.branches) {
        int a = br.outcome.at("a"), b = br.outcome.at("b");
        if (a + b != 1) continue;
        QubitTensor expect = full.eval_tensor({{"k", b}}).scaled(kSqrt2Inv);
        CHECK(br.kraus[0].max_abs_diff(expect) < 1e-9);
    }
    // Failure branches stay Z-basis projector pairs (green failure).
    for (const auto& br : rep.branches) {
        int a = br.outcome.at("a"), b = br.outcome.at("b");
        if (a + b == 1 || a + b == 0) continue;
        for (const auto& op : br.kraus)
            for (int in = 0; in < 4; ++in)
                if (in != 2) CHECK(std::abs(op.at(0, in)) < 1e-9);
    }
}

TEST_CASE("3-GHZ analyzer Kraus maps follow the stated outcome formulas") {
    KrausReport rep = kraus_report(ghz_analyzer(3), 3, 0);
    CHECK(rep.completeness_defect < 1e-8);

    // Full-success branches: one photon per detected pair. The analyzer then
    // acts as the GHZ projector <0..0| + (-1)^j <1..1| with Pauli-Z error j
    // and scalar fixed by completeness.
    int checked = 0;
    for (const auto& br : rep.branches) {
        int r1 = br.outcome.at("r1"), r2 = br.outcome.at("r2");
        int r3 = br.outcome.at("r3"), r4 = br.outcome.at("r4");
        int r5 = br.outcome.at("r5"), r6 = br.outcome.at("r6");
        if (r1 + r2 != 1 || r3 + r4 != 1 || r5 + r6 != 1) continue;
        int j = (r2 + r4 + r6) % 2;
        REQUIRE(br.kraus.size() == 1);
        const QubitTensor& op = br.kraus[0];
        // Support only on |000> and |111>, with relative sign (-1)^j.
        for (int in = 1; in < 7; ++in) CHECK(std::abs(op.at(0, in)) < 1e-9);
        CHECK(std::abs(op.at(0, 0)) > 1e-3);
        CHECK(std::abs(op.at(0, 7) - (j ? -op.at(0, 0) : op.at(0, 0))) < 1e-9);
        ++checked;
    }
    CHECK(checked == 8);
}
