#include <doctest.h>

#include <cmath>
#include <random>

#include "cbqc/gates.hpp"
#include "cbqc/state.hpp"

using namespace cbqc;

namespace {

const int E = static_cast<int>(AtomLevel::E);
const int F = static_cast<int>(AtomLevel::F);
const int G = static_cast<int>(AtomLevel::G);

Matrix random_unitary(int n, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
    }
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        Complex d = r(i, i);
        q.col(i) *= d / std::abs(d);
    }
    return q;
}

StateVector qubit_state(std::vector<Complex> amps) {
    int n = 0;
    while ((1u << n) < amps.size()) ++n;
    std::vector<SubsystemSpec> specs;
    for (int i = 0; i < n; ++i) specs.push_back(SubsystemSpec::qubit("q" + std::to_string(i)));
    StateVector st(specs, std::move(amps));
    st.normalize();
    return st;
}

}  // namespace

TEST_CASE("product state construction") {
    auto st = new_product_state({SubsystemSpec::atom("A")}, {F});
    CHECK(st.size() == 3);
    CHECK(st.amps()[F] == Complex(1, 0));

    auto st2 = new_product_state({SubsystemSpec::atom("A"), SubsystemSpec::cavity("C", 1)},
                                 {F, 0});
    CHECK(st2.size() == 6);
    CHECK(st2.amps()[st2.index_of({F, 0})] == Complex(1, 0));

    auto st3 = new_product_state({SubsystemSpec::atom("A"), SubsystemSpec::atom("B")}, {E, G});
    CHECK(st3.size() == 9);
    CHECK(st3.amps()[st3.index_of({E, G})] == Complex(1, 0));
    double total = 0;
    for (const auto& a : st3.amps()) total += std::norm(a);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(new_product_state({SubsystemSpec::atom("A")}, {3}), invalid_input_error);
    CHECK_THROWS_AS(
        new_product_state({SubsystemSpec::atom("A"), SubsystemSpec::atom("A")}, {0, 0}),
        invalid_input_error);
}

TEST_CASE("apply_unitary basics") {
    auto st = new_product_state({SubsystemSpec::atom("A")}, {F});
    auto same = apply_unitary(st, {{"A"}, identity_matrix(3)});
    CHECK(fidelity(st, same) == doctest::Approx(1.0).epsilon(1e-12));

    // Hadamard on the (f,e) pair of |f>.
    auto had = apply_unitary(st, {{"A"}, embed_pair(3, {F, E}, hadamard2())});
    CHECK(std::abs(had.amps()[F] - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);
    CHECK(std::abs(had.amps()[E] - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);

    auto two = qubit_state({0, 0, 0, 1});
    auto cz = apply_unitary(two, {{"q0", "q1"}, cz_matrix()});
    CHECK(std::abs(cz.amps()[3] - Complex(-1, 0)) < 1e-12);

    Matrix bad = Matrix::Identity(3, 3) * 2.0;
    CHECK_THROWS_AS(apply_unitary(st, {{"A"}, bad}), contract_violation_error);
    CHECK_THROWS_AS(apply_unitary(st, {{"B"}, identity_matrix(3)}), invalid_input_error);
}

TEST_CASE("measurement eigenstates and symmetry") {
    Rng rng(7);
    auto plus = qubit_state({1, 1});
    auto r = measure(plus, "q0", MeasurementBasis::x(), rng);
    CHECK(r.outcome == +1);
    CHECK(r.prob == doctest::Approx(1.0).epsilon(1e-12));

    auto zero = qubit_state({1, 0});
    auto rp = project_outcome(zero, "q0", MeasurementBasis::x(), +1);
    auto rm = project_outcome(zero, "q0", MeasurementBasis::x(), -1);
    CHECK(rp.prob == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rm.prob == doctest::Approx(0.5).epsilon(1e-12));

    double alpha = 0.9;
    auto pa = qubit_state({Complex(1, 0), std::polar(1.0, alpha)});
    auto ra = measure(pa, "q0", MeasurementBasis::b_alpha(alpha), rng);
    CHECK(ra.outcome == +1);
    CHECK(ra.prob == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measurement on atoms requires clean level pair") {
    Rng rng(3);
    auto st = new_product_state({SubsystemSpec::atom("A")}, {F});
    auto had = apply_unitary(st, {{"A"}, embed_pair(3, {F, G}, hadamard2())});
    // Measuring the (f,g) pair works; the (f,e) pair sees g-amplitude.
    CHECK_NOTHROW(measure(had, "A", MeasurementBasis::x({F, G}), rng));
    CHECK_THROWS_AS(measure(had, "A", MeasurementBasis::x({F, E}), rng),
                    basis_undefined_error);
}

TEST_CASE("fidelity") {
    auto zero = qubit_state({1, 0});
    auto one = qubit_state({0, 1});
    auto plus = qubit_state({1, 1});
    CHECK(fidelity(zero, zero) == doctest::Approx(1.0));
    CHECK(fidelity(zero, one) == doctest::Approx(0.0));
    CHECK(fidelity(zero, plus) == doctest::Approx(0.5));
    CHECK(fidelity(plus, zero) == doctest::Approx(0.5));

    auto atom = new_product_state({SubsystemSpec::atom("A")}, {F});
    CHECK_THROWS_AS(fidelity(zero, atom), invalid_input_error);
}

TEST_CASE("schmidt rank") {
    auto prod = qubit_state({1, 1, 1, 1});
    CHECK(schmidt_rank(prod, {"q0"}) == 1);

    auto bell = qubit_state({1, 0, 0, 1});
    CHECK(schmidt_rank(bell, {"q0"}) == 2);
    CHECK_THROWS_AS(schmidt_rank(bell, {}), invalid_input_error);
    CHECK_THROWS_AS(schmidt_rank(bell, {"q0", "q1"}), invalid_input_error);
}

TEST_CASE("schmidt rank of psi3 across A1 | A2,A3") {
    // psi3 = (1/2)[|fff> + |fgf> + |efe> - |ege>], register (A1,A2,A3).
    std::vector<SubsystemSpec> specs{SubsystemSpec::atom("A1"), SubsystemSpec::atom("A2"),
                                     SubsystemSpec::atom("A3")};
    StateVector psi3(specs, std::vector<Complex>(27, Complex(0, 0)));
    psi3.amps()[psi3.index_of({F, F, F})] = 0.5;
    psi3.amps()[psi3.index_of({F, G, F})] = 0.5;
    psi3.amps()[psi3.index_of({E, F, E})] = 0.5;
    psi3.amps()[psi3.index_of({E, G, E})] = -0.5;

    // Independent oracle: SVD of the explicit A1-row amplitude matrix.
    Matrix m = Matrix::Zero(3, 9);
    m(F, F * 3 + F) = 0.5;
    m(F, G * 3 + F) = 0.5;
    m(E, F * 3 + E) = 0.5;
    m(E, G * 3 + E) = -0.5;
    Eigen::JacobiSVD<Matrix> svd(m);
    int expected = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
        if (svd.singularValues()(k) > 1e-8) ++expected;
    }
    CHECK(expected == 2);
    CHECK(schmidt_rank(psi3, {"A1"}) == expected);
}

TEST_CASE("norm preservation under random unitaries") {
    Rng rng(12345);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<SubsystemSpec> specs{SubsystemSpec::atom("A"), SubsystemSpec::qubit("q"),
                                         SubsystemSpec::cavity("C", 1)};
        std::vector<Complex> amps(12);
        for (auto& a : amps) a = Complex(g(rng), g(rng));
        StateVector st(specs, amps);
        st.normalize();

        int pick = static_cast<int>(rng() % 3);
        std::vector<std::string> targets;
        int dim = 1;
        if (pick == 0) {
            targets = {"A"};
            dim = 3;
        } else if (pick == 1) {
            targets = {"q", "C"};
            dim = 4;
        } else {
            targets = {"A", "q"};
            dim = 6;
        }
        auto out = apply_unitary(st, {targets, random_unitary(dim, rng)});
        CHECK(std::abs(out.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("measurement completeness and repeatability") {
    Rng rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Complex> amps(8);
        for (auto& a : amps) a = Complex(g(rng), g(rng));
        auto st = qubit_state(amps);
        double alpha = g(rng);
        auto basis = MeasurementBasis::b_alpha(alpha);
        auto p = project_outcome(st, "q1", basis, +1);
        auto m = project_outcome(st, "q1", basis, -1);
        CHECK(std::abs(p.prob + m.prob - 1.0) < 1e-10);

        auto r = measure(st, "q1", basis, rng);
        auto again = measure(r.collapsed, "q1", basis, rng);
        CHECK(again.outcome == r.outcome);
        CHECK(again.prob == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("disjoint-target unitaries commute") {
    Rng rng(4242);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Complex> amps(16);
        for (auto& a : amps) a = Complex(g(rng), g(rng));
        auto st = qubit_state(amps);
        LocalOperator ua{{"q0", "q2"}, random_unitary(4, rng)};
        LocalOperator ub{{"q1", "q3"}, random_unitary(4, rng)};
        auto ab = apply_unitary(apply_unitary(st, ua), ub);
        auto ba = apply_unitary(apply_unitary(st, ub), ua);
        for (std::size_t i = 0; i < ab.size(); ++i) {
            CHECK(std::abs(ab.amps()[i] - ba.amps()[i]) < 1e-10);
        }
    }
}

TEST_CASE("tensor, remove_subsystem, reorder") {
    auto a = qubit_state({1, 1});
    auto cav = new_product_state({SubsystemSpec::cavity("C", 1)}, {0});
    auto joint = tensor(a, cav);
    CHECK(joint.size() == 4);
    auto back = remove_subsystem(joint, "C", 0);
    CHECK(fidelity(back, a) == doctest::Approx(1.0));
    CHECK_THROWS_AS(remove_subsystem(joint, "C", 1), contract_violation_error);

    auto two = qubit_state({1, 2, 3, 4});
    auto flipped = reorder(two, {"q1", "q0"});
    CHECK(flipped.amps()[1] == two.amps()[2]);
    CHECK(flipped.amps()[2] == two.amps()[1]);
}
