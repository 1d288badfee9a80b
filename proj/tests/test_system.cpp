#include <doctest.h>

#include "mrsys/lifting.hpp"
#include "mrsys/system.hpp"
#include "support/oracles.hpp"
#include "support/random_system.hpp"

using namespace mrsys;
using testing_support::Gen;

namespace {

VectorSequence impulse(int dim, int length) {
    VectorSequence u = VectorSequence::zeros(dim, 0, static_cast<std::size_t>(length));
    u.values[0].setConstant(1.0);
    return u;
}

VectorSequence random_input(Gen& gen, int dim, int length) {
    VectorSequence u = VectorSequence::zeros(dim, 0, 0);
    for (int t = 0; t < length; ++t) u.values.push_back(gen.vector(dim));
    return u;
}

}  // namespace

TEST_CASE("validate accepts the worked examples and reports violations") {
    const auto ex41 = testing_support::scalar_two_phase_system();
    const auto report = validate(ex41);
    CHECK(report.ok());
    REQUIRE(report.minimal_pair);
    CHECK(*report.minimal_pair == std::pair{2, 2});
    CHECK(validate(testing_support::rotating_state_system()).ok());
    CHECK(testing_support::rotating_state_system().period() == 4);

    auto broken = ex41;
    broken.B.push_back(broken.B[0]);
    const auto bad = validate(broken);
    REQUIRE(bad.violations.size() == 1);
    CHECK(bad.violations[0].find("sequence length 3 ≠ m·n̄ = 2") != std::string::npos);

    auto shape = ex41;
    shape.C[1] = ComplexMatrix::Zero(2, 1);
    CHECK_FALSE(validate(shape).ok());

    auto nan = ex41;
    nan.A[0](0, 0) = std::nan("");
    CHECK_FALSE(validate(nan).ok());
    CHECK_THROWS_AS(require_valid(nan), Error);

    // An LTI system written at period (4, 2) reduces to (2, 1).
    MultirateSystem lti;
    lti.m = 4;
    lti.n = 2;
    lti.state_dim = lti.input_dim = lti.output_dim = 1;
    lti.A.assign(4, ComplexMatrix::Constant(1, 1, 0.5));
    lti.B.assign(4, ComplexMatrix::Constant(1, 1, 1.0));
    lti.C.assign(4, ComplexMatrix::Constant(1, 1, 1.0));
    lti.D.assign(4, ComplexMatrix::Constant(1, 1, 0.0));
    CHECK(*validate(lti).minimal_pair == std::pair{2, 1});
}

TEST_CASE("simulate reproduces the hand recursion of the scalar two-phase system") {
    const auto sys = testing_support::scalar_two_phase_system();
    const auto trace = simulate(sys, ComplexVector::Zero(1), impulse(1, 1), 4);
    const std::vector<Complex> want{0.0, 6.0, -1.0, 1.5};
    REQUIRE(trace.y.size() == 4);
    for (int t = 0; t < 4; ++t) CHECK(trace.y.values[t](0) == want[t]);
    CHECK(trace.x.values[1](0) == Complex(2.0));
    CHECK(trace.x.values[2](0) == Complex(1.0));
    CHECK(trace.x.values[3](0) == Complex(0.5));

    const auto zero = simulate(sys, ComplexVector::Zero(1), VectorSequence::zeros(1, 0, 0), 10);
    for (const auto& y : zero.y.values) CHECK(y.isZero());
    for (const auto& x : zero.x.values) CHECK(x.isZero());

    CHECK_THROWS_AS(simulate(sys, ComplexVector::Zero(2), impulse(1, 1), 4), Error);
}

TEST_CASE("simulate downsamples the central output of the rotating-state system") {
    const auto sys = testing_support::rotating_state_system();
    const auto trace = simulate(sys, ComplexVector::Zero(2), impulse(1, 1), 12);
    REQUIRE(trace.y.size() == 6);
    for (int t = 0; t < 6; ++t) CHECK(trace.y.values[t] == trace.y_central.values[2 * t]);
    CHECK(trace.u_central.stacked() == upsample(trace.u, sys.mbar()).stacked().head(12));
}

TEST_CASE("reperiodize tiles the lists and keeps simulations bit-identical") {
    const auto sys = testing_support::scalar_two_phase_system();
    const auto tiled = reperiodize(sys, 2);
    CHECK(tiled.m == 4);
    CHECK(tiled.n == 4);
    REQUIRE(tiled.B.size() == 4);
    CHECK(tiled.B[2](0, 0) == Complex(2.0));
    CHECK(tiled.B[3](0, 0) == Complex(6.0));
    CHECK(reperiodize(sys, 1).A == sys.A);

    Gen gen(31);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = testing_support::random_system(gen, testing_support::random_shape(gen, {1, 2, 3}, 3), 0.8);
        const int k = gen.integer(2, 3);
        const auto u = random_input(gen, s.input_dim, 64);
        const ComplexVector x0 = gen.vector(s.state_dim);
        const auto a = simulate(s, x0, u, 64);
        const auto b = simulate(reperiodize(s, k), x0, u, 64);
        CHECK(a.y.stacked() == b.y.stacked());
        CHECK(a.x.stacked() == b.x.stacked());
    }
}

TEST_CASE("shift_origin rotates the operator lists") {
    const auto sys = testing_support::scalar_two_phase_system();
    const auto shifted = shift_origin(sys, 1);
    CHECK(shifted.B[0](0, 0) == Complex(6.0));
    CHECK(shifted.B[1](0, 0) == Complex(2.0));
    CHECK(shifted.C[0](0, 0) == Complex(3.0));
    CHECK(shifted.C[1](0, 0) == Complex(-1.0));
    CHECK(shift_origin(sys, 0).B == sys.B);
    CHECK(shift_origin(sys, 2).B == sys.B);
    CHECK(shift_origin(sys, -1).B == shifted.B);
}

TEST_CASE("difference is linear in the traces") {
    const auto sys = testing_support::scalar_two_phase_system();
    Gen gen(32);
    const auto u = random_input(gen, 1, 64);
    const auto self = simulate(difference(sys, sys), ComplexVector::Zero(2), u, 64);
    CHECK(self.y.stacked().cwiseAbs().maxCoeff() <= 1e-12);

    for (int trial = 0; trial < 20; ++trial) {
        // Same ratio, different c.
        const int mbar = gen.integer(1, 2);
        const int nbar = mbar == 2 ? 1 : gen.integer(1, 2);
        testing_support::Shape s1{2 * mbar, 2 * nbar, gen.integer(1, 3), 2, 1};
        testing_support::Shape s2{3 * mbar, 3 * nbar, gen.integer(1, 3), 2, 1};
        const auto a = testing_support::random_system(gen, s1, 0.7);
        const auto b = testing_support::random_system(gen, s2, 0.7);
        const auto d = difference(a, b);
        CHECK(d.c() == 6);
        CHECK(d.state_dim == a.state_dim + b.state_dim);
        const auto in = random_input(gen, 2, 64);
        const auto ya = simulate(a, ComplexVector::Zero(a.state_dim), in, 64).y.stacked();
        const auto yb = simulate(b, ComplexVector::Zero(b.state_dim), in, 64).y.stacked();
        const auto yd = simulate(d, ComplexVector::Zero(d.state_dim), in, 64).y.stacked();
        CHECK((yd - (ya - yb)).norm() <= 1e-12 * std::max(1.0, ya.norm()));
    }

    auto wrong_dims = sys;
    wrong_dims.output_dim = 2;
    for (auto& c : wrong_dims.C) c = ComplexMatrix::Zero(2, 1);
    for (auto& d : wrong_dims.D) d = ComplexMatrix::Zero(2, 1);
    try {
        difference(sys, wrong_dims);
        FAIL("expected IncompatibleDims");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IncompatibleDims);
    }
    try {
        difference(sys, testing_support::rotating_state_system());
        FAIL("expected an incompatibility");
    } catch (const Error& e) {
        CHECK((e.kind() == ErrorKind::IncompatibleRatio || e.kind() == ErrorKind::IncompatibleDims));
    }
}

TEST_CASE("emp_steady_state examples") {
    const auto sys = testing_support::scalar_two_phase_system();
    EmpCoefficients u;
    u.period = 2;
    u.base = 1.0;
    u.coeffs = {ComplexVector::Constant(1, 1.0), ComplexVector::Zero(1)};
    const auto ss = emp_steady_state(sys, 1.0, u);
    CHECK(std::abs(ss.y.coeffs[0](0) - 16.0 / 3.0) <= 1e-12);
    CHECK(std::abs(ss.y.coeffs[1](0) + 44.0 / 3.0) <= 1e-12);

    EmpCoefficients zero = u;
    zero.coeffs = {ComplexVector::Zero(1), ComplexVector::Zero(1)};
    const auto quiet = emp_steady_state(sys, Complex(0.3, 0.2), [&] {
        EmpCoefficients z = zero;
        z.base = Complex(0.3, 0.2);
        return z;
    }());
    CHECK(quiet.x0.isZero());
    CHECK(quiet.y.stacked().isZero());

    EmpCoefficients at_pole = u;
    at_pole.base = 2.0;
    CHECK_THROWS_AS(emp_steady_state(sys, 2.0, at_pole), Error);
}

TEST_CASE("steady state from x0 reproduces the EMP by simulation") {
    Gen gen(33);
    testing_support::Shape shape{3, 3, 2, 1, 1};
    for (int trial = 0; trial < 10; ++trial) {
        shape.state_dim = gen.integer(1, 3);
        const auto sys = testing_support::random_system(gen, shape, 0.8);
        const Complex z = std::polar(0.5, gen.uniform(0.0, 6.28));
        EmpCoefficients u;
        u.period = 3;
        u.base = z;
        for (int k = 0; k < 3; ++k) u.coeffs.push_back(gen.vector(1));
        const auto ss = emp_steady_state(sys, z, u);

        ComplexVector x_sum = ComplexVector::Zero(sys.state_dim);
        for (const auto& c : ss.x.coeffs) x_sum += c;
        CHECK(ss.x0 == x_sum);

        const int steps = 6 * sys.period();
        const auto trace = simulate(sys, ss.x0, emp_synthesize(u, 0, steps), steps);
        const auto y = emp_synthesize(ss.y, 0, steps);
        double num = 0.0;
        double den = 0.0;
        for (int t = 0; t < steps; ++t) {
            const double w = std::pow(0.5, t);
            num = std::max(num, w * (trace.y.values[t] - y.values[t]).norm());
            den = std::max(den, w * y.values[t].norm());
        }
        CHECK(num <= 1e-8 * den);
    }
}

TEST_CASE("characteristic condition on random systems") {
    Gen gen(34);
    for (int trial = 0; trial < 100; ++trial) {
        const auto sys = testing_support::random_system(gen, testing_support::random_shape(gen, {1, 2, 3, 4}, 3), 0.9);
        const int steps = 4 * sys.period();
        const int inputs = steps / sys.mbar();
        VectorSequence u = VectorSequence::zeros(sys.input_dim, 0, static_cast<std::size_t>(inputs));
        for (int t = sys.n; t < inputs; ++t) u.values[t] = gen.vector(sys.input_dim);
        VectorSequence advanced = VectorSequence::zeros(sys.input_dim, 0, static_cast<std::size_t>(inputs));
        for (int t = 0; t + sys.n < inputs; ++t) advanced.values[t] = u.values[t + sys.n];
        const auto zero = ComplexVector::Zero(sys.state_dim);
        const auto y = simulate(sys, zero, u, steps).y;
        const auto y_adv = simulate(sys, zero, advanced, steps).y;
        for (int t = 0; t + sys.m < static_cast<int>(y.size()); ++t) {
            CHECK(y_adv.values[t] == y.values[t + sys.m]);
        }
    }
}
