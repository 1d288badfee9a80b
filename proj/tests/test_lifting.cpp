#include <doctest.h>

#include "mrsys/lifting.hpp"
#include "support/oracles.hpp"
#include "support/random_system.hpp"

using namespace mrsys;
using testing_support::Gen;
using testing_support::relative_error;

TEST_CASE("toeplitz_transform examples") {
    const ComplexMatrix a0 = (ComplexMatrix(2, 2) << 1.0, 2.0, 3.0, 4.0).finished();
    const ComplexMatrix constant = toeplitz_transform({a0, a0, a0}, 3);
    CHECK((constant - block_diagonal({a0, a0, a0})).norm() <= 1e-14);

    const auto ex42 = testing_support::rotating_state_system();
    const ComplexMatrix d = toeplitz_transform(ex42.D, 4);
    CHECK((d - ComplexMatrix::Constant(4, 4, 0.25)).norm() <= 1e-15);
    CHECK((toeplitz_transform(ex42.A, 4) - cyclic_shift(8, 1, -2)).norm() <= 1e-15);

    CHECK_THROWS_AS(toeplitz_transform({a0, ComplexMatrix::Zero(1, 1)}, 2), Error);
    CHECK_THROWS_AS(toeplitz_transform({a0}, 2), Error);
}

TEST_CASE("fourier coefficients invert") {
    Gen gen(41);
    for (int period = 1; period <= 8; ++period) {
        std::vector<ComplexMatrix> seq;
        for (int t = 0; t < period; ++t) seq.push_back(gen.matrix(2, 3));
        const auto hat = fourier_coefficients(seq);
        ComplexMatrix column(2 * period, 3);
        for (int k = 0; k < period; ++k) column.middleRows(2 * k, 2) = hat[k];
        const auto back = inverse_fourier_blocks(column, period, 2);
        for (int t = 0; t < period; ++t) CHECK(relative_error(back[t], seq[t]) <= 1e-14);
    }
}

TEST_CASE("lift examples") {
    const auto lifted = lift(testing_support::scalar_two_phase_system());
    CHECK((lifted.A - 0.5 * ComplexMatrix::Identity(2, 2)).norm() <= 1e-15);
    const ComplexMatrix b = (ComplexMatrix(2, 2) << 4.0, -2.0, -2.0, 4.0).finished();
    const ComplexMatrix c = (ComplexMatrix(2, 2) << 1.0, -2.0, -2.0, 1.0).finished();
    CHECK((lifted.B - b).norm() <= 1e-15);
    CHECK((lifted.C - c).norm() <= 1e-15);
    CHECK(lifted.D.isZero());
    CHECK(lifted.epsilon == Complex(-1.0, 0.0));

    MultirateSystem lti;
    lti.state_dim = lti.input_dim = lti.output_dim = 1;
    lti.A = {ComplexMatrix::Constant(1, 1, 0.3)};
    lti.B = lti.C = lti.D = {ComplexMatrix::Constant(1, 1, 1.0)};
    CHECK(lift(lti).A(0, 0) == Complex(0.3));

    const auto ex42 = lift(testing_support::rotating_state_system());
    CHECK((ex42.N - modulation_matrix(4, 2)).norm() == 0.0);
    ComplexMatrix b42 = ComplexMatrix::Zero(8, 4);
    for (int k = 0; k < 4; ++k) b42(2 * k, k) = 1.0;
    CHECK((ex42.B - b42).norm() <= 1e-15);
    CHECK((ex42.C - b42.transpose()).norm() <= 1e-15);
}

TEST_CASE("harmonic resolvent membership") {
    const auto lifted = lift(testing_support::scalar_two_phase_system());
    CHECK(in_harmonic_resolvent(lifted, 0.0));
    CHECK_FALSE(in_harmonic_resolvent(lifted, 2.0));
    CHECK_FALSE(in_harmonic_resolvent(lifted, -2.0));
    const auto margin = resolvent_margin(lifted, 1.0);
    CHECK(margin.inside);
    CHECK(margin.sigma_min == doctest::Approx(0.5).epsilon(1e-14));

    Gen gen(42);
    for (int trial = 0; trial < 30; ++trial) {
        const auto sys = testing_support::random_system(gen, testing_support::random_shape(gen, {1, 2, 3}, 3), 1.2);
        const auto l = lift(sys);
        const Complex z = gen.annulus(0.3, 1.5);
        const double base = smallest_singular_value(l.N - z * l.A);
        const double rotated = smallest_singular_value(l.N - l.epsilon * z * l.A);
        CHECK(std::abs(rotated - base) <= 1e-8 * base);
    }
}

TEST_CASE("central transfer") {
    const auto lifted = lift(testing_support::scalar_two_phase_system());
    CHECK(central_transfer(lifted, 0.0) == lifted.D);
    // C diag(2, -2/3) B at z = 1
    const ComplexMatrix mid = (ComplexMatrix(2, 2) << 2.0, 0.0, 0.0, -2.0 / 3.0).finished();
    CHECK(relative_error(central_transfer(lifted, 1.0), lifted.C * mid * lifted.B) <= 1e-14);

    MultirateSystem feedthrough;
    feedthrough.m = 2;
    feedthrough.n = 1;
    feedthrough.input_dim = feedthrough.output_dim = 1;
    feedthrough.A = {ComplexMatrix(0, 0), ComplexMatrix(0, 0)};
    feedthrough.B = {ComplexMatrix(0, 1), ComplexMatrix(0, 1)};
    feedthrough.C = {ComplexMatrix(1, 0), ComplexMatrix(1, 0)};
    feedthrough.D = {ComplexMatrix::Constant(1, 1, 2.0), ComplexMatrix::Constant(1, 1, -1.0)};
    const auto lf = lift(feedthrough);
    CHECK(central_transfer(lf, Complex(5.0, 1.0)) == lf.D);
    CHECK(harmonic_transfer(lf, Complex(7.0, 0.0)).matrix.size() == 2);
}

TEST_CASE("harmonic_transfer examples") {
    const auto sys = testing_support::scalar_two_phase_system();
    const auto g1 = harmonic_transfer(sys, 1.0);
    const ComplexMatrix want = (4.0 / 3.0) * (ComplexMatrix(2, 2) << 4.0, 1.0, -11.0, 4.0).finished();
    CHECK(relative_error(g1.matrix, want) <= 1e-14);
    CHECK(harmonic_transfer(sys, 0.0).matrix.isZero());

    const auto g42 = harmonic_transfer(testing_support::rotating_state_system(), 0.0);
    CHECK(relative_error(g42.matrix, ComplexMatrix::Constant(2, 4, 0.5)) <= 1e-15);

    try {
        harmonic_transfer(sys, 2.0);
        FAIL("expected NotInResolvent");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotInResolvent);
        CHECK(std::string(e.what()).find("sigma_min") != std::string::npos);
        CHECK(std::string(e.what()).find("threshold") != std::string::npos);
    }
}

TEST_CASE("transfer matches the closed form of the scalar two-phase system across the disc") {
    const auto lifted = lift(testing_support::scalar_two_phase_system());
    for (const double r : {0.1, 0.7, 1.3, 1.9}) {
        for (int a = 0; a < 7; ++a) {
            const Complex z = std::polar(r, 0.4 + 0.9 * a);
            CHECK(relative_error(harmonic_transfer(lifted, z).matrix, testing_support::scalar_two_phase_closed_form(z)) <=
                  1e-12);
        }
    }
}

TEST_CASE("detect_shorter_period examples and the band test") {
    MultirateSystem lti;
    lti.state_dim = lti.input_dim = lti.output_dim = 2;
    Gen gen(43);
    lti.A = {gen.matrix(2, 2)};
    lti.B = {gen.matrix(2, 2)};
    lti.C = {gen.matrix(2, 2)};
    lti.D = {gen.matrix(2, 2)};
    const auto tiled = reperiodize(lti, 6);
    CHECK(detect_shorter_period(tiled, 6));
    CHECK(toeplitz_bands_only(lift(tiled), 6));
    CHECK_FALSE(detect_shorter_period(testing_support::scalar_two_phase_system(), 2));
    CHECK_FALSE(detect_shorter_period(testing_support::rotating_state_system(), 2));
    CHECK_THROWS_AS(detect_shorter_period(testing_support::scalar_two_phase_system(), 3), Error);

    int tiled_count = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto sys = testing_support::random_system(gen, testing_support::random_shape(gen, {1, 2, 3}, 2), 0.8);
        if (trial % 2 == 0) {
            const int k = gen.integer(2, 3);
            sys = reperiodize(sys, k);
            ++tiled_count;
        }
        const auto lifted = lift(sys);
        for (int q = 1; q <= sys.period(); ++q) {
            if (sys.period() % q != 0) continue;
            CHECK(detect_shorter_period(sys, q) == toeplitz_bands_only(lifted, q));
        }
    }
    CHECK(tiled_count == 50);
}

TEST_CASE("transfer_at_period examples") {
    const auto sys = testing_support::scalar_two_phase_system();
    CHECK(transfer_at_period(sys, 1, 0.4).matrix == harmonic_transfer(sys, 0.4).matrix);

    const auto g = harmonic_transfer(sys, 0.5);
    const auto g2 = transfer_at_period(sys, 2, 0.5);
    const ComplexMatrix lhs = g2.matrix * upsample_matrix(2, 2, 1);
    const ComplexMatrix rhs = upsample_matrix(2, 2, 1) * g.matrix;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * rhs.cwiseAbs().maxCoeff());

    MultirateSystem lti;
    lti.state_dim = lti.input_dim = lti.output_dim = 1;
    lti.A = {ComplexMatrix::Constant(1, 1, 0.5)};
    lti.B = lti.C = {ComplexMatrix::Constant(1, 1, 1.0)};
    lti.D = {ComplexMatrix::Constant(1, 1, 0.0)};
    const Complex z(0.3, 0.4);
    const auto scalar = [](Complex w) { return w / (1.0 - 0.5 * w); };
    const auto lifted2 = transfer_at_period(lti, 2, z);
    CHECK(std::abs(lifted2.matrix(0, 0) - scalar(z)) <= 1e-14);
    CHECK(std::abs(lifted2.matrix(1, 1) - scalar(-z)) <= 1e-14);
    CHECK(std::abs(lifted2.matrix(0, 1)) <= 1e-15);
    CHECK(std::abs(lifted2.matrix(1, 0)) <= 1e-15);
}

TEST_CASE("structure, reconstruction and time shift on random systems") {
    Gen gen(44);
    for (int trial = 0; trial < 30; ++trial) {
        const auto sys = testing_support::random_system(gen, testing_support::random_shape(gen, {1, 2, 3, 4}, 3), 0.8);
        const auto lifted = lift(sys);
        Complex z;
        do {
            z = gen.annulus(0.3, 1.5);
        } while (!resolvent_margin(lifted, z, 1e-4).inside);

        const auto g = harmonic_transfer(lifted, z);
        const auto g_rot = harmonic_transfer(lifted, lifted.epsilon * z);
        for (int k = 0; k < sys.m; ++k) {
            for (int l = 0; l < sys.n; ++l) {
                CHECK((g_rot.block((k + 1) % sys.m, (l + 1) % sys.n) - g.block(k, l)).norm() <= 1e-9 * g.matrix.norm());
            }
        }
        CHECK(relative_error(transfer_from_first_column(sys, z).matrix, g.matrix) <= 1e-9);

        const auto shifted = harmonic_transfer(shift_origin(sys, sys.mbar() * sys.nbar()), z).matrix;
        const ComplexMatrix want = modulation_matrix(sys.m, sys.output_dim, sys.mbar()) * g.matrix *
                                   modulation_matrix(sys.n, sys.input_dim, -sys.nbar());
        CHECK(relative_error(shifted, want) <= 1e-9);
    }
}
