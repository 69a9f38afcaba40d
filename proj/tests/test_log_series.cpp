#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nahm/log_series.hpp"
#include "support/random.hpp"

using namespace nahm;
using testing_support::max_abs;
using testing_support::Rng;
using testing_support::series_diff;

TEST_CASE("mul: matrix poles and a squared log binomial") {
    MatSeries a(-1, 4, Mat3::Zero());
    a.set(-1, 0, Mat3::Identity());
    const MatSeries sq = mul(a, a);
    CHECK(sq.kmin() == -2);
    CHECK(max_abs(sq.coeff(-2, 0) - Mat3::Identity()) == 0.0);
    CHECK(sq.terms().size() == 1);

    ScalarSeries b(0, 4, 0.0);
    b.set(0, 0, 1.0);
    b.set(1, 1, 1.0);
    const ScalarSeries b2 = mul(b, b);
    CHECK(b2.coeff(0, 0) == 1.0);
    CHECK(b2.coeff(1, 1) == 2.0);
    CHECK(b2.coeff(2, 2) == 1.0);
    CHECK(b2.terms().size() == 3);
}

TEST_CASE("mul respects the truncation order") {
    ScalarSeries a(-1, 3, 0.0), b(0, 5, 0.0);
    a.set(-1, 0, 1.0);
    b.set(5, 0, 1.0);
    // a known to x^3, b starts at x^0 -> product known to x^3; b known to x^5 times x^-1 -> x^4
    CHECK(mul(a, b).order() == 3);
    CHECK(mul(a, b).terms().empty());
}

TEST_CASE("mul is associative and distributive") {
    Rng rng;
    for (int n = 0; n < 20; ++n) {
        const MatSeries a = rng.mat_series(-1, 4, 1), b = rng.mat_series(0, 5, 2), c = rng.mat_series(-1, 4, 1);
        const MatSeries l = mul(mul(a, b), c), r = mul(a, mul(b, c));
        CHECK(l.order() == r.order());
        CHECK(series_diff(l, r, l.order()) <= 1e-13 * 100);
        const MatSeries d1 = mul(a, b + c.truncated(5)), d2 = mul(a, b) + mul(a, c);
        CHECK(series_diff(d1, d2, std::min(d1.order(), d2.order())) <= 1e-13 * 10);
    }
}

TEST_CASE("d_dx examples") {
    ScalarSeries a(0, 4, 0.0);
    a.set(1, 1, 1.0);  // x log x
    const ScalarSeries d = a.d_dx();
    CHECK(d.coeff(0, 1) == 1.0);
    CHECK(d.coeff(0, 0) == 1.0);
    CHECK(d.terms().size() == 2);

    ScalarSeries p(-1, 3, 0.0);
    p.set(-1, 0, 1.0);
    CHECK(p.d_dx().coeff(-2, 0) == -1.0);
    CHECK(p.d_dx().order() == 2);
}

TEST_CASE("d_dx Leibniz on random series") {
    Rng rng;
    for (int n = 0; n < 30; ++n) {
        const ScalarSeries a = rng.scalar_series(-1, 6, 2), b = rng.scalar_series(0, 6, 1);
        const ScalarSeries lhs = mul(a, b).d_dx();
        const ScalarSeries rhs = mul(a.d_dx(), b) + mul(a, b.d_dx());
        CHECK(series_diff(lhs, rhs, std::min(lhs.order(), rhs.order())) <= 1e-13 * 10);
    }
}

TEST_CASE("rescale examples and group law") {
    ScalarSeries x(0, 3, 0.0);
    x.set(1, 0, 1.0);
    CHECK(x.rescale(2.0).coeff(1, 0) == 2.0);

    ScalarSeries xl(0, 3, 0.0);
    xl.set(1, 1, 1.0);
    const ScalarSeries r = xl.rescale(std::numbers::e);
    CHECK(r.coeff(1, 1) == doctest::Approx(std::numbers::e).epsilon(1e-15));
    CHECK(r.coeff(1, 0) == doctest::Approx(std::numbers::e).epsilon(1e-15));

    CHECK_THROWS_AS(x.rescale(-1.0), ValidationError);

    Rng rng;
    for (int n = 0; n < 30; ++n) {
        const MatSeries a = rng.mat_series(-1, 5, 3);
        const double lam = rng.uniform(0.3, 3.0);
        CHECK(series_diff(a.rescale(lam).rescale(1.0 / lam), a, 5) <= 1e-12);
        // pointwise: rescale(a)(x) = a(lambda x)
        const double xx = rng.uniform(0.05, 0.3);
        CHECK(max_abs(a.rescale(lam).evaluate(xx) - a.evaluate(lam * xx)) <= 1e-11);
    }
}

TEST_CASE("invert gives the identity to the known order") {
    Rng rng;
    for (int n = 0; n < 30; ++n) {
        MatSeries a = rng.mat_series(0, 6, 2, 0.5);
        a.set(0, 0, Mat3::Identity() + rng.mat(0.3));
        a.set(0, 1, Mat3::Zero());
        a.set(0, 2, Mat3::Zero());
        const MatSeries ai = invert(a);
        const MatSeries p = mul(a, ai), q = mul(ai, a);
        const MatSeries one = MatSeries::constant(Mat3::Identity(), 6, Mat3::Zero());
        CHECK(p.order() == 6);
        CHECK(series_diff(p, one, 6) <= 1e-12);
        CHECK(series_diff(q, one, 6) <= 1e-12);
    }
    // poles invert to zeros
    ScalarSeries s(-1, 4, 0.0);
    s.set(-1, 0, 2.0);
    s.set(0, 0, 1.0);
    const ScalarSeries si = invert(s);
    CHECK(si.kmin() == 1);
    CHECK(si.coeff(1, 0) == 0.5);
    CHECK(si.coeff(2, 0) == -0.25);
    CHECK(series_diff(mul(s, si), ScalarSeries::constant(1.0, 4, 0.0), 4) <= 1e-15);

    ScalarSeries logs(0, 3, 0.0);
    logs.set(0, 1, 1.0);
    CHECK_THROWS_AS(invert(logs), NumericError);
}

TEST_CASE("sqrt and det series") {
    Rng rng;
    for (int n = 0; n < 20; ++n) {
        ScalarSeries a = rng.scalar_series(0, 7, 0, 0.5);
        a.set(0, 0, 1.0);
        const ScalarSeries s = sqrt_series(a);
        CHECK(series_diff(mul(s, s), a, 7) <= 1e-13);
    }
    // det of (1 + x) I is (1 + x)^3
    MatSeries m(0, 5, Mat3::Zero());
    m.set(0, 0, Mat3::Identity());
    m.set(1, 0, Mat3::Identity());
    const ScalarSeries d = det_series(m);
    CHECK(d.coeff(0) == 1.0);
    CHECK(d.coeff(1) == 3.0);
    CHECK(d.coeff(2) == 3.0);
    CHECK(d.coeff(3) == 1.0);
    CHECK(d.coeff(4) == 0.0);
    // against pointwise determinants
    for (int n = 0; n < 20; ++n) {
        MatSeries r = rng.mat_series(0, 4, 0, 0.5);
        r.set(0, 0, Mat3::Identity());
        MatSeries exact(0, 30, Mat3::Zero());
        for (const auto& [key, v] : r.terms()) exact.set(key.first, key.second, v);
        const double x = 0.2;
        CHECK(det_series(exact).evaluate(x) == doctest::Approx(exact.evaluate(x).determinant()).epsilon(1e-13));
    }
}

TEST_CASE("evaluate is compatible with mul") {
    Rng rng;
    for (int n = 0; n < 20; ++n) {
        // finite sums declared exact to a high order so the product is complete
        MatSeries a(-1, 40, Mat3::Zero()), b(-1, 40, Mat3::Zero());
        for (int k = -1; k <= 3; ++k)
            for (int l = 0; l <= 1; ++l) {
                a.set(k, l, rng.mat());
                b.set(k, l, rng.mat());
            }
        for (double x : {0.01, 0.1, 0.5}) {
            const Mat3 lhs = mul(a, b).evaluate(x), rhs = a.evaluate(x) * b.evaluate(x);
            CHECK(max_abs(lhs - rhs) <= 1e-11 * std::max(1.0, max_abs(rhs)));
        }
    }
}

TEST_CASE("evaluate rejects non-positive x") {
    ScalarSeries a(0, 2, 0.0);
    CHECK_THROWS_AS(a.evaluate(0.0), ValidationError);
}
