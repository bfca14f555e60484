#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "wavecrit/field.hpp"

using namespace wavecrit;
using testsupport::close;

namespace {

ModeList random_list(testsupport::Rng& rng, int n) {
    ModeList list;
    for (int i = 0; i < n; ++i) {
        ModeTerm t;
        t.amp = {rng.cuniform(1), rng.cuniform(1), rng.cuniform(1)};
        t.l = 0.25 * std::round(rng.uniform(-8, 8));
        t.alpha = rng.uniform(-1, 1);
        t.mu = {rng.uniform(0.05, 3.0), rng.uniform(-2, 2)};
        list.add(t);
    }
    return list;
}

Grid small_grid() {
    Grid g;
    g.x = periodic_axis(8.0 * std::numbers::pi, 32);
    g.y = stretched_axis(6.0, 0.02, 1.2, 0.5);
    return g;
}

}  // namespace

TEST_CASE("field: theta jet values and derivatives") {
    CHECK(theta_jet(0.5) == std::array<double, 4>{1, 0, 0, 0});
    CHECK(theta_jet(2.5) == std::array<double, 4>{0, 0, 0, 0});
    const auto mid = theta_jet(1.5);
    CHECK(close(mid[0], 0.5, 1e-14));
    for (double s : {1.1, 1.3, 1.5, 1.8, 1.95}) {
        const double h = 1e-5;
        const auto p = theta_jet(s + h), m = theta_jet(s - h), c = theta_jet(s);
        for (int d = 0; d < 3; ++d) CHECK(close(c[d + 1], (p[d] - m[d]) / (2 * h), 1e-5, 1e-8));
        CHECK(c[0] >= 0.0);
        CHECK(c[0] <= 1.0);
        CHECK(c[1] <= 0.0);
    }
    for (double s = 1.0; s <= 2.0; s += 1e-4)
        for (double v : theta_jet(s)) CHECK_MESSAGE(std::isfinite(v), "s = " << s);
}

TEST_CASE("field: axes") {
    const auto px = periodic_axis(10.0, 5);
    CHECK(px.periodic);
    CHECK(px.pts.front() == -5.0);
    CHECK(close(px.pts[1], -3.0, 1e-15));
    for (double w : px.weights) CHECK(w == 2.0);
    const auto ua = uniform_axis(2.0, 5);
    double sum = 0.0;
    for (double w : ua.weights) sum += w;
    CHECK(close(sum, 2.0, 1e-15));
    CHECK(ua.pts.back() == 2.0);
    const auto sa = stretched_axis(5.0, 0.01, 1.1, 0.3);
    CHECK(sa.pts.front() == 0.0);
    CHECK(close(sa.pts.back(), 5.0, 1e-12));
    double wsum = 0.0;
    for (std::size_t i = 1; i < sa.size(); ++i) {
        const double dy = sa.pts[i] - sa.pts[i - 1];
        CHECK(dy > 0.0);
        CHECK(dy <= 0.3 + 1e-12);
    }
    for (double w : sa.weights) wsum += w;
    CHECK(close(wsum, 5.0, 1e-12));
}

TEST_CASE("field: mode list merges wavenumbers") {
    ModeList list;
    list.add({{1.0, 0.0, 0.0}, 0.5, 0.1, 1.0, 0});
    list.add({{1.0, 0.0, 0.0}, 0.5 + 1e-15, 0.2, 2.0, 0});
    list.add({{1.0, 0.0, 0.0}, -0.5, 0.2, 3.0, 0});
    CHECK(list.lvals.size() == 2);
    CHECK(list.terms[1].lkey == list.terms[0].lkey);
    CHECK(list.max_abs_l() == doctest::Approx(0.5));
    CHECK(list.min_decay() == 1.0);
    CHECK(list.max_decay() == 3.0);
}

TEST_CASE("field: parallel grid evaluation equals the serial reference") {
    testsupport::Rng rng(31);
    const auto list = random_list(rng, 40);
    const auto g = small_grid();
    for (Deriv d : {Deriv{0, 0}, Deriv{1, 0}, Deriv{0, 1}, Deriv{1, 2}}) {
        const auto par = evaluate_field({&list}, 0.7, g, d);
        const auto ser = evaluate_field_serial({&list}, 0.7, g, d);
        double scale = 0.0, diff = 0.0;
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < par.comp[c].size(); ++i) {
                scale = std::max(scale, std::abs(ser.comp[c][i]));
                diff = std::max(diff, std::abs(par.comp[c][i] - ser.comp[c][i]));
            }
        CHECK(diff <= 1e-12 * scale);
    }
}

TEST_CASE("field: row evaluator matches point evaluation") {
    testsupport::Rng rng(32);
    const auto list = random_list(rng, 15);
    const auto g = small_grid();
    RowEvaluator ev(list, g.x, 1.3);
    std::array<std::vector<double>, 3> row;
    for (double y : {0.0, 0.4, 2.0}) {
        ev.row(y, {0, 1}, row);
        for (std::size_t i = 0; i < g.x.size(); i += 5) {
            const auto p = evaluate_point(list, 1.3, g.x.pts[i], y, {0, 1});
            for (int c = 0; c < 3; ++c) CHECK(close(row[c][i], p[c], 1e-11, 1e-12));
        }
    }
}

TEST_CASE("field: analytic derivatives match finite differences") {
    testsupport::Rng rng(33);
    const auto list = random_list(rng, 6);
    const double t = 0.4, x = 0.9, y = 0.7, h = 1e-5;
    const auto dx = evaluate_point(list, t, x, y, {1, 0});
    const auto dy = evaluate_point(list, t, x, y, {0, 1});
    const auto xp = evaluate_point(list, t, x + h, y), xm = evaluate_point(list, t, x - h, y);
    const auto yp = evaluate_point(list, t, x, y + h), ym = evaluate_point(list, t, x, y - h);
    for (int c = 0; c < 3; ++c) {
        CHECK(close(dx[c], (xp[c] - xm[c]) / (2 * h), 1e-6, 1e-8));
        CHECK(close(dy[c], (yp[c] - ym[c]) / (2 * h), 1e-6, 1e-8));
    }
}

TEST_CASE("field: mean-flow profile follows the cutoff") {
    ModeList mf;
    mf.profile = Profile::MeanFlow;
    mf.profile_scale = 0.5;
    mf.add({{cplx(0.3, 0.1), cplx(1.0, 0.0), 0.0}, 0.0, 0.0, 0.0, 0});
    const auto at = [&](double y) { return evaluate_point(mf, 0.0, 0.0, y); };
    CHECK(close(at(1.0)[1], 2.0, 1e-14));
    CHECK(at(5.0)[1] == 0.0);
    const double y = 3.0;
    const auto th = theta_jet(0.5 * y);
    CHECK(close(at(y)[0], 2.0 * 0.3 * th[1], 1e-14));
    CHECK(at(y)[2] == 0.0);
}

TEST_CASE("field: streamed norms equal norms of the stored field") {
    testsupport::Rng rng(34);
    const auto list = random_list(rng, 20);
    const auto g = small_grid();
    const auto f = evaluate_field({&list}, 0.2, g);
    const auto a = field_norms(f);
    const auto b = stream_norms({&list}, 0.2, g);
    CHECK(close(a.l2, b.l2, 1e-12));
    CHECK(close(a.linf, b.linf, 1e-14));
    for (int c = 0; c < 3; ++c) CHECK(close(a.comp_l2[c], b.comp_l2[c], 1e-12));
    // Trapezoid oracle for the L2 norm.
    double acc = 0.0;
    for (std::size_t iy = 0; iy < g.y.size(); ++iy)
        for (std::size_t ix = 0; ix < g.x.size(); ++ix)
            for (int c = 0; c < 3; ++c) acc += g.y.weights[iy] * g.x.weights[ix] * std::pow(f.at(c, iy, ix), 2);
    CHECK(close(a.l2, std::sqrt(acc), 1e-12));
}
