#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "wavecrit/packet.hpp"

using namespace wavecrit;
using testsupport::close;

namespace {

W0Assembly small_packet(double k0 = 1.0, double eps = 0.3, int n = 5) {
    PhysParams p{0.65, 1.0, 1.0, eps, 0.0};
    Envelope env{critical_carrier(0.65, k0, Branch::Plus), eps};
    return assemble_W0(p, env, {n, n});
}

}  // namespace

TEST_CASE("packet: bump function") {
    CHECK(chi(0.0) == 1.0);
    CHECK(chi(1.0) == 0.0);
    CHECK(chi(-1.5) == 0.0);
    CHECK(close(chi(0.5), std::exp(1.0 - 1.0 / 0.75), 1e-15));
    CHECK(chi(0.3) == chi(-0.3));
}

TEST_CASE("packet: envelope is even and supported on two lobes") {
    const Envelope env{critical_carrier(0.65, 1.0, Branch::Plus), 0.2};
    const double k0 = env.carrier.k0, m0 = env.carrier.m0;
    CHECK(close(env.amplitude(k0, m0), 1.0 / 0.04, 1e-14));
    CHECK(env.amplitude(-k0, -m0) == env.amplitude(k0, m0));
    CHECK(env.amplitude(k0 + 0.05, m0) == 0.0);
    CHECK(env.amplitude(0.0, 0.0) == 0.0);
}

TEST_CASE("packet: trapezoid nodes") {
    const auto s = trapezoid_nodes(3);
    REQUIRE(s.size() == 3);
    CHECK(close(s[0], -0.5, 1e-15));
    CHECK(s[1] == 0.0);
    CHECK(close(s[2], 0.5, 1e-15));
    CHECK_THROWS_AS(trapezoid_nodes(0), DomainError);
}

TEST_CASE("packet: node layout and critical lifts") {
    const auto a = small_packet();
    CHECK(a.nodes.size() == 25);
    CHECK(a.incident.terms.size() == 25);
    CHECK(a.bl_eps2.terms.size() == 50);
    CHECK(a.bl_eps3.terms.size() == 25);
    CHECK(close(a.period_x(), 2 * std::numbers::pi / a.dk, 1e-15));
    for (const auto& n : a.nodes) {
        CHECK(close(n.omega, dispersion_omega(n.k, n.m, 0.65, Branch::Plus), 1e-15));
        // Incident wave divergence: i k u + i m w.
        CHECK(std::abs(I * n.k * n.polarization[0] + I * n.m * n.polarization[1]) < 1e-14);
    }
}

TEST_CASE("packet: the summed W0 satisfies the wall conditions") {
    const auto a = small_packet();
    Grid g;
    g.x = periodic_axis(a.period_x(), 128);
    g.y.pts = {0.0};
    g.y.weights = {1.0};
    const auto inc = evaluate_field({&a.incident}, 0.3, g);
    const auto sum = evaluate_field(family_lists(a, Family::Sum), 0.3, g);
    const auto sum_dy = evaluate_field(family_lists(a, Family::Sum), 0.3, g, {0, 1});
    double scale = 0.0, resid = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        scale = std::max({scale, std::abs(inc.comp[0][i]), std::abs(inc.comp[1][i])});
        resid = std::max({resid, std::abs(sum.comp[0][i]), std::abs(sum.comp[1][i]), std::abs(sum_dy.comp[2][i])});
    }
    CHECK(scale > 0.0);
    CHECK(resid <= 1e-9 * scale);
}

TEST_CASE("packet: discrete packet is periodic in x") {
    // Node wavenumbers k0 - eps^2 + i dk are multiples of dk = 0.03 for k0 = 0.99.
    const auto a = small_packet(0.99);
    const double L = a.period_x();
    for (double x : {0.0, 3.0, -11.0}) {
        const auto p = evaluate_point(a.incident, 0.2, x, 1.0);
        const auto q = evaluate_point(a.incident, 0.2, x + L, 1.0);
        for (int c = 0; c < 3; ++c) CHECK(close(p[c], q[c], 1e-8, 1e-10));
    }
}

TEST_CASE("packet: incident field is divergence free pointwise") {
    const auto a = small_packet();
    for (double y : {0.0, 2.0, 7.0}) {
        const auto ux = evaluate_point(a.incident, 0.1, 1.5, y, {1, 0});
        const auto wy = evaluate_point(a.incident, 0.1, 1.5, y, {0, 1});
        const auto u = evaluate_point(a.incident, 0.1, 1.5, y);
        CHECK(std::abs(ux[0] + wy[1]) <= 1e-12 * (1.0 + std::abs(u[0])));
    }
}

TEST_CASE("packet: streamed and stored norms agree, anisotropy is below one") {
    const auto a = small_packet();
    const auto g = default_grid(a, Family::BLeps2);
    const auto stored = packet_norms(evaluate_packet(a, Family::BLeps2, 0.0, g));
    const auto streamed = packet_norms(a, Family::BLeps2, 0.0, g);
    CHECK(close(stored.l2, streamed.l2, 1e-12));
    CHECK(close(stored.linf, streamed.linf, 1e-14));
    const auto an = component_anisotropy(a, Family::BLeps3);
    CHECK(an.ratio_l2 < 1.0);
    CHECK_THROWS_AS(family_lists(a, Family::MeanFlow), DomainError);
}

TEST_CASE("packet: invalid parameters are rejected") {
    PhysParams p{0.65, 1.0, 1.0, 0.3, 0.0};
    p.nu0 = -1.0;
    Envelope env{critical_carrier(0.65, 1.0, Branch::Plus), 0.3};
    CHECK_THROWS_AS(assemble_W0(p, env, {5, 5}), DomainError);
    p.nu0 = 1.0;
    CHECK_THROWS_AS(assemble_W0(p, env, {0, 5}), DomainError);
}
