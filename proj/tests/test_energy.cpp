#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sms/energy.hpp"

using namespace sms;

namespace {

SystemParams params(double eps = 0.3, double omega = 1.0, double q = 1.0, double p = 5.0) {
    SystemParams P;
    P.eps = eps;
    P.omega = omega;
    P.q = q;
    P.p = p;
    return P;
}

double naive_i_eps(const ScalarField& u, const SystemParams& P) {
    const double a = oracle::naive_norm_eps_sq(u, P.eps);
    const double c = oracle::naive_lp_pow(u, P.p, P.eps, true);
    double G = 0.0;
    if (P.omega != 0.0) {
        const ScalarField psi = solve_potential(u, P);
        ScalarField u2(*u.grid);
        for (std::size_t i = 0; i < u2.size(); ++i) u2.v[i] = u.v[i] * u.v[i];
        G = oracle::naive_l2_pairing(u2, psi) / (P.eps * P.eps * P.eps);
    }
    return 0.5 * a + 0.25 * P.omega * G - c / P.p;
}

} // namespace

TEST_CASE("energy of the zero field vanishes") {
    const DomainGrid g = build_cube(1.0, 16);
    ScalarField z(g);
    const EnergyBreakdown e = i_eps(z, params());
    REQUIRE(e.total == 0.0);
    REQUIRE(e.quad == 0.0);
    REQUIRE(e.nehari_residual == 0.0);
}

TEST_CASE("negative fields carry no potential term") {
    const DomainGrid g = build_cube(1.0, 16);
    ScalarField u = oracle::random_field(g, 4);
    for (auto& x : u.v) x = -std::abs(x);
    u.enforce_mask();
    const EnergyBreakdown e = i_eps(u, params());
    REQUIRE(e.pot == 0.0);
    REQUIRE(e.total == Catch::Approx(e.quad + e.coul));
    REQUIRE(e.total > 0.0);
}

TEST_CASE("energy breakdown matches the straight-loop oracle") {
    const DomainGrid g = build_ball(1.0, 24, 0.4);
    const ScalarField u = oracle::random_field(g, 21);
    const SystemParams P = params(0.25);
    const EnergyBreakdown e = i_eps(u, P);
    REQUIRE(e.total == Catch::Approx(naive_i_eps(u, P)).epsilon(1e-10));
    REQUIRE(e.total == Catch::Approx(e.quad + e.coul - e.pot).epsilon(1e-13));
}

TEST_CASE("G_eps is nonnegative and quartically homogeneous") {
    const DomainGrid g = build_ball(1.0, 24, 0.4);
    const ScalarField u = oracle::gaussian_blob(g, {0.5, 0.5, 0.55}, 0.12, 2.0);
    const double g1 = g_eps(u, 0.3, 1.0);
    REQUIRE(g1 >= 0.0);
    ScalarField u3 = u;
    u3.scale(3.0);
    const double g3 = g_eps(u3, 0.3, 1.0);
    REQUIRE(g3 == Catch::Approx(81.0 * g1).epsilon(1e-9));
}

TEST_CASE("assembled gradient matches central finite differences of the energy") {
    const DomainGrid g = build_cube(1.0, 20);
    const SystemParams P = params(0.4, 1.0, 1.0, 5.0);
    ScalarField u = oracle::gaussian_blob(g, {0.5, 0.5, 0.5}, 0.2, 1.5);
    // a sign-mixing perturbation keeps the (u^+)^{p-1} branch honest
    const ScalarField noise = oracle::random_field(g, 31, 0.1);
    lin_comb(u, 1.0, u, 1.0, noise);
    const ScalarField grad = grad_i_eps(u, P);

    const double t = 1e-5;
    for (std::uint64_t s = 0; s < 3; ++s) {
        const ScalarField phi = oracle::random_field(g, 400 + s);
        ScalarField up(g), um(g);
        lin_comb(up, 1.0, u, t, phi);
        lin_comb(um, 1.0, u, -t, phi);
        const double fd = (i_eps(up, P).total - i_eps(um, P).total) / (2.0 * t);
        const double pairing = l2_pairing(grad, phi);
        REQUIRE(fd == Catch::Approx(pairing).epsilon(1e-6));
    }
}

TEST_CASE("derivative of T(u) = int u^2 psi(u) carries the factor 4") {
    const DomainGrid g = build_cube(1.0, 20);
    const double eps = 0.4, q = 1.0;
    const ScalarField u = oracle::gaussian_blob(g, {0.5, 0.5, 0.5}, 0.18, 1.2);
    const ScalarField phi = oracle::random_field(g, 17);

    auto T = [&](const ScalarField& w) {
        const ScalarField psi = solve_psi_eps(w, eps, q);
        ScalarField w2(g);
        for (std::size_t c = 0; c < g.ncells(); ++c) w2.v[c] = w.v[c] * w.v[c];
        return l2_pairing(w2, psi);
    };
    const double t = 1e-5;
    ScalarField up(g), um(g);
    lin_comb(up, 1.0, u, t, phi);
    lin_comb(um, 1.0, u, -t, phi);
    const double fd = (T(up) - T(um)) / (2.0 * t);

    const ScalarField psi = solve_psi_eps(u, eps, q);
    ScalarField integrand(g);
    for (std::size_t c = 0; c < g.ncells(); ++c) integrand.v[c] = u.v[c] * psi.v[c];
    const double claimed = 4.0 * l2_pairing(integrand, phi);
    REQUIRE(fd == Catch::Approx(claimed).epsilon(1e-6));
}

TEST_CASE("assembled gradient equals the weak form") {
    const DomainGrid g = build_ball(1.0, 24, 0.42);
    const SystemParams P = params(0.3);
    const ScalarField u = oracle::random_field(g, 8);
    const ScalarField phi = oracle::random_field(g, 9);
    const ScalarField psi = solve_potential(u, P);
    const ScalarField grad = grad_i_eps_with_psi(u, psi, P);
    const double assembled = l2_pairing(grad, phi);

    // weak form: eps^-3 int ( eps^2 grad u . grad phi + u phi + omega u psi phi - (u^+)^{p-1} phi )
    const double inv_eps3 = 1.0 / (P.eps * P.eps * P.eps);
    double weak = inner_eps(u, phi, P.eps);
    double nl = 0.0;
    for (std::size_t c = 0; c < g.ncells(); ++c) {
        const double up = u.v[c] > 0.0 ? std::pow(u.v[c], P.p - 1.0) : 0.0;
        nl += (P.omega * u.v[c] * psi.v[c] - up) * phi.v[c];
    }
    weak += inv_eps3 * nl * g.h * g.h * g.h;
    REQUIRE(assembled == Catch::Approx(weak).epsilon(1e-10));
}

TEST_CASE("p outside (4,6) is rejected") {
    const DomainGrid g = build_cube(1.0, 12);
    const ScalarField u = oracle::random_field(g, 2);
    SystemParams P = params();
    P.p = 4.0;
    REQUIRE_THROWS(i_eps(u, P));
    P.p = 6.5;
    REQUIRE_THROWS(i_eps(u, P));
}
