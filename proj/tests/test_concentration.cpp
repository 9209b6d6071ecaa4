#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sms/concentration.hpp"
#include "sms/nehari.hpp"

using namespace sms;

namespace {

SystemParams params(double eps) {
    SystemParams P;
    P.eps = eps;
    return P;
}

} // namespace

TEST_CASE("Gamma density: zero field, nonnegativity, integral identity on the Nehari set") {
    const DomainGrid g = build_ball(1.0, 32, 0.42);
    ScalarField z(g);
    REQUIRE(gamma_density(z, 0.2, 5.0).max_abs() == 0.0);

    const SystemParams P = params(0.15);
    const ScalarField w = oracle::random_field(g, 10, 1.0);
    const ScalarField gam_any = gamma_density(w, P.eps, P.p);
    REQUIRE(gam_any.min_value() >= 0.0);

    const ScalarField u = nehari_project(oracle::gaussian_blob(g, {0.5, 0.5, 0.5}, 0.1, 3.0), P);
    const ScalarField gam = gamma_density(u, P.eps, P.p);
    const double total = sum(gam.v) * g.h * g.h * g.h;
    const EnergyBreakdown e = i_eps(u, P);
    REQUIRE(total == Catch::Approx(e.total).epsilon(1e-8));
}

TEST_CASE("barycenter of a symmetric field is the center") {
    const DomainGrid g = build_cube(1.0, 32);
    const ScalarField u = oracle::gaussian_blob(g, {0.5, 0.5, 0.5}, 0.15, 1.0);
    const auto b = barycenter(u, 0.2, 5.0);
    REQUIRE(b[0] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(b[1] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(b[2] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("barycenter tracks bump centers and translations") {
    const DomainGrid g = build_ball(1.0, 48, 0.45);
    const double r = 0.15, eps = r / 10.0;
    // synthetic bump: exp(-|x-xi|/eps) profile
    const std::array<double, 3> xi = {0.5, 0.5, 0.5};
    ScalarField u(g);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.idx(i, j, k);
                if (!g.mask[c]) continue;
                const auto x = g.center(i, j, k);
                const double d = std::sqrt((x[0] - xi[0]) * (x[0] - xi[0]) +
                                           (x[1] - xi[1]) * (x[1] - xi[1]) +
                                           (x[2] - xi[2]) * (x[2] - xi[2]));
                u.v[c] = 3.0 * std::exp(-d / eps);
            }
    const auto b = barycenter(u, eps, 5.0);
    const double dist = std::sqrt((b[0] - xi[0]) * (b[0] - xi[0]) + (b[1] - xi[1]) * (b[1] - xi[1]) +
                                  (b[2] - xi[2]) * (b[2] - xi[2]));
    REQUIRE(dist <= 2.0 * eps);

    // shifting by one cell shifts beta by exactly h
    ScalarField shifted(g);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i)
                shifted.v[g.idx(i, j, k)] = u.v[g.idx(i - 1, j, k)];
    shifted.enforce_mask();
    const auto b2 = barycenter(shifted, eps, 5.0);
    REQUIRE(b2[0] - b[0] == Catch::Approx(g.h).epsilon(1e-9));
    REQUIRE(std::abs(b2[1] - b[1]) < 1e-12);

    // beta stays inside the convex hull of the support
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (u.v[g.idx(i, j, k)] != 0.0) {
                    lo = std::min(lo, g.center(i, j, k)[0]);
                    hi = std::max(hi, g.center(i, j, k)[0]);
                }
    REQUIRE(b[0] >= lo);
    REQUIRE(b[0] <= hi);
}

TEST_CASE("cell masses add up to the positive-part norm and locate the bump") {
    const DomainGrid g = build_ball(1.0, 32, 0.42);
    const double eps = 0.1;
    const Partition part = cube_partition(g, eps);
    const std::array<double, 3> xi = {0.55, 0.5, 0.45};
    const ScalarField u = oracle::gaussian_blob(g, xi, 1.5 * eps, 2.0);
    const CellMasses cm = cell_masses(u, part, eps, 5.0);
    double s = 0.0;
    for (double m : cm.mass) s += m;
    REQUIRE(s == Catch::Approx(lp_norm_eps_pow_pos(u, 5.0, eps)).epsilon(1e-12));
    // the argmax piece contains the bump center
    bool contains = false;
    for (const std::size_t c : part.pieces[cm.argmax]) {
        const int i = static_cast<int>(c % g.nx);
        const int j = static_cast<int>((c / g.nx) % g.ny);
        const int k = static_cast<int>(c / (static_cast<std::size_t>(g.nx) * g.ny));
        const auto x = g.center(i, j, k);
        if (std::abs(x[0] - xi[0]) <= 0.5 * g.h + 1e-12 && std::abs(x[1] - xi[1]) <= 0.5 * g.h + 1e-12 &&
            std::abs(x[2] - xi[2]) <= 0.5 * g.h + 1e-12)
            contains = true;
    }
    REQUIRE(contains);

    ScalarField z(g);
    const CellMasses zm = cell_masses(z, part, eps, 5.0);
    REQUIRE(zm.max_mass == 0.0);
}

TEST_CASE("boundary ratio: centered bump, eps halving, boundary hugger") {
    const DomainGrid g = build_ball(1.0, 64, 0.4);
    const double eps1 = 0.08;
    const Partition p1 = cube_partition(g, eps1);
    const ScalarField u = oracle::gaussian_blob(g, {0.5, 0.5, 0.5}, 1.2 * eps1, 2.0);
    const double ratio1 = boundary_ratio(u, p1, g, eps1, 5.0);
    REQUIRE(ratio1 == Catch::Approx(0.4 / 0.08).margin(2.5));

    const double eps2 = 0.04;
    const Partition p2 = cube_partition(g, eps2);
    const double ratio2 = boundary_ratio(u, p2, g, eps2, 5.0);
    REQUIRE(ratio2 / ratio1 == Catch::Approx(2.0).epsilon(0.2));

    // boundary-hugging field fires the diagnostic
    ScalarField hug(g);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.idx(i, j, k);
                if (!g.mask[c]) continue;
                if (g.dist(c) < 1.5 * eps1) hug.v[c] = 1.0;
            }
    REQUIRE(boundary_ratio(hug, p1, g, eps1, 5.0) < 2.0);
}

TEST_CASE("ball concentration fractions") {
    const DomainGrid g = build_cube(1.0, 32);
    const double r = 0.5, eps = 0.1;
    // support inside B(q, r/4) -> fraction 1
    const ScalarField tight = oracle::gaussian_blob(g, {0.5, 0.5, 0.5}, 0.02, 1.0);
    ScalarField clipped = tight;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const auto x = g.center(i, j, k);
                const double d = std::sqrt((x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5) +
                                           (x[2] - 0.5) * (x[2] - 0.5));
                if (d > r / 4.0) clipped.v[g.idx(i, j, k)] = 0.0;
            }
    REQUIRE(ball_concentration(clipped, {0.5, 0.5, 0.5}, r, eps, 5.0) == Catch::Approx(1.0));

    // uniform field: fraction equals the ball volume share. Small eps keeps
    // the eps^-3 bulk terms dominant over the kink the Dirichlet extension
    // puts at the box faces.
    ScalarField uni(g);
    uni.fill(1.0);
    const double eps_u = 0.012;
    const double frac = ball_concentration(uni, {0.5, 0.5, 0.5}, r, eps_u, 5.0);
    const double exact = 4.0 / 3.0 * M_PI * 0.25 * 0.25 * 0.25;
    REQUIRE(frac == Catch::Approx(exact).epsilon(0.10));
}

TEST_CASE("concentration report is internally consistent") {
    const DomainGrid g = build_ball(1.0, 32, 0.42);
    SystemParams P = params(0.1);
    const Partition part = cube_partition(g, P.eps);
    const ScalarField u = nehari_project(oracle::gaussian_blob(g, {0.5, 0.5, 0.5}, 1.5 * P.eps, 3.0), P);
    const ConcentrationReport rep = concentration_report(u, part, 0.14, P);
    REQUIRE(rep.in_omega_plus);
    REQUIRE(rep.ball_fraction >= 0.0);
    REQUIRE(rep.ball_fraction <= 1.0);
    REQUIRE(rep.gamma_mass_max <= lp_norm_eps_pow_pos(u, P.p, P.eps) + 1e-12);
    REQUIRE(rep.gamma_mass_max > 0.0);
}
