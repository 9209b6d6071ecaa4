#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sms/nehari.hpp"

using namespace sms;

namespace {

SystemParams params(double eps = 0.3) {
    SystemParams P;
    P.eps = eps;
    return P;
}

} // namespace

TEST_CASE("nehari scale: closed-form cases against the bisection oracle") {
    // omega=0, a=c=1, p=5: t^3 = 1
    REQUIRE(nehari_scale_from_scalars(1.0, 0.0, 1.0, 5.0) == Catch::Approx(1.0).epsilon(1e-12));
    // a=1, b=1, c=3, p=5: root of 1 + t^2 - 3 t^3
    const double t = nehari_scale_from_scalars(1.0, 1.0, 3.0, 5.0);
    REQUIRE(t == Catch::Approx(oracle::bisect_nehari_scale(1.0, 1.0, 3.0, 5.0)).epsilon(1e-11));
    REQUIRE(t == Catch::Approx(0.8241).margin(5e-4));
    // general p
    const double t2 = nehari_scale_from_scalars(2.0, 0.7, 1.1, 4.6);
    REQUIRE(t2 == Catch::Approx(oracle::bisect_nehari_scale(2.0, 0.7, 1.1, 4.6)).epsilon(1e-11));
}

TEST_CASE("projection homogeneity: t(lambda w) lambda = t(w)") {
    const DomainGrid g = build_ball(1.0, 24, 0.4);
    const SystemParams P = params();
    const ScalarField w = oracle::gaussian_blob(g, {0.5, 0.5, 0.52}, 0.1, 2.0);
    const double t0 = nehari_scale(w, P);
    for (double lambda : {0.5, 2.0, 10.0}) {
        ScalarField wl = w;
        wl.scale(lambda);
        const double tl = nehari_scale(wl, P);
        REQUIRE(tl * lambda == Catch::Approx(t0).epsilon(1e-12));
    }
}

TEST_CASE("projected point sits on the Nehari set; projection is idempotent") {
    const DomainGrid g = build_ball(1.0, 24, 0.4);
    const SystemParams P = params();
    const ScalarField w = oracle::gaussian_blob(g, {0.5, 0.5, 0.5}, 0.11, 1.7);
    const ScalarField u = nehari_project(w, P);
    const EnergyBreakdown e = i_eps(u, P);
    REQUIRE(std::abs(e.nehari_residual) <= 1e-10 * (2.0 * e.quad));
    REQUIRE(nehari_scale(u, P) == Catch::Approx(1.0).epsilon(1e-10));
    ScalarField two = u;
    two.scale(2.0);
    REQUIRE(nehari_scale(two, P) == Catch::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("projection rejects nonpositive initializers") {
    const DomainGrid g = build_cube(1.0, 12);
    ScalarField w(g);
    w.fill(-1.0);
    REQUIRE_THROWS(nehari_scale(w, params()));
    DescendConfig cfg;
    REQUIRE_THROWS(descend(w, params(), cfg));
}

TEST_CASE("descent: monotone energies, Nehari residual, positivity") {
    const DomainGrid g = build_ball(1.0, 32, 0.42);
    const SystemParams P = params(0.12);
    const ScalarField w = oracle::gaussian_blob(g, {0.5, 0.5, 0.5}, 2.0 * P.eps, 4.0);
    DescendConfig cfg;
    cfg.max_iter = 400;
    cfg.tol_g_rel = 1e-5;
    cfg.record_history = true;
    const CriticalPoint cp = descend(w, P, cfg, "test-blob");
    INFO("status " << to_string(cp.status) << " iters " << cp.iterations);
    REQUIRE(cp.converged());
    for (std::size_t i = 1; i < cp.history.size(); ++i) REQUIRE(cp.history[i] <= cp.history[i - 1] + 1e-14);
    REQUIRE(cp.residual_ok());
    REQUIRE(cp.positivity_ok());
    REQUIRE(cp.norm_lower_bound_ok());
    // the projected initial point dominates the final energy
    const EnergyBreakdown e0 = i_eps(nehari_project(w, P), P);
    REQUIRE(cp.energy.total <= e0.total + 1e-12);
}

TEST_CASE("descent from a converged point returns immediately") {
    const DomainGrid g = build_ball(1.0, 24, 0.4);
    const SystemParams P = params(0.15);
    const ScalarField w = oracle::gaussian_blob(g, {0.5, 0.5, 0.5}, 2.0 * P.eps, 4.0);
    DescendConfig cfg;
    cfg.max_iter = 300;
    cfg.tol_g_rel = 1e-5;
    const CriticalPoint first = descend(w, P, cfg, "stage1");
    REQUIRE(first.converged());
    const CriticalPoint second = descend(first.u, P, cfg, "stage2");
    REQUIRE(second.iterations <= 2);
    REQUIRE(second.energy.total == Catch::Approx(first.energy.total).epsilon(1e-10));
}

TEST_CASE("Nehari identity triple holds at projected points") {
    const DomainGrid g = build_ball(1.0, 24, 0.4);
    const SystemParams P = params(0.2);
    const ScalarField u = nehari_project(oracle::gaussian_blob(g, {0.5, 0.5, 0.5}, 0.1, 2.5), P);
    const EnergyBreakdown e = i_eps(u, P);
    const double a = 2.0 * e.quad;
    const double G = e.g_eps;
    const double cpow = e.pot * P.p;
    const double i1 = (0.5 - 1.0 / P.p) * a + P.omega * (0.25 - 1.0 / P.p) * G;
    const double i2 = (0.5 - 1.0 / P.p) * cpow - 0.25 * P.omega * G;
    const double i3 = 0.25 * a + (0.25 - 1.0 / P.p) * cpow;
    REQUIRE(i1 == Catch::Approx(e.total).epsilon(1e-7));
    REQUIRE(i2 == Catch::Approx(e.total).epsilon(1e-7));
    REQUIRE(i3 == Catch::Approx(e.total).epsilon(1e-7));
}
