#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "veblen/model.hpp"

using veblen::ModelParams;
using veblen::State;

namespace {

const ModelParams fig7{0.9, 10.0, 2.6, 0.75, 1.5, 1.0, 1.0, 0.1, 0.0};

ModelParams random_params(oracles::Rng& rng, double tau_hi = 0.0) {
    ModelParams p{};
    p.alpha = rng.uniform(0.05, 0.95);
    p.beta = rng.uniform(0.1, 50.0);
    p.rho = rng.uniform(0.0, 5.0);
    p.sigma = rng.uniform(0.1, 3.0);
    p.gamma = rng.uniform(0.1, 3.0);
    p.w = rng.uniform(0.2, 3.0);
    p.c_ref = rng.uniform(0.0, 3.0);
    p.v = rng.uniform(0.0, 1.5);
    p.tau = tau_hi > 0.0 ? rng.uniform(0.0, tau_hi) : 0.0;
    return p;
}

}  // namespace

TEST_CASE("params validate") {
    ModelParams p = fig7;
    REQUIRE_NOTHROW(p.validate());
    p.alpha = 1.5;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
    p = fig7;
    p.beta = 0.0;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
    p = fig7;
    p.sigma = -1.0;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
    p = fig7;
    p.tau = -0.1;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("broken windows probability") {
    ModelParams p = fig7;

    SECTION("logistic midpoint at e = rho/beta") {
        for (double beta : {0.5, 2.0, 10.0, 300.0}) {
            p.beta = beta;
            p.rho = 1.3;
            REQUIRE(veblen::broken_windows_prob(p.rho / beta, p) == Catch::Approx(0.5).margin(1e-15));
        }
        p.beta = 10.0;
        p.rho = 2.6;
        REQUIRE(veblen::broken_windows_prob(0.26, p) == Catch::Approx(0.5).margin(1e-15));
    }

    SECTION("saturation limits stay finite") {
        p.beta = 10.0;
        REQUIRE(veblen::broken_windows_prob(1e9, p) == 1.0);
        REQUIRE(veblen::broken_windows_prob(-1e9, p) == 0.0);
        REQUIRE(std::isfinite(veblen::broken_windows_prob(1e308, p)));
    }

    SECTION("strictly increasing in e, decreasing in rho") {
        double prev = -1.0;
        for (int i = 0; i <= 200; ++i) {
            const double e = -3.0 + 6.0 * i / 200.0;
            const double q = veblen::broken_windows_prob(e, p);
            REQUIRE(q > prev);
            prev = q;
        }
        prev = 2.0;
        for (int i = 0; i <= 100; ++i) {
            p.rho = 0.05 * i;
            const double q = veblen::broken_windows_prob(0.2, p);
            REQUIRE(q < prev);
            prev = q;
        }
    }
}

TEST_CASE("household choice closed form") {
    SECTION("hand-evaluated point, cross-checked by grid search") {
        const ModelParams p{0.5, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0};  // v = 0
        const State s{0.0, 1.0};
        const auto h = veblen::household_choice(s, p);
        REQUIRE(h.c == Catch::Approx(0.25).margin(1e-15));
        REQUIRE(h.m == Catch::Approx(0.75).margin(1e-15));
        const auto gs = oracles::grid_search_consumption(s, p, 200000);
        REQUIRE(std::abs(gs.c - h.c) <= gs.cell_width);
    }

    SECTION("pi = 0 kills the Veblen and preference terms") {
        const ModelParams p{0.5, 1.0, 0.0, 0.75, 1.5, 1.0, 2.0, 0.3, 0.0};
        const State s{0.4, 0.0};
        const auto h = veblen::household_choice(s, p);
        REQUIRE(h.c == Catch::Approx((p.sigma * p.w + s.e) / (p.gamma + p.sigma)).margin(1e-15));
        REQUIRE(h.m == Catch::Approx((p.gamma * p.w - s.e) / (p.gamma + p.sigma)).margin(1e-15));
        REQUIRE(h.overconsumption == 0.0);
    }

    SECTION("budget identity at tau = 0") {
        oracles::Rng rng(11);
        for (int i = 0; i < 5000; ++i) {
            const ModelParams p = random_params(rng);
            const State s{rng.uniform(-3.0, 3.0), rng.uniform(-0.5, 1.5)};
            const auto h = veblen::household_choice(s, p);
            REQUIRE(std::abs(h.c + h.m - p.w) <= 1e-12 * std::max(1.0, p.w));
            REQUIRE(h.c_eff == Catch::Approx(h.c - p.v * p.c_ref).margin(1e-15));
        }
    }

    SECTION("tau > 0: the conservation rule over-spends by exactly the taxed Veblen share") {
        // The pair keeps the e-transition tax-free, at the price of
        // (1+tau)c + m = w + (pi/(1+pi))*tau*v*c_ref instead of = w.
        oracles::Rng rng(12);
        for (int i = 0; i < 5000; ++i) {
            const ModelParams p = random_params(rng, 10.0);
            const State s{rng.uniform(-3.0, 3.0), rng.uniform(-0.5, 1.5)};
            const auto h = veblen::household_choice(s, p);
            const double share = s.pi / (1.0 + s.pi);
            const double expected_gap = share * p.tau * p.v * p.c_ref;
            REQUIRE(std::abs((1.0 + p.tau) * h.c + h.m - p.w - expected_gap) <= 1e-11);
        }
    }

    SECTION("pi at the pole is rejected") {
        REQUIRE_THROWS_AS(veblen::household_choice({0.0, -1.0}, fig7), std::domain_error);
        REQUIRE_THROWS_AS(veblen::household_choice({0.0, -1.5}, fig7), std::domain_error);
    }
}

TEST_CASE("utility") {
    const ModelParams p{0.5, 1.0, 0.0, 0.75, 1.5, 1.0, 2.0, 0.3, 0.0};

    SECTION("zero when both logs hit 1") {
        REQUIRE(veblen::utility(p.v * p.c_ref + 1.0, 1.0, 0.7, p) == Catch::Approx(0.0).margin(1e-15));
    }

    SECTION("pi = 0 ignores e_next") {
        const double u1 = veblen::utility(0.9, 0.5, 0.0, p);
        const double u2 = veblen::utility(0.9, 7.0, 0.0, p);
        REQUIRE(u1 == u2);
    }

    SECTION("domain errors outside the interior region") {
        REQUIRE_THROWS_AS(veblen::utility(p.v * p.c_ref, 1.0, 0.5, p), std::domain_error);
        REQUIRE_THROWS_AS(veblen::utility(1.0, 0.0, 0.5, p), std::domain_error);
        REQUIRE_THROWS_AS(veblen::utility(1.0, -0.2, 0.5, p), std::domain_error);
    }

    SECTION("FOC consumption maximises utility on the budget line") {
        oracles::Rng rng(13);
        int accepted = 0;
        while (accepted < 25) {
            ModelParams p2 = random_params(rng, 1.0);
            const State s{rng.uniform(-0.5 * p2.sigma * p2.w, 1.5), rng.uniform(0.0, 1.5)};
            const auto h = veblen::household_choice(s, p2);
            const double e_next = s.e - p2.gamma * h.c + p2.sigma * (p2.w - (1.0 + p2.tau) * h.c);
            if (!(h.c_eff > 1e-6) || !(e_next > 1e-6)) continue;
            ++accepted;
            const auto gs = oracles::grid_search_consumption(s, p2, 40000);
            REQUIRE(std::abs(gs.c - h.c) <= gs.cell_width);
        }
    }
}

TEST_CASE("step map") {
    SECTION("pi = 0 sends e to zero") {
        const State next = veblen::step_map({3.7, 0.0}, fig7);
        REQUIRE(next.e == 0.0);
        REQUIRE(next.pi ==
                Catch::Approx((1.0 - fig7.alpha) * veblen::broken_windows_prob(3.7, fig7)).margin(1e-15));
    }

    SECTION("hand-evaluated point") {
        REQUIRE(fig7.net_env_gain() == Catch::Approx(0.525).margin(1e-15));
        const State next = veblen::step_map({1.0, 1.0}, fig7);
        REQUIRE(next.e == Catch::Approx(0.7625).margin(1e-15));
    }

    SECTION("vanishing bracket") {
        const State next = veblen::step_map({-fig7.net_env_gain(), 0.63}, fig7);
        REQUIRE(next.e == 0.0);
    }

    SECTION("pi interval is preserved") {
        oracles::Rng rng(14);
        for (int i = 0; i < 5000; ++i) {
            const ModelParams p = random_params(rng);
            const State s{rng.uniform(-10.0, 10.0), rng.uniform(0.0, 1.0)};
            const State n = veblen::step_map(s, p);
            REQUIRE(n.pi >= 0.0);
            REQUIRE(n.pi <= 1.0);
        }
    }

    SECTION("e-contraction given pi") {
        oracles::Rng rng(15);
        for (int i = 0; i < 500; ++i) {
            const ModelParams p = random_params(rng);
            const State s{rng.uniform(-2.0, 2.0), rng.uniform(0.0, 1.0)};
            const auto fd = oracles::finite_difference_jacobian(s, p);
            REQUIRE(std::abs(fd.de_de) < 0.5 + 1e-9);
            REQUIRE(std::abs(fd.de_de - s.pi / (1.0 + s.pi)) <= 1e-9);
        }
    }

    SECTION("pi at the pole is rejected") {
        REQUIRE_THROWS_AS(veblen::step_map({0.0, -1.0}, fig7), std::domain_error);
    }
}

TEST_CASE("FOC substitution reproduces the closed-form map") {
    SECTION("tau = 0 pointwise") {
        const State s{0.4, 0.6};
        const State a = veblen::step_map(s, fig7);
        const State b = veblen::step_map_via_foc(s, fig7);
        REQUIRE(std::abs(a.e - b.e) <= 1e-14);
        REQUIRE(a.pi == b.pi);
    }

    SECTION("tau = 0.3 and tau = 10 pointwise") {
        for (double tau : {0.3, 10.0}) {
            ModelParams p = fig7;
            p.tau = tau;
            const State s{0.4, 0.6};
            const State a = veblen::step_map(s, p);
            const State b = veblen::step_map_via_foc(s, p);
            REQUIRE(std::abs(a.e - b.e) <= 1e-12);
            REQUIRE(std::abs(a.pi - b.pi) <= 1e-12);
        }
    }

    SECTION("randomised tax invariance") {
        oracles::Rng rng(16);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const ModelParams p = random_params(rng, 10.0);
            const State s{rng.uniform(-3.0, 3.0), rng.uniform(-0.5, 1.5)};
            const State a = veblen::step_map(s, p);
            const State b = veblen::step_map_via_foc(s, p);
            worst = std::max({worst, std::abs(a.e - b.e), std::abs(a.pi - b.pi)});
        }
        REQUIRE(worst <= 1e-12);
    }
}
