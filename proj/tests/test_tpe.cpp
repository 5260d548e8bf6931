#include "armsynth/pareto.hpp"
#include "armsynth/tpe.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <numeric>
#include <set>

using namespace armsynth;

namespace {

ObjectiveVector ov(double x, double t, bool feasible = true) {
    ObjectiveVector o;
    o.e_x = x;
    o.e_tau = t;
    o.feasible = feasible;
    return o;
}

ParamSpace mixed_space() {
    return {ParamDim::make_continuous("x", {-1.0, 2.0}), ParamDim::make_categorical("c", 5),
            ParamDim::make_continuous("pinned", {0.5, 0.5}), ParamDim::make_categorical("b", 2)};
}

bool in_domain(const ParamSpace& space, const ParamVector& x) {
    if (x.size() != space.size()) return false;
    for (std::size_t d = 0; d < space.size(); ++d) {
        if (!space[d].range.contains(x[d])) return false;
        if (space[d].categorical && x[d] != std::floor(x[d])) return false;
    }
    return true;
}

// Fraction of the next `asks` proposals inside [lo, hi] after `tells`
// evaluations of the 1-D problem f.
template <class F>
double concentration(std::uint64_t seed, F f, int tells, int asks, double lo, double hi) {
    SamplerSettings s;
    s.seed = seed;
    TpeSampler sampler({ParamDim::make_continuous("x", {0.0, 1.0})}, s);
    for (int i = 0; i < tells; ++i) {
        ParamVector x = sampler.ask();
        const auto o = f(x[0]);
        sampler.tell(x, o);
    }
    int inside = 0;
    for (int i = 0; i < asks; ++i) {
        const double x = sampler.ask()[0];
        if (x >= lo && x <= hi) ++inside;
    }
    return static_cast<double>(inside) / asks;
}

}  // namespace

TEST_CASE("TPE: a fresh sampler proposes in-range points") {
    const ParamSpace space = mixed_space();
    SamplerSettings s;
    s.seed = 3;
    TpeSampler sampler(space, s);
    for (int i = 0; i < 100; ++i) {
        const ParamVector x = sampler.ask();
        CHECK(in_domain(space, x));
        CHECK(x[2] == 0.5);
    }
}

TEST_CASE("TPE: proposals after start-up stay in range") {
    const ParamSpace space = mixed_space();
    SamplerSettings s;
    s.seed = 4;
    s.n_startup = 10;
    TpeSampler sampler(space, s);
    Rng rng(1);
    for (int i = 0; i < 120; ++i) {
        const ParamVector x = sampler.ask();
        REQUIRE(in_domain(space, x));
        const bool feasible = uniform(rng, 0, 1) > 0.3;
        sampler.tell(x, ov(x[0] * x[0] + x[1], std::abs(x[0] - 1.0) + x[3], feasible));
    }
}

TEST_CASE("TPE: identical objectives degenerate the split but asks stay valid") {
    std::vector<Observation> history;
    for (int i = 0; i < 60; ++i) history.push_back({{0.1 * (i % 10), 1.0}, ov(2.0, 3.0)});
    const auto [good, bad] = TpeSampler::split(history, 0.1);
    CHECK(good.empty());
    CHECK(bad.empty());

    const ParamSpace space = {ParamDim::make_continuous("x", {0.0, 1.0}), ParamDim::make_categorical("c", 3)};
    SamplerSettings s;
    s.seed = 5;
    TpeSampler sampler(space, s);
    for (int i = 0; i < 80; ++i) {
        const ParamVector x = sampler.ask();
        CHECK(in_domain(space, x));
        sampler.tell(x, ov(2.0, 3.0));
    }
}

TEST_CASE("TPE split: sizes, ranks and infeasible trials") {
    Rng rng(6);
    for (int s = 0; s < 20; ++s) {
        std::vector<Observation> history;
        const int n = 20 + s * 7;
        int feasible = 0;
        for (int i = 0; i < n; ++i) {
            const bool ok = uniform(rng, 0, 1) > 0.25;
            feasible += ok;
            history.push_back({{0.0}, ov(std::round(uniform(rng, 0, 1) * 20), std::round(uniform(rng, 0, 1) * 20), ok)});
        }
        const double gamma = 0.1;
        const auto [good, bad] = TpeSampler::split(history, gamma);
        if (feasible == 0) continue;
        CHECK(good.size() ==
              static_cast<std::size_t>(std::min(feasible, std::max(1, static_cast<int>(std::ceil(gamma * n))))));
        CHECK(good.size() + bad.size() == static_cast<std::size_t>(n));
        std::set<int> all(good.begin(), good.end());
        all.insert(bad.begin(), bad.end());
        CHECK(all.size() == static_cast<std::size_t>(n));

        std::vector<ObjectiveVector> pts;
        for (const auto& h : history) pts.push_back(h.objectives);
        const auto ranks = constrained_ranks(pts);
        int worst_good = 0;
        for (int g : good) {
            CHECK(history[static_cast<std::size_t>(g)].objectives.feasible);
            worst_good = std::max(worst_good, ranks[static_cast<std::size_t>(g)]);
        }
        for (int b : bad)
            if (history[static_cast<std::size_t>(b)].objectives.feasible)
                CHECK(ranks[static_cast<std::size_t>(b)] >= worst_good);
    }
    std::vector<Observation> none(30, Observation{{0.0}, ov(1.0, 1.0, false)});
    none[3].objectives.e_x = 2.0;
    CHECK(TpeSampler::split(none, 0.1).first.empty());
}

TEST_CASE("TPE good weights: hypervolume contributions scaled to a maximum of 1") {
    std::vector<Observation> history = {{{0.0}, ov(0, 4)}, {{0.0}, ov(1, 1)}, {{0.0}, ov(4, 0)}, {{0.0}, ov(2, 2)}};
    const auto w = TpeSampler::good_weights(history, {0, 1, 2, 3});
    REQUIRE(w.size() == 4);
    // Reference 1.1 x max = (4.4, 4.4). Leave-one-out contributions are
    // 1 * 0.4, 3 * 3 - 2 * 2 (the part (2, 2) still covers), 0.4 * 1 and 0.
    CHECK(w[0] == doctest::Approx(0.4 / 5.0));
    CHECK(w[1] == doctest::Approx(1.0));
    CHECK(w[2] == doctest::Approx(0.4 / 5.0));
    CHECK(w[3] == TpeSampler::kMinWeight);

    history.push_back({{0.0}, ov(0, 4)});
    const auto d = TpeSampler::good_weights(history, {0, 4, 1});
    for (double v : d) CHECK(v >= TpeSampler::kMinWeight);
    CHECK(d[0] == TpeSampler::kMinWeight);
    CHECK(d[1] == TpeSampler::kMinWeight);
    CHECK(d[2] == doctest::Approx(1.0));
}

TEST_CASE("Parzen: categorical mass sums to one") {
    Rng rng(7);
    const ParamSpace space = {ParamDim::make_categorical("c", 7), ParamDim::make_categorical("d", 2)};
    for (int s = 0; s < 20; ++s) {
        std::vector<ParamVector> data;
        for (int i = 0; i < s; ++i)
            data.push_back({static_cast<double>(uniform_index(rng, 7)), static_cast<double>(uniform_index(rng, 2))});
        std::vector<const ParamVector*> ptrs;
        std::vector<double> weights;
        for (const auto& d : data) {
            ptrs.push_back(&d);
            weights.push_back(uniform(rng, 1e-6, 3.0));
        }
        const ParzenEstimator plain(space, ptrs, 0.01);
        const ParzenEstimator weighted(space, ptrs, 0.01, weights);
        for (const auto* est : {&plain, &weighted})
            for (std::size_t d = 0; d < 2; ++d) {
                const auto& mass = est->categorical_mass(d);
                CHECK(std::abs(std::accumulate(mass.begin(), mass.end(), 0.0) - 1.0) < 1e-12);
            }
    }
}

TEST_CASE("Parzen: categorical mass is Laplace-smoothed weighted frequency") {
    const ParamSpace space = {ParamDim::make_categorical("c", 3)};
    const std::vector<ParamVector> data = {{0.0}, {0.0}, {2.0}};
    std::vector<const ParamVector*> ptrs = {&data[0], &data[1], &data[2]};
    const ParzenEstimator plain(space, ptrs, 0.01);
    CHECK(plain.categorical_mass(0) == std::vector<double>{3.0 / 6.0, 1.0 / 6.0, 2.0 / 6.0});
    // Weights are rescaled to average 1: (1, 1, 4) -> (0.5, 0.5, 2).
    const ParzenEstimator weighted(space, ptrs, 0.01, {1.0, 1.0, 4.0});
    const auto& m = weighted.categorical_mass(0);
    CHECK(m[0] == doctest::Approx(2.0 / 6.0));
    CHECK(m[1] == doctest::Approx(1.0 / 6.0));
    CHECK(m[2] == doctest::Approx(3.0 / 6.0));
    CHECK(std::exp(plain.log_density({2.0})) == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("Parzen: continuous density integrates to one over its range") {
    Rng rng(8);
    const ParamSpace space = {ParamDim::make_continuous("x", {0.1, 0.6})};
    for (int s = 0; s < 10; ++s) {
        std::vector<ParamVector> data;
        for (int i = 0; i < 1 + 3 * s; ++i) data.push_back({uniform(rng, 0.1, 0.6)});
        std::vector<const ParamVector*> ptrs;
        std::vector<double> weights;
        for (const auto& d : data) {
            ptrs.push_back(&d);
            weights.push_back(uniform(rng, 0.01, 1.0));
        }
        const ParzenEstimator est(space, ptrs, 0.01, s % 2 ? weights : std::vector<double>{});
        // Composite Simpson's rule.
        const int n = 20000;
        const double h = 0.5 / n;
        double integral = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            integral += w * std::exp(est.log_density({0.1 + i * h}));
        }
        integral *= h / 3.0;
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(est.bandwidth(0) >= 0.01 * 0.5);
        CHECK(est.bandwidth(0) <= 0.5);
        for (int i = 0; i < 200; ++i) {
            const double x = est.sample(rng)[0];
            CHECK(x >= 0.1);
            CHECK(x <= 0.6);
        }
    }
}

TEST_CASE("Parzen: sample weights pull mass toward heavy samples") {
    const ParamSpace space = {ParamDim::make_continuous("x", {0.0, 1.0})};
    const std::vector<ParamVector> data = {{0.1}, {0.9}};
    std::vector<const ParamVector*> ptrs = {&data[0], &data[1]};
    const ParzenEstimator est(space, ptrs, 0.01, {1.0, 1e-9});
    const ParzenEstimator flat(space, ptrs, 0.01);
    CHECK(est.log_density({0.1}) > est.log_density({0.9}));
    CHECK(est.log_density({0.1}) > flat.log_density({0.1}));
    CHECK(est.log_density({0.9}) < flat.log_density({0.9}));
    CHECK(flat.log_density({0.1}) == doctest::Approx(flat.log_density({0.9})));
    CHECK_THROWS_AS(ParzenEstimator(space, ptrs, 0.01, {1.0}), ContractViolation);
}

TEST_CASE("TPE: start-up samples are rejection-resampled against the validator") {
    SamplerSettings s;
    s.seed = 9;
    TpeSampler sampler({ParamDim::make_continuous("x", {0.0, 1.0})}, s);
    for (int i = 0; i < 40; ++i) {
        const ParamVector x = sampler.ask([](const ParamVector& v) { return v[0] < 0.25; });
        CHECK(x[0] < 0.25);
        sampler.tell(x, ov(x[0], 1 - x[0]));
    }
}

TEST_CASE("TPE: deterministic given seed and history") {
    const ParamSpace space = mixed_space();
    SamplerSettings s;
    s.seed = 10;
    s.n_startup = 15;
    TpeSampler a(space, s), b(space, s);
    for (int i = 0; i < 60; ++i) {
        const ParamVector x = a.ask(), y = b.ask();
        REQUIRE(x == y);
        const auto o = ov(x[0] * x[0], (x[0] - 1) * (x[0] - 1) + x[1]);
        a.tell(x, o);
        b.tell(y, o);
    }
}

TEST_CASE("TPE: batches are in range and the tell shape is checked") {
    const ParamSpace space = mixed_space();
    SamplerSettings s;
    s.seed = 11;
    s.n_startup = 5;
    TpeSampler sampler(space, s);
    for (int round = 0; round < 10; ++round) {
        const auto batch = sampler.ask_batch(4);
        REQUIRE(batch.size() == 4);
        for (const auto& x : batch) {
            CHECK(in_domain(space, x));
            sampler.tell(x, ov(std::abs(x[0]), x[1] + 0.1 * x[3]));
        }
    }
    CHECK(sampler.observations().size() == 40);
    CHECK_THROWS_AS(sampler.tell({0.0}, ov(1, 1)), ContractViolation);
    SamplerSettings bad;
    bad.gamma = 1.5;
    CHECK_THROWS_AS(TpeSampler(space, bad), ContractViolation);
}

TEST_CASE("TPE concentrates on the interior of a 1-D Pareto set") {
    auto f = [](double x) { return ov(x * x, (x - 1) * (x - 1)); };
    for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(concentration(seed, f, 300, 100, 0.05, 0.95) >= 0.8);
}

TEST_CASE("TPE concentrates on a narrow Pareto set") {
    // Pareto set [0.3, 0.4]; uniform sampling would put 20% in [0.25, 0.45].
    auto f = [](double x) { return ov((x - 0.3) * (x - 0.3), (x - 0.4) * (x - 0.4)); };
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) total += concentration(seed, f, 300, 100, 0.25, 0.45);
    CHECK(total / 10 >= 0.6);
}

TEST_CASE("TPE finds the right category") {
    const ParamSpace space = {ParamDim::make_categorical("c", 8), ParamDim::make_continuous("x", {0.0, 1.0})};
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SamplerSettings s;
        s.seed = seed;
        TpeSampler sampler(space, s);
        for (int i = 0; i < 200; ++i) {
            const ParamVector x = sampler.ask();
            const double penalty = x[0] == 5.0 ? 0.0 : 1.0;
            sampler.tell(x, ov(penalty + x[1], penalty + 1 - x[1]));
        }
        for (int i = 0; i < 20; ++i) hits += sampler.ask()[0] == 5.0;
    }
    CHECK(hits >= 70);
}
