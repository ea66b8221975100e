#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gustnav/errors.hpp"
#include "gustnav/sac.hpp"
#include "test_util.hpp"

using namespace gustnav;

TEST_SUITE_BEGIN("sac_core");

namespace {

// Small seeded setup shared by the gradient tests.
struct Fixture {
    SacNetworks nets;
    std::vector<Transition> transitions;
    std::vector<const Transition*> batch;
    ActionBounds bounds;
    SacHyper hyper;
    std::vector<double> noise;

    explicit Fixture(std::uint64_t seed, std::size_t n = 4) {
        Rng rng(seed);
        nets = SacNetworks::make(3, 2, {6, 6}, 0.01, rng);
        bounds = ActionBounds::uniform(2, -1.0, 1.0);
        hyper.batch_size = n;
        for (std::size_t i = 0; i < n; ++i) {
            Transition t;
            t.state = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            t.action = {rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
            t.reward = rng.uniform(-1, 1);
            t.next_state = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            t.terminal = i == n - 1;
            transitions.push_back(t);
        }
        for (const auto& t : transitions) batch.push_back(&t);
        noise.resize(n * 2);
        for (auto& v : noise) v = rng.normal();
    }

    LossReport losses(SacGradients& grads) const {
        return compute_losses(nets, batch, bounds, hyper, noise, grads);
    }
};

}  // namespace

TEST_CASE("q_target bootstraps only when non-terminal") {
    CHECK(q_target(1.0, false, 10.0, 0.99) == doctest::Approx(10.9));
    CHECK(q_target(1.0, true, 10.0, 0.99) == doctest::Approx(1.0));
    CHECK(q_target(2.5, false, 10.0, 1e-12) == doctest::Approx(2.5));
}

TEST_CASE("v_target_value combines min-Q with the entropy term") {
    CHECK(v_target_value(2.0, 1.0, -3.0, 1.0) == doctest::Approx(4.0));
    CHECK(v_target_value(2.0, 1.0, -3.0, 0.0) == doctest::Approx(1.0));
    CHECK(v_target_value(0.0, 0.0, 0.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("twin-Q symmetry: swapping critics leaves the value target unchanged") {
    Rng rng(99);
    for (int i = 0; i < 100; ++i) {
        const double q1 = rng.uniform(-5, 5), q2 = rng.uniform(-5, 5);
        const double lp = rng.uniform(-4, 1), alpha = rng.uniform(0, 2);
        CHECK(v_target_value(q1, q2, lp, alpha) == v_target_value(q2, q1, lp, alpha));
    }
}

TEST_CASE("polyak update") {
    MlpSpec spec{2, {3}, 1};
    Rng rng(4);
    ParamSet online = init_params(spec, rng);

    SUBCASE("fixpoint when target equals online") {
        ParamSet target = online;
        polyak_update(online, target, 5e-3);
        for (std::size_t l = 0; l < online.weights.size(); ++l)
            for (std::size_t i = 0; i < online.weights[l].data.size(); ++i)
                CHECK(target.weights[l].data[i] == doctest::Approx(online.weights[l].data[i]));
    }
    SUBCASE("single-entry arithmetic") {
        ParamSet target = zero_params(spec);
        ParamSet ones = zero_params(spec);
        for (auto& t : ones.weights) std::fill(t.data.begin(), t.data.end(), 1.0);
        polyak_update(ones, target, 5e-3);
        CHECK(target.weights[0].data[0] == doctest::Approx(0.005));
    }
    SUBCASE("tau = 1 copies") {
        ParamSet target = zero_params(spec);
        polyak_update(online, target, 1.0);
        CHECK(target.weights[0].data[0] == online.weights[0].data[0]);
    }
    SUBCASE("result stays within the convex hull of old target and online") {
        Rng rng2(5);
        ParamSet target = init_params(spec, rng2);
        const ParamSet old_target = target;
        polyak_update(online, target, 0.3);
        for (std::size_t l = 0; l < online.weights.size(); ++l)
            for (std::size_t i = 0; i < online.weights[l].data.size(); ++i) {
                const double lo = std::min(old_target.weights[l].data[i],
                                           online.weights[l].data[i]);
                const double hi = std::max(old_target.weights[l].data[i],
                                           online.weights[l].data[i]);
                CHECK(target.weights[l].data[i] >= lo - 1e-15);
                CHECK(target.weights[l].data[i] <= hi + 1e-15);
            }
    }
}

TEST_CASE("q loss is zero when the critic already equals its target") {
    Rng rng(12);
    SacNetworks nets = SacNetworks::make(2, 1, {4}, 0.01, rng);
    // All-zero critic and value nets give Q = 0 everywhere and Vbar = 0,
    // so a zero-reward transition has a zero residual.
    nets.q1 = zero_params(nets.q_spec);
    nets.q2 = zero_params(nets.q_spec);
    nets.v_target = zero_params(nets.v_spec);
    Transition t;
    t.state = {0.3, -0.4};
    t.action = {0.2};
    t.reward = 0.0;
    t.next_state = {0.1, 0.1};
    t.terminal = false;

    SacHyper hyper;
    SacGradients grads = SacGradients::zeros(nets);
    const std::vector<double> noise{0.37};
    const LossReport rep = compute_losses(nets, {&t}, ActionBounds::uniform(1, -1, 1), hyper,
                                          noise, grads);
    CHECK(rep.q1_loss == doctest::Approx(0.0));
    CHECK(rep.q2_loss == doctest::Approx(0.0));
    for (const auto& w : grads.q1.weights)
        for (double v : w.data) CHECK(v == 0.0);
}

TEST_CASE("with alpha=0 and a collapsed policy the loss is -mean min-Q at the mean action") {
    Rng rng(13);
    SacNetworks nets = SacNetworks::make(3, 2, {6}, 0.01, rng);
    // Force log_std to the clamp floor: deterministic head.
    const std::size_t last = nets.policy.biases.size() - 1;
    for (std::size_t j = 2; j < 4; ++j) nets.policy.biases[last].data[j] = -50.0;
    for (std::size_t j = 2; j < 4; ++j)
        for (std::size_t c = 0; c < nets.policy.weights[last].shape[1]; ++c)
            nets.policy.weights[last].at(j, c) = 0.0;

    Fixture fx(14);
    SacHyper hyper;
    hyper.alpha = 0.0;
    ActionBounds bounds = ActionBounds::uniform(2, -1.0, 1.0);

    SacGradients grads = SacGradients::zeros(nets);
    std::vector<double> noise(fx.batch.size() * 2, 0.7);  // ignored: sigma ~ e^-20
    const LossReport rep = compute_losses(nets, fx.batch, bounds, hyper, noise, grads);

    double expected = 0.0;
    for (const Transition* t : fx.batch) {
        const auto raw = mlp_forward(nets.policy_spec, nets.policy, t->state);
        const auto a = squash_mean(split_policy_output(raw), bounds);
        std::vector<double> sa(t->state);
        sa.insert(sa.end(), a.begin(), a.end());
        const double q1 = mlp_forward(nets.q_spec, nets.q1, sa)[0];
        const double q2 = mlp_forward(nets.q_spec, nets.q2, sa)[0];
        expected -= std::min(q1, q2) / static_cast<double>(fx.batch.size());
    }
    CHECK(rep.policy_loss == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("all four loss gradients match finite differences") {
    Fixture fx(20250807);
    SacGradients grads = SacGradients::zeros(fx.nets);
    fx.losses(grads);
    SacGradients scratch = SacGradients::zeros(fx.nets);

    SUBCASE("q1") {
        auto loss = [&]() { return fx.losses(scratch).q1_loss; };
        CHECK(testutil::fd_check(fx.nets.q1, grads.q1, loss) <= 1e-5);
    }
    SUBCASE("q2") {
        auto loss = [&]() { return fx.losses(scratch).q2_loss; };
        CHECK(testutil::fd_check(fx.nets.q2, grads.q2, loss) <= 1e-5);
    }
    SUBCASE("v") {
        auto loss = [&]() { return fx.losses(scratch).v_loss; };
        CHECK(testutil::fd_check(fx.nets.v, grads.v, loss) <= 1e-5);
    }
    SUBCASE("policy") {
        auto loss = [&]() { return fx.losses(scratch).policy_loss; };
        CHECK(testutil::fd_check(fx.nets.policy, grads.policy, loss) <= 1e-5);
    }
}

TEST_CASE("train_step is a no-op until the buffer holds a full batch") {
    Rng rng(31);
    SacNetworks nets = SacNetworks::make(3, 2, {6}, 0.01, rng);
    const ParamSet before = nets.policy;
    AdamStates adam = AdamStates::make(nets, 3e-4);
    ReplayBuffer buffer(100);
    SacHyper hyper;
    hyper.batch_size = 8;

    Transition t;
    t.state = {0.1, 0.2, 0.3};
    t.action = {0.0, 0.0};
    t.next_state = {0.1, 0.2, 0.3};
    for (int i = 0; i < 7; ++i) buffer.push(t);

    const ActionBounds bounds = ActionBounds::uniform(2, -1, 1);
    CHECK(!train_step(nets, adam, buffer, bounds, hyper, rng).has_value());
    for (std::size_t l = 0; l < before.weights.size(); ++l)
        for (std::size_t i = 0; i < before.weights[l].data.size(); ++i)
            CHECK(nets.policy.weights[l].data[i] == before.weights[l].data[i]);

    buffer.push(t);
    CHECK(train_step(nets, adam, buffer, bounds, hyper, rng).has_value());
}

TEST_CASE("one train_step moves every network") {
    Fixture fx(47, 8);
    ReplayBuffer buffer(64);
    for (const auto& t : fx.transitions) buffer.push(t);
    SacHyper hyper;
    hyper.batch_size = fx.transitions.size();

    Rng rng(48);
    AdamStates adam = AdamStates::make(fx.nets, hyper.lr);
    const ParamSet p0 = fx.nets.policy;
    const ParamSet q0 = fx.nets.q1;
    const ParamSet v0 = fx.nets.v;
    const ParamSet vt0 = fx.nets.v_target;
    REQUIRE(train_step(fx.nets, adam, buffer, fx.bounds, hyper, rng).has_value());

    auto moved = [](const ParamSet& a, const ParamSet& b) {
        for (std::size_t l = 0; l < a.weights.size(); ++l)
            for (std::size_t i = 0; i < a.weights[l].data.size(); ++i)
                if (a.weights[l].data[i] != b.weights[l].data[i]) return true;
        return false;
    };
    CHECK(moved(p0, fx.nets.policy));
    CHECK(moved(q0, fx.nets.q1));
    CHECK(moved(v0, fx.nets.v));
    CHECK(moved(vt0, fx.nets.v_target));  // polyak pulls the target along
}

TEST_CASE("q losses trend down on a fixed regression set") {
    Rng rng(53);
    SacNetworks nets = SacNetworks::make(2, 1, {8, 8}, 0.01, rng);
    ReplayBuffer buffer(64);
    for (int i = 0; i < 32; ++i) {
        Transition t;
        t.state = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        t.action = {rng.uniform(-0.9, 0.9)};
        t.reward = 0.5 * t.state[0] - 0.3 * t.action[0];
        t.next_state = t.state;
        t.terminal = true;  // fixed targets: pure regression
        buffer.push(t);
    }
    SacHyper hyper;
    hyper.alpha = 0.0;
    hyper.batch_size = 32;
    hyper.lr = 1e-3;
    AdamStates adam = AdamStates::make(nets, hyper.lr);
    const ActionBounds bounds = ActionBounds::uniform(1, -1, 1);

    std::vector<double> window_means;
    double acc = 0.0;
    for (int step = 1; step <= 100; ++step) {
        const auto rep = train_step(nets, adam, buffer, bounds, hyper, rng);
        REQUIRE(rep.has_value());
        acc += rep->q1_loss + rep->q2_loss;
        if (step % 10 == 0) {
            window_means.push_back(acc / 10.0);
            acc = 0.0;
        }
    }
    for (std::size_t w = 1; w < window_means.size(); ++w)
        CHECK(window_means[w] <= window_means[w - 1] * 1.05);
}

TEST_CASE("toy 1-D control problem: mean_q rises as the policy improves") {
    // state = position in [-3, 3], action nudges it, reward = -|position|
    Rng rng(61);
    SacNetworks nets = SacNetworks::make(1, 1, {16, 16}, 0.01, rng);
    AdamStates adam = AdamStates::make(nets, 3e-4);
    ReplayBuffer buffer(10000);
    SacHyper hyper;
    hyper.batch_size = 32;
    const ActionBounds bounds = ActionBounds::uniform(1, -1.0, 1.0);

    double x = rng.uniform(-2, 2);
    int ep_step = 0;
    double early = 0.0, late = 0.0;
    int early_n = 0, late_n = 0;
    const int total = 5000;
    for (int step = 0; step < total; ++step) {
        const auto raw = mlp_forward(nets.policy_spec, nets.policy, std::vector<double>{x});
        std::vector<double> noise{rng.normal()};
        const auto sample = squashed_sample(split_policy_output(raw), bounds, noise);
        const double x_next = std::clamp(x + 0.2 * sample.action[0], -3.0, 3.0);
        const double r = -std::abs(x_next);
        const bool done = ++ep_step >= 40;
        buffer.push(Transition{{x}, sample.action, r, {x_next}, false});
        const auto rep = train_step(nets, adam, buffer, bounds, hyper, rng);
        if (rep) {
            if (step < total / 10) {
                early += rep->mean_q;
                ++early_n;
            } else if (step >= total - total / 10) {
                late += rep->mean_q;
                ++late_n;
            }
        }
        if (done) {
            x = rng.uniform(-2, 2);
            ep_step = 0;
        } else {
            x = x_next;
        }
    }
    REQUIRE(early_n > 0);
    REQUIRE(late_n > 0);
    CHECK(late / late_n > early / early_n);
}

TEST_SUITE_END();
