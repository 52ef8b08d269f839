#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hybisim/errors.hpp"
#include "hybisim/mapped_system.hpp"
#include "hybisim/thermostat.hpp"

using namespace hybisim;

// Landing coordinates of single moves in the reference model, frozen from
// closed-form solutions of the two linear fields (root-finding on the exact
// trajectories, independent of the integration engine).
static constexpr double kELand030 = 0.21052053722277658;
static constexpr double kELand050 = 0.14233406852041927;
static constexpr double kELand075 = 0.11174947238438145;
static constexpr double kRhoLand005 = 0.6253248190472689;
static constexpr double kRhoLand010 = 0.7290387105696605;
static constexpr double kSigLand030 = 0.8839457970313251;
static constexpr double kSigLand050 = 0.8576659314795807;
static constexpr double kWLand090 = 0.2709612894303395;
static constexpr double kWLand095 = 0.3746751809527311;
static constexpr double kWLand100 = 0.44284891436804497;
static constexpr double kLandTol = 5e-8;

namespace {

struct Fixture {
    HybridAutomaton h;
    MappedSystem ms;
    explicit Fixture(const std::string& text)
        : h(parse_model(text)), ms(h, FlowConfig{}) {}
    int intern(const char* mode, std::initializer_list<double> p) {
        return ms.intern({h.mode_index(mode), Vec(p)});
    }
};

Fixture& thermo() {
    static Fixture f(thermostat_model_text());
    return f;
}

// One jump-then-flow move; requires exactly one successor and returns it.
HybridState step_to(Fixture& f, const char* mode, std::initializer_list<double> p,
                    const char* y) {
    int id = f.intern(mode, p);
    auto succ = f.ms.successors(id, y);
    REQUIRE(succ.size() == 1);
    return f.ms.state(succ[0]);
}

}  // namespace

TEST_CASE("moves through the unsafe wings land where the closed form says") {
    auto& f = thermo();
    struct Case {
        const char* src;
        double x0, y0;
        const char* y;
        double x1, y1;
    };
    const Case cases[] = {
        // safe band -> upper wing, re-crossing of the entry surface
        {"OFF_safe", 0.30, 0.55, "OFF_unsafe", kELand030, kELand030 + 0.25},
        {"OFF_safe", 0.50, 0.75, "OFF_unsafe", kELand050, kELand050 + 0.25},
        {"OFF_safe", 0.75, 1.00, "OFF_unsafe", kELand075, kELand075 + 0.25},
        // upper wing -> safe band with the heater on, crossing to the far surface
        {"OFF_unsafe", 0.05, 0.30, "ON_safe", kRhoLand005, kRhoLand005 - 0.25},
        {"OFF_unsafe", 0.10, 0.35, "ON_safe", kRhoLand010, kRhoLand010 - 0.25},
        // safe band -> lower wing
        {"ON_safe", 0.30, 0.05, "ON_unsafe", kSigLand030, kSigLand030 - 0.25},
        {"ON_safe", 0.50, 0.25, "ON_unsafe", kSigLand050, kSigLand050 - 0.25},
        // lower wing -> safe band with the heater off
        {"ON_unsafe", 0.90, 0.65, "OFF_safe", kWLand090, kWLand090 + 0.25},
        {"ON_unsafe", 0.95, 0.70, "OFF_safe", kWLand095, kWLand095 + 0.25},
        {"ON_unsafe", 1.00, 0.75, "OFF_safe", kWLand100, kWLand100 + 0.25},
    };
    for (const Case& c : cases) {
        CAPTURE(c.src);
        CAPTURE(c.x0);
        auto s = step_to(f, c.src, {c.x0, c.y0}, c.y);
        CHECK(f.h.modes[s.mode].name == c.y);
        CHECK(std::abs(s.point[0] - c.x1) < kLandTol);
        CHECK(std::abs(s.point[1] - c.y1) < kLandTol);
    }
}

TEST_CASE("moves past the split threshold settle on the rest points") {
    auto& f = thermo();
    // Entering the heated band too far up converges to the hot rest point.
    auto hot = step_to(f, "OFF_unsafe", {0.20, 0.45}, "ON_safe");
    CHECK(f.h.modes[hot.mode].name == "ON_safe");
    CHECK(std::hypot(hot.point[0] - 1.0, hot.point[1] - 1.0) < 1e-5);
    // Entering the cooled band too far down converges to the cold rest point.
    auto cold = step_to(f, "ON_safe", {0.50, 0.25}, "OFF_safe");
    CHECK(f.h.modes[cold.mode].name == "OFF_safe");
    CHECK(std::hypot(cold.point[0], cold.point[1]) < 1e-5);

    // Rest points idle in place under their own output and nothing else.
    int hot_id = f.ms.intern(hot);
    CHECK(f.ms.classify(hot_id) == PointClass::Equilibrium);
    CHECK(f.ms.enabled_outputs(hot_id) == std::vector<std::string>{"ON_safe"});
    CHECK(f.ms.successors(hot_id, "ON_safe") == std::vector<int>{hot_id});
    CHECK(f.ms.successors(hot_id, "OFF_safe").empty());
    CHECK(f.ms.successor_input(hot_id, "ON_safe") == "*");
}

TEST_CASE("the grazing corner lands back on the entry surface and chains on") {
    auto& f = thermo();
    // From the tangency corner the wing trajectory re-crosses almost
    // immediately; the landing is a guard point, not a dead end.
    int src = f.intern("OFF_safe", {0.25, 0.50});
    auto succ = f.ms.successors(src, "OFF_unsafe");
    REQUIRE(succ.size() == 1);
    auto s = f.ms.state(succ[0]);
    CHECK(f.h.modes[s.mode].name == "OFF_unsafe");
    CHECK(std::hypot(s.point[0] - 0.25, s.point[1] - 0.50) < 1e-3);
    CHECK(std::abs(s.point[1] - s.point[0] - 0.25) < 1e-7);
    CHECK(f.ms.classify(succ[0]) == PointClass::GuardPoint);
    CHECK(f.ms.enabled_outputs(succ[0]) ==
          std::vector<std::string>{"OFF_safe", "ON_safe"});
    // Both onward moves converge: cooling to the cold rest point, heating to
    // the hot one.
    auto off = f.ms.successors(succ[0], "OFF_safe");
    REQUIRE(off.size() == 1);
    CHECK(std::hypot(f.ms.state(off[0]).point[0], f.ms.state(off[0]).point[1]) < 1e-5);
    auto on = f.ms.successors(succ[0], "ON_safe");
    REQUIRE(on.size() == 1);
    CHECK(std::hypot(f.ms.state(on[0]).point[0] - 1.0,
                     f.ms.state(on[0]).point[1] - 1.0) < 1e-5);
}

TEST_CASE("guard moves report the edge input that was taken") {
    auto& f = thermo();
    int id = f.intern("OFF_safe", {0.30, 0.55});
    CHECK(f.ms.successor_input(id, "OFF_unsafe") == "off");
    CHECK(f.ms.successor_input(id, "ON_safe") == "on");
    CHECK_THROWS_AS(f.ms.successor_input(id, "ON_unsafe"), EngineError);
}

TEST_CASE("guard points offer the outputs of their enabled edges, sorted") {
    auto& f = thermo();
    int id = f.intern("OFF_safe", {0.30, 0.55});
    CHECK(f.ms.classify(id) == PointClass::GuardPoint);
    CHECK(f.ms.enabled_outputs(id) ==
          std::vector<std::string>{"OFF_unsafe", "ON_safe"});
    CHECK(f.ms.successors(id, "OFF_safe").empty());  // no such move from here
}

TEST_CASE("a boundary point off every guard with an inward field is rejected") {
    auto& f = thermo();
    // On the lower-wing entry surface but outside every guard segment of the
    // wing mode: the flow moves inward, so the point never pauses there.
    int id = f.intern("ON_unsafe", {0.70, 0.45});
    CHECK_THROWS_AS(f.ms.classify(id), EngineError);
}

static const char* kDeadEndModel =
    "vars x\n"
    "mode m output a\n"
    "  flow x' = -x + 1\n"
    "  invariant x >= 0; x <= 0.5\n"
    "mode n output b\n"
    "  flow x' = 1\n"
    "  invariant x >= 0; x <= 0.5\n"
    "edge m -> n input go\n"
    "  guard x = 0.5\n"
    "edge n -> m input back\n"
    "  guard x = 0.3\n"
    "  reset x = 0.1\n";

TEST_CASE("a landing off every guard that exits instantly is a dead end") {
    Fixture f(kDeadEndModel);
    int src = f.intern("m", {0.5});
    CHECK(f.ms.enabled_outputs(src) == std::vector<std::string>{"b"});
    auto succ = f.ms.successors(src, "b");
    REQUIRE(succ.size() == 1);
    CHECK(f.ms.classify(succ[0]) == PointClass::Blocking);
    CHECK(f.ms.enabled_outputs(succ[0]).empty());
    CHECK(f.ms.successors(succ[0], "a").empty());
    CHECK(f.ms.successors(succ[0], "b").empty());
}

TEST_CASE("a move chain crosses modes and lands on the far guard") {
    Fixture f(kDeadEndModel);
    int src = f.intern("n", {0.3});
    auto succ = f.ms.successors(src, "a");
    REQUIRE(succ.size() == 1);
    auto s = f.ms.state(succ[0]);
    CHECK(f.h.modes[s.mode].name == "m");
    CHECK(std::abs(s.point[0] - 0.5) < 1e-8);
    CHECK(f.ms.classify(succ[0]) == PointClass::GuardPoint);
}

TEST_CASE("a move that lands exactly on its source state is dropped") {
    Fixture f(
        "vars x\n"
        "mode m output a\n"
        "  flow x' = -x + 1\n"
        "  invariant x >= 0; x <= 0.5\n"
        "edge m -> m input loop\n"
        "  guard x = 0.5\n");
    int id = f.intern("m", {0.5});
    CHECK(f.ms.classify(id) == PointClass::GuardPoint);
    CHECK(f.ms.enabled_outputs(id) == std::vector<std::string>{"a"});
    CHECK(f.ms.successors(id, "a").empty());
    CHECK_THROWS_AS(f.ms.successor_input(id, "a"), EngineError);
}

TEST_CASE("two enabled edges with one target output cannot be resolved") {
    Fixture f(
        "vars x\n"
        "mode s output o\n"
        "  flow x' = -x + 1\n"
        "  invariant x >= 0; x <= 0.5\n"
        "mode t1 output w\n"
        "  flow x' = -x\n"
        "  invariant x >= 0; x <= 1\n"
        "mode t2 output w\n"
        "  flow x' = -x\n"
        "  invariant x >= 0; x <= 1\n"
        "edge s -> t1 input u1\n"
        "  guard x = 0.5\n"
        "edge s -> t2 input u2\n"
        "  guard x = 0.5\n");
    int id = f.intern("s", {0.5});
    CHECK_THROWS_AS(f.ms.successors(id, "w"), EngineError);
}

TEST_CASE("rest-point landings from different sides snap to one state") {
    Fixture f(
        "vars x\n"
        "mode m output a\n"
        "  flow x' = -x\n"
        "  invariant x >= -1; x <= 1\n"
        "mode n output b\n"
        "  flow x' = 1\n"
        "  invariant x >= -1; x <= 1\n"
        "edge n -> m input d1\n"
        "  guard x = 1\n"
        "  reset x = 0.5\n"
        "edge n -> m input d2\n"
        "  guard x = 0.25\n"
        "  reset x = -0.5\n");
    auto s1 = f.ms.successors(f.intern("n", {1.0}), "a");
    auto s2 = f.ms.successors(f.intern("n", {0.25}), "a");
    REQUIRE(s1.size() == 1);
    REQUIRE(s2.size() == 1);
    CHECK(s1[0] == s2[0]);
    CHECK(f.h.modes[f.ms.state(s1[0]).mode].name == "m");
    CHECK(std::abs(f.ms.state(s1[0]).point[0]) < 2e-6);
}

TEST_CASE("the rest-point registry snaps within its radius") {
    Fixture f(kDeadEndModel);
    int a = f.ms.register_equilibrium(0, {0.2});
    CHECK(f.ms.register_equilibrium(0, {0.2}) == a);
    CHECK(f.ms.register_equilibrium(0, {0.2 + 5e-5}) == a);
    CHECK(f.ms.register_equilibrium(0, {0.201}) != a);
    CHECK(f.ms.register_equilibrium(1, {0.2}) != a);  // per-mode registry
}

TEST_CASE("interning is bit-exact except for signed zero") {
    Fixture f(kDeadEndModel);
    int a = f.intern("m", {0.0});
    CHECK(f.intern("m", {-0.0}) == a);
    CHECK(f.intern("m", {1e-300}) != a);
    CHECK(f.intern("n", {0.0}) != a);
    CHECK(f.ms.output_of(a) == "a");
    CHECK_THROWS_AS(f.ms.intern({-1, {0.0}}), EngineError);
    CHECK_THROWS_AS(f.ms.intern({0, {0.0, 0.0}}), EngineError);
}

TEST_CASE("state distance is Euclidean within a mode and infinite across") {
    Fixture f(kDeadEndModel);
    int a = f.intern("m", {0.1});
    int b = f.intern("m", {0.4});
    int c = f.intern("n", {0.1});
    CHECK(state_distance(f.ms, a, b) == doctest::Approx(0.3));
    CHECK(std::isinf(state_distance(f.ms, a, c)));
    CHECK(state_distance(f.ms, a, a) == 0.0);
}
