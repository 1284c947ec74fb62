#include "chns/config.hpp"
#include "chns/errors.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace chns;

namespace {

std::string config_error(const std::string& text)
{
    try {
        validate(parse_config(text, "test.cfg"));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, MinimalConfigIsValid)
{
    const RunConfig cfg = parse_config("[grid]\nnx = 16\nny = 16\n");
    EXPECT_NO_THROW(validate(cfg));
    EXPECT_EQ(cfg.nx, 16);
    EXPECT_EQ(cfg.physics.potential.kind(), PotentialKind::logarithmic);
    // Default dt = 0.1 h^2 / B.
    EXPECT_DOUBLE_EQ(cfg.stepper.dt, 0.1 / (16.0 * 16.0) / cfg.physics.B);
}

TEST(Config, EmptyConfigUsesDefaults)
{
    const RunConfig cfg = parse_config("");
    EXPECT_NO_THROW(validate(cfg));
    EXPECT_EQ(cfg.nx, 64);
}

TEST(Config, OutOfRangeC0CitesH5)
{
    const std::string msg = config_error("[physics]\nc0 = 1.5\n");
    EXPECT_NE(msg.find("(H5)"), std::string::npos) << msg;
}

TEST(Config, NonPositiveViscosityCitesH1)
{
    const std::string msg = config_error("[physics]\neta2 = 0\n");
    EXPECT_NE(msg.find("(H1)"), std::string::npos) << msg;
}

TEST(Config, ConstantPureStateCitesMeanCondition)
{
    const std::string msg = config_error("[experiment]\ninitial = constant\nphi_mean = 1.0\n");
    EXPECT_NE(msg.find("|mean(phi0)| < 1"), std::string::npos) << msg;
}

TEST(Config, UnknownKeyIsNamedWithLocation)
{
    const std::string msg = config_error("[grid]\nnx = 8\n  bogus = 3\n");
    EXPECT_NE(msg.find("bogus"), std::string::npos) << msg;
    EXPECT_NE(msg.find("test.cfg:3:3"), std::string::npos) << msg;
}

TEST(Config, UnknownSectionIsNamed)
{
    const std::string msg = config_error("[solver]\n");
    EXPECT_NE(msg.find("[solver]"), std::string::npos) << msg;
}

TEST(Config, SyntaxErrorReportsLineAndColumn)
{
    const std::string msg = config_error("[grid]\nnx 8\n");
    EXPECT_NE(msg.find("test.cfg:2:1"), std::string::npos) << msg;
    const std::string bad_value = config_error("[grid]\nnx = eight\n");
    EXPECT_NE(bad_value.find("test.cfg:2:6"), std::string::npos) << bad_value;
}

TEST(Config, CommentsAndWhitespaceAreIgnored)
{
    const RunConfig cfg = parse_config("# header\n[physics]   # trailing\n  chi = 0.25 # note\n\n");
    EXPECT_DOUBLE_EQ(cfg.physics.chi, 0.25);
}

TEST(Config, EmitParseRoundTrip)
{
    const std::string text = R"([grid]
nx = 24
ny = 12
lx = 2
[physics]
chi = 0.1
lambda = 0.05
alpha = 0.5
c0 = -0.2
source = gaussian-bump
source_amplitude = 1.5
[potential]
theta = 0.7
[stepper]
dt = 0.002
coupling = picard
picard_kmax = 3
interpolation = upwind
[output]
dir = somewhere
format = binary
heatmap = true
[experiment]
initial = stripe
seed = 17
steps = 12
)";
    const RunConfig a = parse_config(text);
    const std::string emitted = emit_config(a);
    const RunConfig b = parse_config(emitted);
    EXPECT_EQ(emit_config(b), emitted);
    EXPECT_EQ(b.nx, 24);
    EXPECT_EQ(b.physics.lambda, 0.05);
    EXPECT_EQ(b.stepper.coupling, Coupling::picard);
    EXPECT_EQ(b.output.format, SnapshotEncoding::binary);
    EXPECT_EQ(b.experiment.seed, 17u);
}

TEST(Config, LambdaIsOnlyEmittedWhenSet)
{
    EXPECT_EQ(emit_config(parse_config("")).find("lambda"), std::string::npos);
}

TEST(Config, InitialStateHonoursSeed)
{
    RunConfig a = parse_config("[grid]\nnx = 8\nny = 8\n[experiment]\nseed = 3\n");
    RunConfig b = a;
    EXPECT_EQ(initial_state(a).phi, initial_state(b).phi);
    b.experiment.seed = 4;
    EXPECT_FALSE(initial_state(a).phi == initial_state(b).phi);
}
