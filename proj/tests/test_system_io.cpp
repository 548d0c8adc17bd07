#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "rwaframe/enumeration.hpp"
#include "rwaframe/system_io.hpp"
#include "test_helpers.hpp"

using namespace rwaframe;
using namespace rwaframe::testing;

TEST(SystemFile, ParsesLambdaFile) {
    const auto s = read_system_file(std::string(RWAFRAME_SYSTEMS_DIR) + "/lambda.json");
    EXPECT_EQ(s, lambda_system());
}

TEST(SystemFile, AllBundledSystemsAreValid) {
    for (const auto& entry : std::filesystem::directory_iterator(RWAFRAME_SYSTEMS_DIR))
        EXPECT_TRUE(validate(read_system_file(entry.path().string())).ok()) << entry.path();
}

TEST(SystemFile, RoundTripIsBitExact) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (const auto& p : enumerate_patterns(6)) {
        auto s = generic_fully_coupled(p);
        for (auto& l : s.levels) l.omega = u(rng);
        for (auto& t : s.transitions) {
            t.laser = u(rng) / 7.0;
            t.rabi = {u(rng) / 3.0, u(rng) * 1e-9};
        }
        EXPECT_EQ(parse_system(format_system(s)), s);
    }
}

TEST(SystemFile, WriteThenReadFile) {
    const auto path = std::filesystem::temp_directory_path() / "rwaframe_roundtrip.json";
    write_system_file(lambda_system(), path.string());
    EXPECT_EQ(read_system_file(path.string()), lambda_system());
    std::filesystem::remove(path);
}

TEST(SystemFile, LevelsSortedAndReversedPairsCanonicalised) {
    const auto s = parse_system(R"({
      "levels": [{"index": 2, "omega": 1.0, "parity": "odd"}, {"index": 1, "omega": 0.0, "parity": "even"}],
      "transitions": [{"a": 2, "b": 1, "rabi": {"re": 0.5, "im": 0.25}, "laser": 3.0}]
    })");
    EXPECT_EQ(s.levels[0].index, 1u);
    ASSERT_EQ(s.transitions.size(), 1u);
    EXPECT_EQ(s.transitions[0], (Transition{1, 2, {0.5, -0.25}, -3.0}));
}

TEST(SystemFile, RealRabiShorthandAndMissingTransitions) {
    const auto s = parse_system(R"({"levels": [{"index": 1, "omega": 0, "parity": "e"}]})");
    EXPECT_TRUE(s.transitions.empty());
    const auto t = parse_system(R"({"levels": [{"index": 1, "omega": 0, "parity": "even"},
                                               {"index": 2, "omega": 1, "parity": "odd"}],
                                    "transitions": [{"a": 1, "b": 2, "rabi": 2.0, "laser": -1}]})");
    EXPECT_EQ(t.transitions[0].rabi, Complex(2.0, 0.0));
}

TEST(SystemFile, FormatErrors) {
    EXPECT_THROW(parse_system("not json"), FormatError);
    EXPECT_THROW(parse_system("[]"), FormatError);
    EXPECT_THROW(parse_system(R"({"levels": [{"index": 1, "omega": 0}]})"), FormatError);
    EXPECT_THROW(parse_system(R"({"levels": [{"index": 1, "omega": 0, "parity": "up"}]})"), FormatError);
    EXPECT_THROW(parse_system(R"({"levels": [{"index": 0, "omega": 0, "parity": "even"}]})"), FormatError);
    EXPECT_THROW(parse_system(R"({"levels": [{"index": 1, "omega": "x", "parity": "even"}]})"), FormatError);
    EXPECT_THROW(parse_system(R"({"levels": [], "transitions": [{"a": 1, "b": 2, "laser": 1}]})"), FormatError);
    EXPECT_THROW(read_system_file("/nonexistent/system.json"), FormatError);
}

TEST(SystemFile, SelectionRuleViolationsParseButFailValidation) {
    const auto s = parse_system(R"({"levels": [{"index": 1, "omega": 0, "parity": "even"},
                                               {"index": 2, "omega": 1, "parity": "even"}],
                                    "transitions": [{"a": 1, "b": 2, "rabi": 1, "laser": -1}]})");
    EXPECT_TRUE(validate(s).has(ViolationKind::same_parity_coupling));
}
