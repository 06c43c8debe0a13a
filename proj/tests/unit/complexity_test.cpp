#include <gtest/gtest.h>

#include "json.hpp"
#include <string>

#include "complexity/complexity.hpp"
#include "fixtures.hpp"

using namespace redline;
using complexity::complexity_delta;
using complexity::Risk;

namespace {

// Eleven decision points on top of the base 1: a hand-built CC-12 function.
const char* kCc12 =
    "def heavy(a, b, c, items):\n"
    "    if a:\n"                          // 1
    "        pass\n"
    "    elif b:\n"                        // 2
    "        pass\n"
    "    for x in items:\n"                // 3
    "        while x and c:\n"             // 4, 5
    "            x -= 1\n"
    "    try:\n"
    "        pass\n"
    "    except ValueError:\n"             // 6
    "        pass\n"
    "    except KeyError:\n"               // 7
    "        pass\n"
    "    y = [i for i in items if i]\n"    // 8, 9
    "    return a if b else (c or y)\n";   // 10, 11

const char* kCc3 =
    "def small(a, b):\n"
    "    if a or b:\n"
    "        return 1\n"
    "    return 0\n";

}  // namespace

TEST(Complexity, RiskBuckets) {
  EXPECT_EQ(complexity::classify(0), Risk::NoRisk);
  EXPECT_EQ(complexity::classify(1), Risk::LowRiskAddition);
  EXPECT_EQ(complexity::classify(9), Risk::LowRiskAddition);
  EXPECT_EQ(complexity::classify(10), Risk::HighRiskAddition);
  EXPECT_EQ(complexity::classify(-9), Risk::LowRiskRemoval);
  EXPECT_EQ(complexity::classify(-10), Risk::HighRiskRemoval);
}

TEST(Complexity, IdenticalSidesHaveNoRisk) {
  FilePairDiff pair{"a.py", std::string(kCc3), std::string(kCc3)};
  auto d = complexity_delta(pair);
  EXPECT_EQ(d.delta, 0);
  EXPECT_EQ(d.risk, Risk::NoRisk);
}

TEST(Complexity, AddedFunctionOfCcThree) {
  std::string base = "X = 1\n";
  FilePairDiff pair{"a.py", base, base + "\n" + kCc3};
  auto d = complexity_delta(pair);
  EXPECT_EQ(d.pre_cc, 0);
  EXPECT_EQ(d.post_cc, 3);
  EXPECT_EQ(d.delta, 3);
  EXPECT_EQ(d.risk, Risk::LowRiskAddition);
}

TEST(Complexity, RemovedCc12FunctionIsHighRisk) {
  auto units = source::extract_functions(kCc12, "h.py");
  ASSERT_EQ(units.size(), 1u);
  ASSERT_EQ(complexity::cyclomatic_complexity(units[0]), 12);
  FilePairDiff pair{"h.py", std::string(kCc12), std::nullopt};
  auto d = complexity_delta(pair);
  EXPECT_EQ(d.delta, -12);
  EXPECT_EQ(d.risk, Risk::HighRiskRemoval);
}

TEST(Complexity, SwappingSidesNegatesAndMirrors) {
  FilePairDiff forward{"a.py", std::string(kCc3), std::string(kCc12)};
  FilePairDiff backward{"a.py", std::string(kCc12), std::string(kCc3)};
  auto f = complexity_delta(forward);
  auto b = complexity_delta(backward);
  EXPECT_EQ(f.delta, -b.delta);
  EXPECT_EQ(f.risk, Risk::LowRiskAddition);
  EXPECT_EQ(b.risk, Risk::LowRiskRemoval);
}

TEST(Complexity, FileLevelIsSumOfFunctionsAndIgnoresModuleCode) {
  std::string text = std::string("if True:\n    z = [q for q in range(3) if q]\n") + kCc3 +
                     "class K:\n    def m(self):\n        def inner():\n            return 1 if self else 2\n"
                     "        return inner\n";
  long sum = 0;
  for (const auto& u : source::extract_functions(text, "s.py")) {
    EXPECT_GE(u.complexity, 1);
    sum += u.complexity;
  }
  EXPECT_EQ(complexity::file_complexity(text), sum);
  EXPECT_EQ(sum, 3 + 1 + 2);
}

TEST(Complexity, SyntaxErrorPropagates) {
  FilePairDiff pair{"a.py", std::string("def f(:\n"), std::string(kCc3)};
  EXPECT_THROW(complexity_delta(pair), source::SyntaxError);
}

TEST(Complexity, ReparsedBodyAgreesWithModuleParse) {
  auto units = source::extract_functions(fixtures::read_fixture("radon/complexity_cases.py"), "c.py");
  ASSERT_FALSE(units.empty());
  for (const auto& u : units) EXPECT_EQ(complexity::cyclomatic_complexity(u), u.complexity) << u.qualified_name;
}

TEST(Complexity, MatchesRecordedRadonValues) {
  auto golden = nlohmann::json::parse(fixtures::read_file(fixtures::source_dir() / "golden" / "radon_cc.json"));
  auto units = source::extract_functions(fixtures::read_fixture("radon/complexity_cases.py"), "c.py");
  int checked = 0;
  for (const auto& [name, value] : golden["values"].items()) {
    bool found = false;
    for (const auto& u : units) {
      if (u.qualified_name != name) continue;
      found = true;
      EXPECT_EQ(complexity::cyclomatic_complexity(u), value.template get<int>()) << name;
      ++checked;
    }
    EXPECT_TRUE(found) << name;
  }
  EXPECT_EQ(checked, 15);
}
