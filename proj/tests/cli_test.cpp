#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdcswap/cli.hpp"

using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = pdcswap::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      const char c = line[k];
      if (c == '"' && quoted && k + 1 < line.size() && line[k + 1] == '"') {
        cells.back() += '"';
        ++k;
      } else if (c == '"') {
        quoted = !quoted;
      } else if (c == ',' && !quoted) {
        cells.emplace_back();
      } else {
        cells.back() += c;
      }
    }
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pdcswap_cli_test_" + name);
}

}  // namespace

TEST(Cli, ProbabilitiesCsvVariantA) {
  const auto r = run({"probabilities", "--variant", "A", "--theta1", "0", "--theta2", "0", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 12u);  // header, 10 patterns, sum
  EXPECT_EQ(rows[0][0], "pattern");
  bool found = false;
  for (const auto& row : rows)
    if (row[0] == "1a+,0a-;0b+,1b-") {
      found = true;
      EXPECT_NEAR(std::stod(row[5]), 1.0 / 26.0, 1e-9);
    }
  EXPECT_TRUE(found);
  EXPECT_EQ(rows.back()[0], "sum");
  EXPECT_EQ(rows.back()[5], "1.000000000");
}

TEST(Cli, CsvQuotesPatternLabels) {
  const auto r = run({"probabilities", "--variant", "B", "--theta1", "0", "--theta2", "0", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n\"1a+,1a-;0b+,0b-\",1,1,0,0,"), std::string::npos);
  for (const auto& row : parse_csv(r.out)) EXPECT_EQ(row.size(), 6u);
}

TEST(Cli, ProbabilitiesJsonHomDip) {
  const auto r = run({"probabilities", "--variant", "B", "--theta1", "0.7853981634", "--theta2", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["variant"], "B");
  EXPECT_EQ(j["probabilities"].size(), 10u);
  EXPECT_EQ(j["probabilities"][0]["pattern"], "1a+,1a-;0b+,0b-");
  EXPECT_LT(j["probabilities"][0]["probability"].get<double>(), 1e-12);
  EXPECT_NEAR(j["two_theta1"].get<double>(), std::numbers::pi / 2, 1e-8);
  EXPECT_NEAR(j["sum"].get<double>(), 1.0, 1e-9);
}

TEST(Cli, DegreesSwitch) {
  const auto r = run({"probabilities", "--variant", "B", "--theta1", "45", "--theta2", "0", "--degrees"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_LT(j["probabilities"][0]["probability"].get<double>(), 1e-12);
  EXPECT_NEAR(j["theta1"].get<double>(), std::numbers::pi / 4, 1e-8);
}

TEST(Cli, CorrelationWithChsh) {
  const auto r = run({"correlation", "--variant", "B", "--alpha", "1", "--theta1", "-0.65139", "--theta2",
                      "0.52663", "--theta1p", "-1.437175", "--theta2p", "1.31193"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["chsh"]["S"].get<double>(), 2.16569, 1e-4);
  EXPECT_TRUE(j["chsh"]["violated"].get<bool>());
  const auto only = run({"correlation", "--variant", "A", "--alpha", "1", "--theta1", "0.2", "--theta2", "0.2"});
  EXPECT_NEAR(json::parse(only.out)["E"].get<double>(), 11.0 / 13.0, 1e-8);
  EXPECT_FALSE(json::parse(only.out).contains("chsh"));
}

TEST(Cli, CorrelationNeedsBothPrimedAngles) {
  const auto r = run({"correlation", "--variant", "A", "--theta1", "0", "--theta2", "0", "--theta1p", "1"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, ChshMax) {
  for (auto [alpha, expected] : {std::pair{"1", 2.16569}, std::pair{"0", 2.11453}}) {
    const auto r = run({"chsh-max", "--variant", "B", "--alpha", alpha});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["S"].get<double>(), expected, 1e-4);
    EXPECT_TRUE(j["violated"].get<bool>());
    const auto& a = j["angles"];
    EXPECT_NEAR(a["two_theta2"].get<double>(), 2 * a["theta2"].get<double>(), 1e-8);
  }
  const auto a0 = json::parse(run({"chsh-max", "--variant", "A", "--alpha", "0"}).out);
  EXPECT_NEAR(a0["S"].get<double>(), 2 * std::numbers::sqrt2 / 13 + 8.0 / 13, 1e-8);
  EXPECT_FALSE(a0["violated"].get<bool>());
}

TEST(Cli, AlphaThreshold) {
  const auto a = run({"alpha-threshold", "--variant", "A"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NEAR(json::parse(a.out)["alpha_star"].get<double>(), (9 - std::numbers::sqrt2) / 8, 1e-5);
  const auto b = json::parse(run({"alpha-threshold", "--variant", "B"}).out);
  EXPECT_EQ(b["alpha_star"].get<double>(), 0.0);
  EXPECT_TRUE(b["violated_at_all_alpha"].get<bool>());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"alpha-threshold", "--variant", "C"}).code, 2);
  EXPECT_EQ(run({"probabilities", "--theta1", "0", "--theta2", "0"}).code, 2);
  EXPECT_EQ(run({"probabilities", "--variant", "A", "--theta1", "zero", "--theta2", "0"}).code, 2);
  EXPECT_EQ(run({"chsh-max", "--variant", "B", "--alpha", "1.5"}).code, 2);
  EXPECT_EQ(run({"scan", "--variant", "A", "--which", "nope"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ScanHomDip) {
  const auto r = run({"scan", "--which", "hom-dip", "--points", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 51u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"theta1", "two_theta1", "p_coincidence"}));
  std::size_t argmin = 1;
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (std::stod(rows[k][2]) < std::stod(rows[argmin][2])) argmin = k;
  const double h = (std::numbers::pi / 2) / 49;
  EXPECT_LE(std::abs(std::stod(rows[argmin][0]) - std::numbers::pi / 4), h / 2 + 1e-8);

  const auto exact = parse_csv(run({"scan", "--which", "hom-dip", "--points", "51"}).out);
  EXPECT_LT(std::stod(exact[26][2]), 1e-12);
  EXPECT_NEAR(std::stod(exact[1][2]), 0.4, 1e-9);
}

TEST(Cli, ScanChshVsAlphaCrossesBetween094And095) {
  const auto r = run({"scan", "--which", "chsh-vs-alpha", "--variant", "A", "--points", "11", "--min", "0.9",
                      "--max", "1.0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 12u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double a = std::stod(rows[k][0]);
    const double s = std::stod(rows[k][1]);
    if (a <= 0.94 + 1e-9) {
      EXPECT_LT(s, 2.0) << a;
    }
    if (a >= 0.95 - 1e-9) {
      EXPECT_GT(s, 2.0) << a;
    }
  }
}

TEST(Cli, ScanFringeAmplitude) {
  const auto r = run({"scan", "--which", "fringe", "--variant", "A", "--points", "61"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  double lo = 1e9, hi = -1e9;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    lo = std::min(lo, std::stod(rows[k][3]));
    hi = std::max(hi, std::stod(rows[k][3]));
  }
  EXPECT_NEAR((hi - lo) / 2, 1.0 / 13.0, 1e-8);
}

TEST(Cli, VerifyPassesAndDetectsPerturbation) {
  const auto ok = run({"verify"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("all checks passed"), std::string::npos);
  const auto j = json::parse(run({"verify", "--format", "json"}).out);
  EXPECT_GE(j["checks"].size(), 4u);
  EXPECT_TRUE(j["all_passed"].get<bool>());

  const auto bad = run({"verify", "--inject-perturbation"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("[FAIL]"), std::string::npos);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto path = temp_file("config.ini");
  {
    std::ofstream f(path);
    f << "variant=B\nalpha=0\n";
  }
  const auto from_file = run({"chsh-max", "--config", path.string()});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_NEAR(json::parse(from_file.out)["S"].get<double>(), 2.11453, 1e-4);
  const auto overridden = run({"chsh-max", "--config", path.string(), "--alpha", "1"});
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_NEAR(json::parse(overridden.out)["S"].get<double>(), 2.16569, 1e-4);
  std::filesystem::remove(path);
}

TEST(Cli, OutputFile) {
  const auto path = temp_file("out.json");
  const auto r = run({"probabilities", "--variant", "A", "--theta1", "0", "--theta2", "1", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  const auto j = json::parse(f);
  EXPECT_EQ(j["variant"], "A");
  std::filesystem::remove(path);
}

TEST(Cli, NumberFormatting) {
  EXPECT_EQ(pdcswap::cli::format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(pdcswap::cli::format_number(2.0), "2");
  EXPECT_EQ(pdcswap::cli::round9(2.165685424949238), 2.16568542);
}
