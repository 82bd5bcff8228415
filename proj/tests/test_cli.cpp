#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mcsubmod/mcsubmod.hpp"

using namespace mcsubmod;

namespace {

struct Result
{
  int code{-1};
  std::string out;
};

Result run(std::string const &args)
{
  std::string const cmd = std::string(MCSUBMOD_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE *pipe = popen(cmd.c_str(), "r");
  Result r;
  if (pipe == nullptr)
  {
    return r;
  }
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
  {
    r.out.append(buf.data(), n);
  }
  int const status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> parse_csv(std::string const &text)
{
  std::vector<std::vector<std::string>> rows;
  std::stringstream in(text);
  std::string line;
  while (std::getline(in, line))
  {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ','))
    {
      cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',')
    {
      cells.emplace_back();
    }
    rows.push_back(cells);
  }
  return rows;
}

std::string temp_path(std::string const &name)
{
  return (std::filesystem::temp_directory_path() / ("mcsubmod_cli_" + name)).string();
}

std::string key_value(std::string const &text, std::string const &key)
{
  for (auto const &row : parse_csv(text))
  {
    if (row.size() == 2 && row[0] == key)
    {
      return row[1];
    }
  }
  return {};
}

}  // namespace

TEST(Cli, EntropyGreedyTable)
{
  auto r = run("select --problem entropy --algorithm greedy --m-min 1 --m-max 10");
  ASSERT_EQ(r.code, 0);
  auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"m", "subset", "value"}));
  EXPECT_EQ(rows[1][1], "1");
  EXPECT_NEAR(std::stod(rows[1][2]), 0.29085, 1e-4);
  EXPECT_EQ(rows[2][1], "1;10");
  EXPECT_NEAR(std::stod(rows[2][2]), 0.57371, 1e-4);
  EXPECT_NEAR(std::stod(rows[10][2]), 2.29109, 1e-4);
}

TEST(Cli, ZeroBudgetRow)
{
  auto r = run("select --problem entropy --m-min 0 --m-max 0 --d 4");
  ASSERT_EQ(r.code, 0);
  auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "0");
  EXPECT_EQ(rows[1][1], "");
  EXPECT_DOUBLE_EQ(std::stod(rows[1][2]), 0.0);
}

TEST(Cli, OracleCertificatesHold)
{
  auto const path = temp_path("oracle.json");
  auto r = run("select --problem entropy --algorithm distorted --d 4 --oracle " + path);
  ASSERT_EQ(r.code, 0);
  std::ifstream in(path);
  auto doc = nlohmann::json::parse(in);
  ASSERT_EQ(doc["runs"].size(), 4u);
  for (auto const &run : doc["runs"])
  {
    EXPECT_TRUE(run["certificate"]["holds"].get<bool>());
    EXPECT_FALSE(run["trajectory"].empty());
  }
  std::filesystem::remove(path);
}

TEST(Cli, PartitionOracleCertificatesHold)
{
  auto const path = temp_path("k_oracle.json");
  auto r = run("select --problem k-entropy --algorithm gen-distorted --d 4 --V \"1,2|3,4\" --oracle " + path);
  ASSERT_EQ(r.code, 0);
  std::ifstream in(path);
  auto doc = nlohmann::json::parse(in);
  for (auto const &run : doc["runs"])
  {
    EXPECT_TRUE(run["certificate"]["holds"].get<bool>());
  }
  std::filesystem::remove(path);
}

TEST(Cli, GeneralizedKEntropyRow)
{
  auto r = run("select --problem k-entropy --algorithm gen-distorted --m 3 --V \"1,2,3,4|5,6,7|8,9,10\"");
  ASSERT_EQ(r.code, 0);
  auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"m", "S1", "S2", "S3", "value"}));
  EXPECT_EQ(rows[1][1], "1");
  EXPECT_EQ(rows[1][2], "7");
  EXPECT_EQ(rows[1][3], "10");
  EXPECT_NEAR(std::stod(rows[1][4]), 0.86152, 1e-4);
}

TEST(Cli, BatchApproaches)
{
  auto r1 = run("select --problem dist2stat-monotone --algorithm batch --m 1");
  ASSERT_EQ(r1.code, 0);
  EXPECT_NEAR(std::stod(parse_csv(r1.out)[1][2]), 0.40245, 1e-4);
  auto r2 = run("select --problem dist2stat-monotone --algorithm batch --m 2 --batch-sizes pairs");
  ASSERT_EQ(r2.code, 0);
  auto rows = parse_csv(r2.out);
  EXPECT_EQ(rows[1][1], "5;6");
  EXPECT_NEAR(std::stod(rows[1][2]), 0.80739, 1e-4);
  auto r3 = run("select --problem dist2stat-monotone --algorithm batch --batch-sizes 2,1");
  ASSERT_EQ(r3.code, 0);
  EXPECT_EQ(parse_csv(r3.out)[1][0], "3");
}

TEST(Cli, FixedSetAndLocalSearch)
{
  auto r = run("select --problem dist2fact-fixed --W 1,2,3 --m 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(std::stod(parse_csv(r.out)[1][2]), 0.02751, 1e-4);
  auto ls = run("select --problem dist2fact --algorithm local-search --d 6 --epsilon 0.1");
  ASSERT_EQ(ls.code, 0);
  EXPECT_EQ(parse_csv(ls.out).size(), 2u);
}

TEST(Cli, DeterministicOutput)
{
  auto const args = std::string("select --problem k-dist2fact --algorithm gen-distorted --d 6 --V \"1,2,3|4,5,6\"");
  auto a = run(args);
  auto b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, TimingColumnAndSvg)
{
  auto const svg = temp_path("plot.svg");
  auto r = run("select --problem entropy --d 4 --timing --svg " + svg);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(parse_csv(r.out)[0].back(), "seconds");
  EXPECT_TRUE(std::filesystem::exists(svg));
  std::filesystem::remove(svg);
}

TEST(Cli, ExitCodes)
{
  EXPECT_EQ(run("select --problem entropy --bogus").code, 2);
  EXPECT_EQ(run("select").code, 2);
  EXPECT_EQ(run("select --problem nope").code, 2);
  EXPECT_EQ(run("select --problem dist2indp --m 1").code, 2);
  EXPECT_EQ(run("select --problem entropy --model file --chain /nonexistent.json").code, 3);
  EXPECT_EQ(run("select --problem entropy --d 14").code, 4);
  EXPECT_EQ(run("select --problem k-entropy --algorithm greedy").code, 2);
}

TEST(Cli, ProductFormGateAndHeuristic)
{
  EXPECT_EQ(run("select --problem dist2stat-product-form --d 4").code, 2);
  EXPECT_EQ(run("select --problem dist2stat-product-form --d 4 --algorithm distorted --heuristic").code, 0);
}

TEST(Cli, MixingStudy)
{
  auto r = run("mcmc --d 8 --n-max 12");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(key_value(r.out, "i_star"), "4");
  EXPECT_NEAR(std::stod(key_value(r.out, "tv_P_n10")), 0.22, 0.005);
  EXPECT_NEAR(std::stod(key_value(r.out, "tv_factorized_n10")), 0.19, 0.005);
  std::size_t curve_rows = 0;
  for (auto const &row : parse_csv(r.out))
  {
    curve_rows += row.size() == 3 && row[0] != "i" ? 1 : 0;
  }
  EXPECT_EQ(curve_rows, 8u * 13u);
}

TEST(Cli, MixingStudySampling)
{
  auto a = run("mcmc --d 4 --samples 1000 --seed 7 --n-max 2");
  auto b = run("mcmc --d 4 --samples 1000 --seed 7 --n-max 2");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(key_value(a.out, "empirical_tv_P").empty());
}

TEST(Cli, MixingStudyOnStationaryKernel)
{
  Distribution pi(ProductStateSpace({2, 2}), {0.1, 0.2, 0.3, 0.4});
  auto const path = temp_path("rank_one.json");
  save_chain(path, TransitionMatrix::rank_one(pi), &pi);
  auto r = run("mcmc --model file --chain " + path + " --n-min 1 --n-max 5");
  ASSERT_EQ(r.code, 0);
  for (auto const &row : parse_csv(r.out))
  {
    if (row.size() == 3 && row[0] != "i")
    {
      EXPECT_DOUBLE_EQ(std::stod(row[2]), 0.0);
    }
  }
  std::filesystem::remove(path);
}

TEST(Cli, Validate)
{
  auto [p, pi] = curie_weiss_chain({4, 10.0, 1.0});
  auto const good = temp_path("cw4.json");
  save_chain(good, p, &pi);
  auto r = run("validate " + good);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("ok"), std::string::npos);

  auto const bad = temp_path("bad.json");
  std::ofstream(bad) << "{\"dims\": [2], \"transition\": [[0.5, 0.5]";
  EXPECT_EQ(run("validate " + bad).code, 3);
  std::ofstream(bad) << R"({"dims": [2], "transition": [[0.5, 0.4], [0.5, 0.5]]})";
  EXPECT_EQ(run("validate " + bad).code, 3);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}
