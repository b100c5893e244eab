#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "avgrank/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + AVGRANK_CLI + " " + args + " 2>/dev/null";
  Run r;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
  const int st = pclose(f);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("avgrank_test_cli_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(Cli, Hurwitz) {
  const auto r = run("hurwitz --disc -23");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("class_number"), 3);
  EXPECT_EQ(j.at("H"), "3/2");
  const auto s = nlohmann::json::parse(run("hurwitz --q 13").out);
  EXPECT_EQ(s.at("S0"), "13/1");
  EXPECT_EQ(s.at("S1"), "0/1");
  EXPECT_EQ(s.at("S2"), "168/1");
}

TEST(Cli, AvgRank) {
  const fs::path dir = fresh_dir("avg");
  const auto r = run("avg-rank --height 100000 --workers 1 --cache-dir " + dir.string());
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("formula_bound"), 3.5);
  EXPECT_LT(j.at("S2").get<double>(), 0);
  EXPECT_EQ(nlohmann::json::parse(run("avg-rank --height 100000 --degree 2 --nu 0.16666666666 --cache-dir " + dir.string()).out)
                .at("formula_bound"),
            6.5);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("avg-rank --height 10").status, 2);
  EXPECT_EQ(run("avg-rank --height banana").status, 2);
  EXPECT_EQ(run("hurwitz --disc 5").status, 2);
  EXPECT_EQ(run("density --height 1000 --primes 4").status, 2);
  EXPECT_EQ(run("density --height 1000 --condition V").status, 2);
  EXPECT_EQ(run("census --height 2000000000000 --stdout").status, 2);
  EXPECT_EQ(run("wps-count --weights 1,x").status, 2);
}

TEST(Cli, DensityRegeneratesCorruptCache) {
  const fs::path dir = fresh_dir("density");
  ASSERT_EQ(run("census --height 10000 --cache-dir " + dir.string()).status, 0);
  const auto clean = run("density --height 10000 --primes 5,7 --cache-dir " + dir.string());
  ASSERT_EQ(clean.status, 0);
  EXPECT_EQ(clean.out.rfind("p,condition,count,total,empirical,predicted\n", 0), 0u);

  const auto csv = avgrank::census_csv_path(dir, 10000);
  {
    std::fstream f(csv, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('#');
  }
  const auto regenerated = run("density --height 10000 --primes 5,7 --cache-dir " + dir.string());
  ASSERT_EQ(regenerated.status, 0);
  EXPECT_EQ(regenerated.out, clean.out);
  EXPECT_TRUE(avgrank::load_census_cache(dir, 10000).has_value());

  const auto uncached = run("density --height 10000 --primes 5,7 --cache-dir " + fresh_dir("density_none").string());
  EXPECT_EQ(uncached.out, clean.out);
}

TEST(Cli, CensusStdoutMatchesCache) {
  const fs::path dir = fresh_dir("stdout");
  ASSERT_EQ(run("census --height 5000 --cache-dir " + dir.string()).status, 0);
  const auto r = run("census --height 5000 --stdout");
  std::ifstream is(avgrank::census_csv_path(dir, 5000), std::ios::binary);
  const std::string file((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  EXPECT_EQ(r.out, file);
}

TEST(Cli, DeterministicAcrossWorkers) {
  const fs::path a = fresh_dir("w1"), b = fresh_dir("w4");
  const auto one = run("avg-rank --height 200000 --workers 1 --cache-dir " + a.string());
  const auto four = run("avg-rank --height 200000 --workers 4 --cache-dir " + b.string());
  ASSERT_EQ(one.status, 0);
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(run("density --height 200000 --workers 1 --traces --cache-dir " + a.string()).out,
            run("density --height 200000 --workers 3 --traces --cache-dir " + b.string()).out);
}

TEST(Cli, WpsCountAndConstants) {
  const auto r = run("wps-count --weights 1,1 --height 10,100");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("B,count,predicted,ratio\n", 0), 0u);
  const auto c = nlohmann::json::parse(run("constants --weights 4,6 --disc -4").out);
  EXPECT_NEAR(c.at("kappa").get<double>(), 4.929982046619887, 1e-9);
}
