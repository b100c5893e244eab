// avgrank: census, densities, class numbers, weighted point counts and the
// average-rank explicit-formula report from the command line.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "avgrank/acceptance.hpp"
#include "avgrank/census.hpp"
#include "avgrank/ec.hpp"
#include "avgrank/hurwitz.hpp"
#include "avgrank/io.hpp"
#include "avgrank/lfunc.hpp"
#include "avgrank/wps.hpp"

namespace fs = std::filesystem;
using namespace avgrank;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_cache_dir() {
  if (const char* env = std::getenv("AVGRANK_CACHE_DIR"); env && *env) return env;
  return "avgrank-cache";
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError("not an integer list: " + s);
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

// Runs fn on the cached census rows when a valid cache exists; a cache that
// fails validation is reported, regenerated and the fresh census used.
template <class Fn>
void with_census(i64 B, const std::string& cache_dir, Fn&& fn) {
  std::optional<CensusRows> rows;
  try {
    rows = load_census_cache(cache_dir, B);
  } catch (const CacheError& e) {
    std::cerr << "avgrank: refusing census cache (" << e.what() << "); regenerating\n";
    write_census_cache(Census(B), cache_dir);
    rows = load_census_cache(cache_dir, B);
  }
  if (rows) {
    fn(*rows);
  } else {
    fn(Census(B));
  }
}

std::vector<LocalCondition> default_conditions() {
  std::vector<LocalCondition> out;
  for (const char* s : {"good", "bad", "multiplicative", "split", "nonsplit", "additive", "I1", "I2", "I3", "II", "III",
                        "IV", "I0*", "I1*", "IV*", "III*", "II*"})
    out.push_back(LocalCondition::parse(s));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elliptic curve census, local densities and average-rank sums"};
  app.require_subcommand(1);

  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string cache_dir = default_cache_dir();
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--cache-dir", cache_dir, "census cache directory (env AVGRANK_CACHE_DIR)");
  };

  // census
  i64 census_B = 0;
  bool census_stdout = false;
  auto* census = app.add_subcommand("census", "materialize the census at height B into the cache");
  census->add_option("--height", census_B, "naive height bound B")->required()->check(CLI::PositiveNumber);
  census->add_flag("--stdout", census_stdout, "write the CSV to stdout instead of the cache");
  add_common(census);

  // density
  i64 density_B = 0;
  std::string density_primes = "5,7,11,13";
  std::vector<std::string> density_conditions;
  bool density_traces = false;
  auto* density = app.add_subcommand("density", "local-condition counts against the predicted densities");
  density->add_option("--height", density_B, "naive height bound B")->required()->check(CLI::PositiveNumber);
  density->add_option("--primes", density_primes, "comma-separated primes >= 5");
  density->add_option("--condition", density_conditions, "condition rows (default: all reduction types)");
  density->add_flag("--traces", density_traces, "add a trace=a row for every a in the Hasse range");
  add_common(density);

  // hurwitz
  std::optional<i64> hurwitz_disc, hurwitz_q;
  auto* hurwitz = app.add_subcommand("hurwitz", "class number and Hurwitz class number, or class-number sums");
  auto* opt_disc = hurwitz->add_option("--disc", hurwitz_disc, "negative discriminant D");
  auto* opt_q = hurwitz->add_option("--q", hurwitz_q, "prime power q = p^n, p >= 5");
  opt_disc->excludes(opt_q);
  hurwitz->require_option(1);

  // wps-count
  std::string wps_weights = "1,1", wps_heights = "10,100,1000";
  auto* wps = app.add_subcommand("wps-count", "points of P(w)(Q) of bounded height against the leading term");
  wps->add_option("--weights", wps_weights, "comma-separated weights");
  wps->add_option("--height", wps_heights, "comma-separated integer heights");
  add_common(wps);

  // avg-rank
  i64 rank_B = 0;
  double rank_nu = 1.0 / 3;
  int rank_degree = 1;
  std::string primes_csv;
  auto* avg = app.add_subcommand("avg-rank", "explicit-formula sums S1, S2 and the rank bound as JSON");
  avg->add_option("--height", rank_B, "naive height bound B")->required()->check(CLI::Range(i64{16}, kMaxCensusHeight));
  avg->add_option("--nu", rank_nu, "support of the test function's transform")->check(CLI::PositiveNumber);
  avg->add_option("--degree", rank_degree, "field degree d")->check(CLI::PositiveNumber);
  avg->add_option("--primes-csv", primes_csv, "write per-prime contributions to this CSV file");
  add_common(avg);

  // constants
  std::string const_weights = "4,6";
  std::optional<i64> const_disc;
  i64 const_h = 1;
  double const_reg = 1.0, const_density = 1.0;
  auto* constants = app.add_subcommand("constants", "leading constant kappa for supplied field invariants");
  constants->add_option("--weights", const_weights, "comma-separated weights");
  constants->add_option("--disc", const_disc, "fundamental discriminant of a quadratic field (omit for Q)");
  constants->add_option("--class-number", const_h, "class number h_K")->check(CLI::PositiveNumber);
  constants->add_option("--regulator", const_reg, "regulator R_K (real quadratic fields)");
  constants->add_option("--density", const_density, "local density factor")->check(CLI::PositiveNumber);

  // verify
  std::vector<int> verify_ids;
  bool verify_json = false;
  auto* verify = app.add_subcommand("verify", "run the acceptance checks");
  verify->add_option("--criterion", verify_ids, "criterion ids to run (default: all)");
  verify->add_flag("--json", verify_json, "machine-readable output");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*census) {
      const Census c(census_B);
      if (census_stdout) {
        write_census_csv(c, std::cout);
      } else {
        const auto h = write_census_cache(c, cache_dir);
        std::cout << census_csv_path(cache_dir, census_B).string() << '\n' << to_json(h).dump() << '\n';
      }
      return 0;
    }

    if (*density) {
      std::vector<LocalCondition> conds;
      for (const auto& s : density_conditions) conds.push_back(LocalCondition::parse(s));
      if (conds.empty()) conds = default_conditions();
      std::vector<i64> primes;
      for (int p : parse_int_list(density_primes)) {
        require_prime_at_least_5(p);
        primes.push_back(p);
      }
      with_census(density_B, cache_dir, [&](const auto& src) {
        std::cout << "p,condition,count,total,empirical,predicted\n";
        std::cout.precision(10);
        for (i64 p : primes) {
          const auto st = local_statistics(src, p, workers);
          auto rows = conds;
          if (density_traces)
            for (i64 a = -hasse_bound(p); a <= hasse_bound(p); ++a) rows.push_back(LocalCondition::trace_equals(static_cast<int>(a)));
          for (const auto& c : rows) {
            const auto cc = count_with_condition(st, c, density_B);
            std::cout << p << ',' << c.name() << ',' << cc.count << ',' << cc.total << ',' << cc.empirical << ','
                      << cc.predicted << '\n';
          }
        }
      });
      return 0;
    }

    if (*hurwitz) {
      nlohmann::json j;
      if (hurwitz_disc) {
        const i64 D = *hurwitz_disc;
        j = {{"D", D}, {"class_number", class_number(D)}, {"H", rational_json(hurwitz_H(D))}};
      } else {
        const auto s = class_number_sums(*hurwitz_q);
        j = {{"q", *hurwitz_q}, {"S0", rational_json(s.S0)}, {"S1", rational_json(s.S1)}, {"S2", rational_json(s.S2)}};
      }
      std::cout << j.dump() << '\n';
      return 0;
    }

    if (*wps) {
      const WeightVector w(parse_int_list(wps_weights));
      const double kappa = leading_constant(w, FieldInvariants::rationals());
      std::cout << "B,count,predicted,ratio\n";
      std::cout.precision(10);
      for (int B : parse_int_list(wps_heights)) {
        if (B < 1) throw UsageError("heights must be >= 1");
        const i64 n = count_points(w, B, {}, workers);
        const double pred = kappa * std::pow(static_cast<double>(B), w.total());
        std::cout << B << ',' << n << ',' << pred << ',' << static_cast<double>(n) / pred << '\n';
      }
      return 0;
    }

    if (*avg) {
      with_census(rank_B, cache_dir, [&](const auto& src) {
        const auto report = explicit_rhs(src, rank_nu, rank_degree, workers);
        std::cout << to_json(report).dump(2) << '\n';
        if (!primes_csv.empty()) {
          std::ofstream os(primes_csv);
          if (!os) throw std::runtime_error("cannot write " + primes_csv);
          os << prime_terms_csv(report);
        }
      });
      return 0;
    }

    if (*constants) {
      const WeightVector w(parse_int_list(const_weights));
      FieldInvariants k = FieldInvariants::rationals();
      if (const_disc) {
        k = *const_disc < 0 ? FieldInvariants::imaginary_quadratic(*const_disc, const_h)
                            : FieldInvariants::real_quadratic(*const_disc, const_h, const_reg);
      }
      k.validate();
      const nlohmann::json j = {{"weights", w.weights()},
                                {"degree", k.degree},
                                {"r1", k.r1},
                                {"r2", k.r2},
                                {"class_number", k.class_number},
                                {"regulator", k.regulator},
                                {"discriminant", k.discriminant},
                                {"roots_of_unity", k.roots_of_unity},
                                {"weighted_roots_of_unity", weighted_roots_of_unity(w, k)},
                                {"zeta_K(|w|)", k.zeta(w.total())},
                                {"density", const_density},
                                {"kappa", leading_constant(w, k, const_density)}};
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*verify) {
      AcceptanceOptions opts;
      opts.workers = workers;
      bool all = true;
      nlohmann::json out = nlohmann::json::array();
      for (const auto& c : acceptance_criteria()) {
        if (!verify_ids.empty() && std::find(verify_ids.begin(), verify_ids.end(), c.id) == verify_ids.end()) continue;
        const auto r = c.run(opts);
        all = all && r.pass;
        if (verify_json) {
          out.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        } else {
          std::cout << format_result(r) << std::endl;
        }
      }
      if (verify_json) std::cout << out.dump(2) << '\n';
      return all ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "avgrank: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    // invalid_argument, domain_error, out_of_range: bad input values
    std::cerr << "avgrank: " << e.what() << '\n';
    return 2;
  } catch (const std::overflow_error& e) {
    std::cerr << "avgrank: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "avgrank: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
