// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//
// dkmips command-line front end.
//
//   dkmips query   --data P --queries Q --algo greedy --mode max --k 10 ...
//   dkmips verify  [--n 10 --k 3 --count 200 --seed 42]
//   dkmips bench   --data P --queries Q --algos linear,bc-greedy ...
//   dkmips convert --input a.csv --output a.bin
//
// Exit codes: 0 ok, 1 a verification suite failed, 2 usage or parameter
// error, 3 I/O or load error, 4 brute-force guard refusal.
//

#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dkmips/dkmips.hpp"
#include "json.hpp"

namespace dkmips::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kUsage = 2,
  kIo = 3,
  kGuard = 4,
};

struct DataFlags {
  std::string data;
  std::string data_format;  // empty: from extension
  std::string queries;
  std::string queries_format;
  bool allow_negative = false;
};

inline void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--data", f.data, "item vectors (.csv or binary)")->required();
  cmd->add_option("--data-format", f.data_format, "bin or csv");
  cmd->add_option("--queries", f.queries, "query vectors (.csv or binary)")
      ->required();
  cmd->add_option("--queries-format", f.queries_format, "bin or csv");
  cmd->add_flag("--allow-negative", f.allow_negative,
                "accept negative coordinates (tree bounds become unsound)");
}

inline VectorFormat resolve_format(const std::string& flag,
                                   const std::string& path) {
  if (flag.empty()) return format_from_path(path);
  if (auto f = parse_format(flag)) return *f;
  throw ParamError("unknown vector format '" + flag + "'");
}

inline Mode resolve_mode(const std::string& s) {
  if (auto m = parse_mode(s)) return *m;
  throw ParamError("unknown mode '" + s + "' (expected avg or max)");
}

inline Algorithm resolve_algo(const std::string& s) {
  if (auto a = parse_algorithm(s)) return *a;
  throw ParamError("unknown algorithm '" + s +
                   "' (expected linear, greedy, dual, bc-greedy or bc-dual)");
}

struct LoadedData {
  ItemMatrix items;
  std::vector<QueryVector> queries;
};

inline LoadedData load_data(const DataFlags& f) {
  ItemMatrix items = load_items(f.data, resolve_format(f.data_format, f.data),
                                !f.allow_negative);
  auto queries = load_queries(f.queries,
                              resolve_format(f.queries_format, f.queries),
                              items.dim());
  return {std::move(items), std::move(queries)};
}

inline void warn_unsound(const DataFlags& f, const std::vector<Algorithm>& algos,
                         std::ostream& err) {
  if (!f.allow_negative) return;
  for (Algorithm a : algos) {
    if (uses_tree(a)) {
      err << "warning: --allow-negative with " << algorithm_name(a)
          << ": tree bounds assume non-negative data and may prune the best "
             "item\n";
    }
  }
}

// ---------------------------------------------------------------------------

struct QueryFlags {
  DataFlags data;
  std::vector<std::string> algos{"greedy"};
  std::string mode = "avg";
  std::size_t k = 10;
  double lambda = 0.5;
  std::optional<double> mu;
  std::size_t leaf_size = kDefaultLeafSize;
  std::uint64_t seed = kDefaultSeed;
  std::string output;  // empty: stdout
};

inline int cmd_query(const QueryFlags& f, std::ostream& out,
                     std::ostream& err) {
  std::vector<Algorithm> algos;
  for (const auto& s : f.algos) algos.push_back(resolve_algo(s));
  const Mode mode = resolve_mode(f.mode);
  const SearchParams params{f.k, f.lambda, f.mu.value_or(default_mu(mode)),
                            mode};
  params.validate();
  warn_unsound(f.data, algos, err);

  const LoadedData in = load_data(f.data);
  std::optional<BcTree> tree;
  if (std::any_of(algos.begin(), algos.end(), uses_tree)) {
    tree.emplace(BcTree::build(in.items, f.leaf_size, f.seed));
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!f.output.empty()) {
    file.open(f.output, std::ios::app);
    if (!file) throw LoadError(f.output + ": cannot open for appending");
    sink = &file;
  }

  for (std::size_t qi = 0; qi < in.queries.size(); ++qi) {
    for (Algorithm algo : algos) {
      const auto t0 = std::chrono::steady_clock::now();
      const ResultSet res =
          solve(algo, in.items, tree ? &*tree : nullptr, in.queries[qi], params);
      const auto t1 = std::chrono::steady_clock::now();
      nlohmann::json rec = {
          {"query_id", qi},
          {"algo", algorithm_name(algo)},
          {"mode", mode_name(mode)},
          {"k", params.k},
          {"lambda", params.lambda},
          {"mu", params.mu},
          {"items", res.items},
          {"objective", res.objective},
          {"time_ms",
           std::chrono::duration<double, std::milli>(t1 - t0).count()},
      };
      if (uses_tree(algo)) {
        rec["items_scanned"] = res.stats.items_scanned;
        rec["items_pruned_ball"] = res.stats.items_pruned_ball;
        rec["items_pruned_cone"] = res.stats.items_pruned_cone;
        rec["nodes_pruned"] = res.stats.nodes_pruned;
      }
      *sink << rec.dump() << '\n';
    }
  }
  sink->flush();
  if (!*sink) throw LoadError("failed writing query results");
  return kOk;
}

// ---------------------------------------------------------------------------

inline int cmd_verify(const VerifyConfig& cfg, std::ostream& out) {
  const auto reports = run_verify(cfg);
  bool all = true;
  for (const SuiteReport& r : reports) {
    all = all && r.passed();
    out << std::left << std::setw(18) << r.name << " "
        << (r.passed() ? "PASS" : "FAIL") << "  checked=" << r.checked
        << " failed=" << r.failed << " skipped=" << r.skipped
        << " worst_slack=" << std::setprecision(6) << r.worst_slack;
    if (r.failed) out << "  first: " << r.first_failure;
    out << '\n';
  }
  out << (all ? "all suites passed" : "verification FAILED") << '\n';
  return all ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------

struct BenchFlags {
  DataFlags data;
  std::vector<std::string> algos{"linear", "bc-greedy"};
  std::vector<std::string> modes{"avg"};
  std::vector<double> lambdas{0.5};
  std::vector<std::size_t> ks{10};
  std::optional<double> mu;
  std::size_t repetitions = 1;
  std::string categories;
  std::string ratings;
  std::string output;
  std::size_t leaf_size = kDefaultLeafSize;
  std::uint64_t seed = kDefaultSeed;
};

inline int cmd_bench(const BenchFlags& f, std::ostream& out,
                     std::ostream& err) {
  BenchGrid grid;
  grid.algos.clear();
  for (const auto& s : f.algos) grid.algos.push_back(resolve_algo(s));
  grid.modes.clear();
  for (const auto& s : f.modes) grid.modes.push_back(resolve_mode(s));
  grid.lambdas = f.lambdas;
  grid.ks = f.ks;
  grid.mu = f.mu;
  grid.repetitions = f.repetitions;
  grid.leaf_size = f.leaf_size;
  grid.seed = f.seed;
  warn_unsound(f.data, grid.algos, err);
  if (f.categories.empty() != f.ratings.empty()) {
    throw ParamError("--categories and --ratings must be given together");
  }

  const LoadedData in = load_data(f.data);
  std::optional<CategoryMap> cats;
  std::optional<RatingsTable> ratings;
  QualityInputs quality;
  if (!f.categories.empty()) {
    cats = load_categories(f.categories, in.items.size());
    ratings = load_ratings(f.ratings, in.items.size());
    quality = {&*cats, &*ratings};
  }

  const auto rows = bench_sweep(in.items, in.queries, grid, quality);
  for (const BenchRow& r : rows) {
    if (r.pcc_nulls || r.cov_nulls) {
      err << "note: " << algorithm_name(r.algo) << "/" << mode_name(r.mode)
          << " lambda=" << r.lambda << " k=" << r.k << ": " << r.pcc_nulls
          << " undefined PCC and " << r.cov_nulls
          << " undefined Cov values excluded from the means\n";
    }
  }

  if (f.output.empty()) {
    write_bench_csv(out, rows, quality.enabled());
  } else {
    std::ofstream file(f.output);
    if (!file) throw LoadError(f.output + ": cannot open for writing");
    write_bench_csv(file, rows, quality.enabled());
    if (!file) throw LoadError(f.output + ": write failed");
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct ConvertFlags {
  std::string input, output, from, to;
};

inline int cmd_convert(const ConvertFlags& f) {
  const RawMatrix m = read_matrix(f.input, resolve_format(f.from, f.input));
  write_matrix(f.output, resolve_format(f.to, f.output), m.n, m.d, m.values);
  return kOk;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Diversity-aware k-maximum inner product search", "dkmips"};
  app.require_subcommand(1);

  QueryFlags qf;
  auto* query = app.add_subcommand("query", "answer queries, one JSONL record "
                                            "per (query, algorithm)");
  add_data_flags(query, qf.data);
  query->add_option("--algo", qf.algos, "linear|greedy|dual|bc-greedy|bc-dual")
      ->delimiter(',');
  query->add_option("--mode", qf.mode, "avg or max");
  query->add_option("--k", qf.k);
  query->add_option("--lambda", qf.lambda);
  query->add_option("--mu", qf.mu, "default 0.05 (avg) / 0.001 (max)");
  query->add_option("--leaf-size", qf.leaf_size);
  query->add_option("--seed", qf.seed);
  query->add_option("--output", qf.output, "JSONL file to append to");

  VerifyConfig vc;
  auto* verify = app.add_subcommand("verify", "run the property suites");
  verify->add_option("--n", vc.n, "brute-force instance size");
  verify->add_option("--k", vc.k, "largest k for brute-force suites");
  verify->add_option("--count", vc.count, "instances per oracle suite");
  verify->add_option("--tree-n", vc.tree_n, "items per tree instance");
  verify->add_option("--tree-builds", vc.tree_builds);
  verify->add_option("--seed", vc.seed);

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "timed parameter sweep, CSV out");
  add_data_flags(bench, bf.data);
  bench->add_option("--algos", bf.algos)->delimiter(',');
  bench->add_option("--modes", bf.modes)->delimiter(',');
  bench->add_option("--lambdas", bf.lambdas)->delimiter(',');
  bench->add_option("--k", bf.ks)->delimiter(',');
  bench->add_option("--mu", bf.mu);
  bench->add_option("--repetitions", bf.repetitions);
  bench->add_option("--categories", bf.categories, "item_id,category_id CSV");
  bench->add_option("--ratings", bf.ratings, "user_id,item_id,rating CSV");
  bench->add_option("--output", bf.output, "CSV report path");
  bench->add_option("--leaf-size", bf.leaf_size);
  bench->add_option("--seed", bf.seed);

  ConvertFlags cf;
  auto* convert = app.add_subcommand("convert", "CSV <-> binary vectors");
  convert->add_option("--input", cf.input)->required();
  convert->add_option("--output", cf.output)->required();
  convert->add_option("--from", cf.from, "bin or csv");
  convert->add_option("--to", cf.to, "bin or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*query) return cmd_query(qf, out, err);
    if (*verify) return cmd_verify(vc, out);
    if (*bench) return cmd_bench(bf, out, err);
    return cmd_convert(cf);
  } catch (const GuardError& e) {
    err << "error: " << e.what() << '\n';
    return kGuard;
  } catch (const LoadError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace dkmips::cli
