/* Copyright 2026 The rubiconv Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Benchmark runner: times each algorithm on identical packed inputs and writes
// one CSV row per configuration.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rubiconv/bench.hpp"

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    out.push_back(text.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace rubiconv::bench;

  CLI::App app{"Boundary-respecting packed convolution benchmark"};
  std::string algos = "rubiconv";
  std::string filter_len = "64";
  std::string k = "256";
  std::string doclens;
  std::size_t fixed_docs = 0;
  double geometric_mean = 0.0;
  std::vector<std::string> sweeps;
  std::string out_path;
  BenchConfig base;

  app.add_option("--algo", algos,
                 "Comma separated: rubiconv, rubiconv-conv-only, ct, "
                 "full-matrix, naive")
      ->capture_default_str();
  app.add_option("--seq-len", base.seq_len, "Packed length L_total")
      ->capture_default_str();
  app.add_option("--model-dim", base.model_dim, "Channels D")
      ->capture_default_str();
  app.add_option("--filter-len", filter_len, "Filter taps L_F, or L for L_total")
      ->capture_default_str();
  app.add_option("--k", k, "Grid rows: integer, auto or sqrt")
      ->capture_default_str();
  app.add_option("--seed", base.seed, "Seed for packing and data")
      ->capture_default_str();
  app.add_option("--trials", base.trials, "Timed trials")->capture_default_str();
  app.add_option("--warmup", base.warmup, "Untimed warmup runs")
      ->capture_default_str();
  auto* doclen_opt =
      app.add_option("--doclens", doclens, "Document length file, one per line");
  auto* fixed_opt =
      app.add_option("--fixed-docs", fixed_docs, "Split L_total into n documents");
  auto* geo_opt = app.add_option("--geometric-mean", geometric_mean,
                                 "Geometric document lengths with this mean");
  doclen_opt->excludes(fixed_opt)->excludes(geo_opt);
  fixed_opt->excludes(geo_opt);
  app.add_option("--sweep", sweeps, "param=v1,v2,... (repeatable)");
  app.add_option("--out", out_path, "CSV output path (default stdout)");
  app.add_flag("--count-only", base.count_only,
               "Report multiplication counts without the oracle gate or timing");
  app.add_option("--max-work", base.max_work,
                 "Multiply-add budget per run for the quadratic baselines")
      ->capture_default_str();
  app.add_option("--max-entries", base.max_entries,
                 "Entry budget for materialized operators and twiddle caches")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  std::vector<BenchConfig> configs;
  try {
    base.filter_len = filter_len == "L" ? 0 : std::stoull(filter_len);
    base.k = KChoice::parse(k);
    if (!doclens.empty()) {
      base.doclens.kind = DocLenSource::Kind::kFile;
      base.doclens.path = doclens;
    } else if (*fixed_opt) {
      base.doclens.kind = DocLenSource::Kind::kFixed;
      base.doclens.n_docs = fixed_docs;
    } else if (*geo_opt) {
      base.doclens.kind = DocLenSource::Kind::kGeometric;
      base.doclens.mean = geometric_mean;
    }
    std::vector<Sweep> parsed{Sweep{"algo", split_commas(algos)}};
    for (const std::string& s : sweeps) parsed.push_back(Sweep::parse(s));
    configs = expand(base, parsed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot write " << out_path << '\n';
      return 2;
    }
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  out << kCsvHeader << '\n';

  for (const BenchConfig& config : configs) {
    try {
      out << to_csv(run_bench(config)) << '\n' << std::flush;
    } catch (const OracleMismatch& e) {
      std::cerr << "oracle gate failed: " << e.what() << '\n';
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return 0;
}
