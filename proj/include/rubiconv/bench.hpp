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

#ifndef RUBICONV_BENCH_HPP_
#define RUBICONV_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rubiconv::bench {

enum class Algo {
  kRubiConv,          // plan construction + convolution
  kRubiConvConvOnly,  // convolution with a prebuilt plan
  kCooleyTukey,
  kFullMatrix,
  kNaive,
};

std::string_view to_string(Algo algo);
// Accepts rubiconv, rubiconv-conv-only, ct, full-matrix, naive.
Algo parse_algo(std::string_view name);

// Empirical document-length distribution; every length is >= 1.
struct DocLenDistribution {
  std::vector<std::size_t> lengths;

  // One positive decimal integer per line; blank lines are ignored.
  static DocLenDistribution parse(std::istream& in);
  static DocLenDistribution load(const std::string& path);
};

struct DocLenSource {
  enum class Kind { kFixed, kFile, kGeometric };
  Kind kind = Kind::kGeometric;
  std::size_t n_docs = 1;  // kFixed
  std::string path;        // kFile
  double mean = 1024.0;    // kGeometric
};

// Draws lengths uniformly from `dist` until the running sum reaches
// target_total; the final document is cut so the total is exact.
std::vector<std::size_t> sample_packing(const DocLenDistribution& dist,
                                        std::size_t target_total,
                                        std::uint64_t seed);

// Same greedy fill with lengths drawn from a geometric law of mean `mean`
// (support starting at 1).
std::vector<std::size_t> geometric_packing(double mean, std::size_t target_total,
                                           std::uint64_t seed);

// n_docs near-equal documents; the first (target % n_docs) are one longer.
std::vector<std::size_t> fixed_packing(std::size_t n_docs,
                                       std::size_t target_total);

std::vector<std::size_t> make_packing(const DocLenSource& source,
                                      std::size_t target_total,
                                      std::uint64_t seed);

struct KChoice {
  enum class Kind { kFixed, kAuto, kSqrt };
  Kind kind = Kind::kFixed;
  std::size_t value = 256;

  // "<int>", "auto" or "sqrt".
  static KChoice parse(std::string_view text);
  std::string to_string() const;
};

// auto: 256 up to 2^15 tokens, 512 beyond; sqrt: ceil(sqrt(L_total)).
std::size_t resolve_k(const KChoice& choice, std::size_t total_len);

struct BenchConfig {
  Algo algo = Algo::kRubiConv;
  std::size_t seq_len = 4096;
  std::size_t model_dim = 64;
  std::size_t filter_len = 64;  // 0: same as seq_len
  KChoice k;
  std::uint64_t seed = 0;
  std::size_t trials = 5;
  std::size_t warmup = 5;
  DocLenSource doclens;
  // Report counts only: no oracle gate, no timing.
  bool count_only = false;
  // Budget for the quadratic baselines, in real multiply-adds per run.
  std::uint64_t max_work = std::uint64_t{1} << 32;
  // Block entries allowed for full-matrix (and twiddle entries for ct).
  std::uint64_t max_entries = std::uint64_t{1} << 28;

  std::size_t effective_filter_len() const {
    return filter_len == 0 ? seq_len : filter_len;
  }
  // Throws std::invalid_argument if a dimension or trial count is out of
  // range.
  void validate() const;
};

struct BenchRow {
  Algo algo = Algo::kRubiConv;
  std::size_t total_len = 0;
  std::size_t model_dim = 0;
  std::size_t filter_len = 0;
  std::size_t k = 0;
  std::size_t n_docs = 0;
  std::optional<double> mean_ms;
  std::optional<double> ci95_ms;
  std::uint64_t complex_muls = 0;
  double pad_ratio = 1.0;
  std::string status;
};

inline constexpr double kOracleTolerance = 1e-8;

class OracleMismatch : public std::runtime_error {
 public:
  OracleMismatch(const std::string& what, double max_error)
      : std::runtime_error(what), max_error_(max_error) {}
  double max_error() const { return max_error_; }

 private:
  double max_error_;
};

// Runs one configuration: oracle gate in single-threaded mode, then warmup
// and timed trials. Throws OracleMismatch if the gate fails.
BenchRow run_bench(const BenchConfig& config);

// Relative L-infinity error max|a - b| / max|b|.
double relative_error(const std::vector<double>& actual,
                      const std::vector<double>& expected);

// Parameter sweep: "seq-len", "model-dim", "filter-len", "k", "algo" or
// "seed" with a comma separated value list. Multiple sweeps combine as a
// cartesian product, in the order given.
struct Sweep {
  std::string param;
  std::vector<std::string> values;

  // "<param>=<v1>,<v2>,..."
  static Sweep parse(std::string_view text);
};

std::vector<BenchConfig> expand(const BenchConfig& base,
                                const std::vector<Sweep>& sweeps);

inline constexpr std::string_view kCsvHeader =
    "algo,L_total,D,L_F,k,n_docs,mean_ms,ci95_ms,complex_muls,pad_ratio,status";

std::string to_csv(const BenchRow& row);

}  // namespace rubiconv::bench

#endif  // RUBICONV_BENCH_HPP_
