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

#include "rubiconv/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rubiconv/cooley_tukey.hpp"
#include "rubiconv/direct.hpp"
#include "rubiconv/rubiconv.hpp"

namespace rubiconv::bench {

namespace {

std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument(std::string(what) + ": '" + std::string(text) +
                                "' is not a non-negative integer");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Greedy fill shared by every random source.
template <typename Draw>
std::vector<std::size_t> greedy_fill(std::size_t target_total, Draw draw) {
  if (target_total == 0) {
    throw std::invalid_argument("packing: target length must be >= 1");
  }
  std::vector<std::size_t> docs;
  std::size_t sum = 0;
  while (sum < target_total) {
    const std::size_t len = draw();
    if (sum + len >= target_total) {
      docs.push_back(target_total - sum);
      break;
    }
    docs.push_back(len);
    sum += len;
  }
  return docs;
}

struct Inputs {
  std::vector<std::size_t> docs;
  PackedSignal x;
  FilterBank f;
};

// Identical for every algorithm given (seed, L, D, L_F, doc source).
Inputs make_inputs(const BenchConfig& config) {
  Inputs in;
  in.docs = make_packing(config.doclens, config.seq_len, config.seed);
  const std::size_t d = config.model_dim;
  const std::size_t taps = config.effective_filter_len();
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<double> xv(config.seq_len * d);
  for (double& v : xv) v = uniform(rng);
  std::vector<double> fv(taps * d);
  for (double& v : fv) v = uniform(rng);
  in.x = PackedSignal(config.seq_len, d, std::move(xv));
  in.f = FilterBank(taps, d, std::move(fv));
  return in;
}

class ScopedThreads {
 public:
  explicit ScopedThreads([[maybe_unused]] int threads) {
#ifdef _OPENMP
    saved_ = omp_get_max_threads();
    omp_set_num_threads(threads);
#endif
  }
  ~ScopedThreads() {
#ifdef _OPENMP
    omp_set_num_threads(saved_);
#endif
  }
  ScopedThreads(const ScopedThreads&) = delete;
  ScopedThreads& operator=(const ScopedThreads&) = delete;

 private:
#ifdef _OPENMP
  int saved_ = 1;
#endif
};

bool is_rubiconv(Algo algo) {
  return algo == Algo::kRubiConv || algo == Algo::kRubiConvConvOnly;
}

}  // namespace

std::string_view to_string(Algo algo) {
  switch (algo) {
    case Algo::kRubiConv:
      return "rubiconv";
    case Algo::kRubiConvConvOnly:
      return "rubiconv-conv-only";
    case Algo::kCooleyTukey:
      return "ct";
    case Algo::kFullMatrix:
      return "full-matrix";
    case Algo::kNaive:
      return "naive";
  }
  return "unknown";
}

Algo parse_algo(std::string_view name) {
  for (const Algo algo : {Algo::kRubiConv, Algo::kRubiConvConvOnly,
                          Algo::kCooleyTukey, Algo::kFullMatrix, Algo::kNaive}) {
    if (to_string(algo) == name) return algo;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

DocLenDistribution DocLenDistribution::parse(std::istream& in) {
  DocLenDistribution dist;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const std::size_t len =
        parse_count(text, "doclen line " + std::to_string(line_no));
    if (len == 0) {
      throw std::invalid_argument("doclen line " + std::to_string(line_no) +
                                  ": length must be >= 1");
    }
    dist.lengths.push_back(len);
  }
  if (dist.lengths.empty()) {
    throw std::invalid_argument("doclen distribution is empty");
  }
  return dist;
}

DocLenDistribution DocLenDistribution::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open doclen file '" + path + "'");
  return parse(in);
}

std::vector<std::size_t> sample_packing(const DocLenDistribution& dist,
                                        std::size_t target_total,
                                        std::uint64_t seed) {
  if (dist.lengths.empty()) {
    throw std::invalid_argument("sample_packing: empty distribution");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, dist.lengths.size() - 1);
  return greedy_fill(target_total, [&] { return dist.lengths[pick(rng)]; });
}

std::vector<std::size_t> geometric_packing(double mean, std::size_t target_total,
                                           std::uint64_t seed) {
  if (!(mean >= 1.0)) {
    throw std::invalid_argument("geometric_packing: mean must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::geometric_distribution<std::size_t> draw(1.0 / mean);
  return greedy_fill(target_total, [&] { return draw(rng) + 1; });
}

std::vector<std::size_t> fixed_packing(std::size_t n_docs,
                                       std::size_t target_total) {
  if (n_docs == 0 || n_docs > target_total) {
    throw std::invalid_argument(
        "fixed_packing: need 1 <= n_docs <= target length");
  }
  std::vector<std::size_t> docs(n_docs, target_total / n_docs);
  for (std::size_t i = 0; i < target_total % n_docs; ++i) ++docs[i];
  return docs;
}

std::vector<std::size_t> make_packing(const DocLenSource& source,
                                      std::size_t target_total,
                                      std::uint64_t seed) {
  switch (source.kind) {
    case DocLenSource::Kind::kFixed:
      return fixed_packing(source.n_docs, target_total);
    case DocLenSource::Kind::kFile:
      return sample_packing(DocLenDistribution::load(source.path),
                            target_total, seed);
    case DocLenSource::Kind::kGeometric:
      return geometric_packing(source.mean, target_total, seed);
  }
  throw std::invalid_argument("unknown doclen source");
}

KChoice KChoice::parse(std::string_view text) {
  if (text == "auto") return {Kind::kAuto, 0};
  if (text == "sqrt") return {Kind::kSqrt, 0};
  const std::size_t k = parse_count(text, "k");
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  return {Kind::kFixed, k};
}

std::string KChoice::to_string() const {
  switch (kind) {
    case Kind::kAuto:
      return "auto";
    case Kind::kSqrt:
      return "sqrt";
    case Kind::kFixed:
      break;
  }
  return std::to_string(value);
}

std::size_t resolve_k(const KChoice& choice, std::size_t total_len) {
  switch (choice.kind) {
    case KChoice::Kind::kFixed:
      return choice.value;
    case KChoice::Kind::kAuto:
      return total_len <= (std::size_t{1} << 15) ? 256 : 512;
    case KChoice::Kind::kSqrt: {
      auto k = static_cast<std::size_t>(std::sqrt(static_cast<double>(total_len)));
      while (k * k < total_len) ++k;
      while (k > 1 && (k - 1) * (k - 1) >= total_len) --k;
      return std::max<std::size_t>(k, 1);
    }
  }
  return choice.value;
}

void BenchConfig::validate() const {
  if (seq_len == 0 || model_dim == 0) {
    throw std::invalid_argument("seq-len and model-dim must be >= 1");
  }
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (k.kind == KChoice::Kind::kFixed && k.value == 0) {
    throw std::invalid_argument("k must be >= 1");
  }
}

double relative_error(const std::vector<double>& actual,
                      const std::vector<double>& expected) {
  if (actual.size() != expected.size()) {
    throw std::invalid_argument("relative_error: size mismatch");
  }
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    diff = std::max(diff, std::abs(actual[i] - expected[i]));
    scale = std::max(scale, std::abs(expected[i]));
  }
  if (scale == 0.0) return diff;
  return diff / scale;
}

BenchRow run_bench(const BenchConfig& config) {
  config.validate();
  const Inputs in = make_inputs(config);
  const std::size_t dims = config.model_dim;
  const std::size_t taps = config.effective_filter_len();

  BenchRow row;
  row.algo = config.algo;
  row.total_len = config.seq_len;
  row.model_dim = dims;
  row.filter_len = taps;
  row.n_docs = in.docs.size();
  row.status = "ok";

  std::optional<RubiConvPlan> plan;
  std::optional<CtPlan> ct_plan;
  std::string skip;
  switch (config.algo) {
    case Algo::kRubiConv:
    case Algo::kRubiConvConvOnly: {
      row.k = resolve_k(config.k, config.seq_len);
      const PackedLayout layout = build_layout(in.docs, taps, row.k);
      row.complex_muls = convolve_complex_muls(layout, dims);
      row.pad_ratio = static_cast<double>(layout.total_padded) /
                      static_cast<double>(config.seq_len);
      break;
    }
    case Algo::kCooleyTukey: {
      const CtLayout layout = build_ct_layout(in.docs, taps);
      row.complex_muls = ct_convolve_complex_muls(layout, dims);
      row.pad_ratio = static_cast<double>(layout.total) /
                      static_cast<double>(config.seq_len);
      // Twiddle cache holds three complex entries per position and stage,
      // twice the bytes of a real entry.
      if (6 * layout.total * layout.max_log2 > config.max_entries) {
        skip = "skipped:memory-cap";
      }
      break;
    }
    case Algo::kFullMatrix: {
      const std::uint64_t entries = operator_real_muls(in.docs, 1);
      row.complex_muls = operator_real_muls(in.docs, dims);
      if (entries > config.max_entries) {
        skip = "skipped:memory-cap";
      } else if (row.complex_muls > config.max_work) {
        skip = "skipped:work-cap";
      }
      break;
    }
    case Algo::kNaive:
      row.complex_muls = masked_real_muls(in.docs, taps, dims);
      if (row.complex_muls > config.max_work) skip = "skipped:work-cap";
      break;
  }
  if (config.count_only) {
    row.status = "count-only";
    return row;
  }
  if (!skip.empty()) {
    row.status = skip;
    return row;
  }

  if (config.algo == Algo::kRubiConvConvOnly) {
    plan = build_plan(in.docs, taps, row.k);
  } else if (config.algo == Algo::kCooleyTukey) {
    ct_plan = build_ct_plan(build_ct_layout(in.docs, taps));
  }

  const std::function<PackedSignal(OpCounter*)> run = [&](OpCounter* counter) {
    switch (config.algo) {
      case Algo::kRubiConv: {
        const RubiConvPlan fresh = build_plan(in.docs, taps, row.k);
        return convolve(fresh, in.x, in.f, {}, counter);
      }
      case Algo::kRubiConvConvOnly:
        return convolve(*plan, in.x, in.f, {}, counter);
      case Algo::kCooleyTukey:
        return ct_convolve(*ct_plan, in.x, in.f, counter);
      case Algo::kFullMatrix: {
        PackedSignal y(in.x.length, dims);
        for (std::size_t d = 0; d < dims; ++d) {
          const BlockDiagOperator op =
              build_operator(in.docs, in.f.channel(d), BlockMode::kToeplitzLinear,
                             config.max_entries);
          y.set_channel(d, apply(op, in.x.channel(d), counter));
        }
        return y;
      }
      case Algo::kNaive:
        return masked_convolve(in.docs, in.x, in.f, counter);
    }
    throw std::logic_error("unhandled algorithm");
  };

  // Correctness gate before any timing.
  {
    const ScopedThreads serial(1);
    OpCounter counter;
    const PackedSignal y = run(&counter);
    const PackedSignal expected = oracle_convolve(in.docs, in.x, in.f);
    const double err = relative_error(y.values, expected.values);
    if (!(err <= kOracleTolerance)) {
      std::ostringstream msg;
      msg << to_string(config.algo) << " failed the oracle gate at L="
          << config.seq_len << " D=" << dims << " L_F=" << taps
          << ": max relative error " << std::scientific << err;
      throw OracleMismatch(msg.str(), err);
    }
    row.complex_muls = is_rubiconv(config.algo) ||
                               config.algo == Algo::kCooleyTukey
                           ? counter.complex_muls
                           : counter.real_muls;
  }

  for (std::size_t i = 0; i < config.warmup; ++i) run(nullptr);
  std::vector<double> samples;
  samples.reserve(config.trials);
  for (std::size_t i = 0; i < config.trials; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const PackedSignal y = run(nullptr);
    const auto stop = std::chrono::steady_clock::now();
    samples.push_back(
        std::chrono::duration<double, std::milli>(stop - start).count());
  }
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (const double s : samples) mean += s;
  mean /= n;
  double var = 0.0;
  for (const double s : samples) var += (s - mean) * (s - mean);
  const double sd = samples.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  row.mean_ms = mean;
  row.ci95_ms = 1.96 * sd / std::sqrt(n);
  return row;
}

Sweep Sweep::parse(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == text.size()) {
    throw std::invalid_argument("sweep must look like param=v1,v2,...: '" +
                                std::string(text) + "'");
  }
  Sweep sweep;
  sweep.param = std::string(text.substr(0, eq));
  std::string_view rest = text.substr(eq + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view value = trim(rest.substr(0, comma));
    if (value.empty()) throw std::invalid_argument("empty sweep value");
    sweep.values.emplace_back(value);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  static constexpr std::string_view kParams[] = {
      "seq-len", "model-dim", "filter-len", "k", "algo", "seed"};
  if (std::find(std::begin(kParams), std::end(kParams), sweep.param) ==
      std::end(kParams)) {
    throw std::invalid_argument("unknown sweep parameter '" + sweep.param + "'");
  }
  return sweep;
}

std::vector<BenchConfig> expand(const BenchConfig& base,
                                const std::vector<Sweep>& sweeps) {
  std::vector<BenchConfig> configs{base};
  for (const Sweep& sweep : sweeps) {
    std::vector<BenchConfig> next;
    for (const BenchConfig& config : configs) {
      for (const std::string& value : sweep.values) {
        BenchConfig c = config;
        if (sweep.param == "seq-len") {
          c.seq_len = parse_count(value, "seq-len");
        } else if (sweep.param == "model-dim") {
          c.model_dim = parse_count(value, "model-dim");
        } else if (sweep.param == "filter-len") {
          c.filter_len = value == "L" ? 0 : parse_count(value, "filter-len");
        } else if (sweep.param == "k") {
          c.k = KChoice::parse(value);
        } else if (sweep.param == "algo") {
          c.algo = parse_algo(value);
        } else {
          c.seed = parse_count(value, "seed");
        }
        next.push_back(std::move(c));
      }
    }
    configs = std::move(next);
  }
  return configs;
}

std::string to_csv(const BenchRow& row) {
  std::ostringstream out;
  out << to_string(row.algo) << ',' << row.total_len << ',' << row.model_dim
      << ',' << row.filter_len << ',' << row.k << ',' << row.n_docs << ',';
  out << std::fixed << std::setprecision(6);
  if (row.mean_ms) out << *row.mean_ms;
  out << ',';
  if (row.ci95_ms) out << *row.ci95_ms;
  out << ',' << row.complex_muls << ',' << row.pad_ratio << ',' << row.status;
  return out.str();
}

}  // namespace rubiconv::bench
