#pragma once

#include "qrank/bits.hpp"
#include "qrank/quadrank.hpp"
#include "qrank/text.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <concepts>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

namespace qrank::bench {

enum class Mode { Latency, Loop, Prefetch };

inline constexpr std::string_view mode_name(Mode m) noexcept {
  switch (m) {
  case Mode::Latency: return "latency";
  case Mode::Loop: return "loop";
  case Mode::Prefetch: return "prefetch";
  }
  return "?";
}

inline std::optional<Mode> parse_mode(std::string_view s) noexcept {
  for (Mode m : {Mode::Latency, Mode::Loop, Mode::Prefetch}) {
    if (s == mode_name(m)) {
      return m;
    }
  }
  return std::nullopt;
}

/// 1, 6 and 12 threads, capped at the hardware concurrency.
inline std::vector<unsigned> default_thread_counts() {
  unsigned const hw = std::max(1u, std::thread::hardware_concurrency());
  std::vector<unsigned> out;
  for (unsigned t : {1u, 6u, 12u}) {
    unsigned const c = std::min(t, hw);
    if (std::find(out.begin(), out.end(), c) == out.end()) {
      out.push_back(c);
    }
  }
  return out;
}

struct BenchConfig {
  unsigned alphabet = 2;
  std::uint64_t input_bytes = std::uint64_t{1} << 30;
  std::uint64_t query_count = 10'000'000; // per thread
  std::vector<unsigned> threads = default_thread_counts();
  std::vector<Mode> modes{Mode::Latency, Mode::Loop, Mode::Prefetch};
  std::uint64_t prefetch_distance = 32;
  unsigned repeats = 3;
  std::uint64_t seed = 42;

  /// Input that fits in L2.
  static BenchConfig small_input() {
    BenchConfig c;
    c.input_bytes = 128 * 1024;
    return c;
  }

  void validate() const {
    if (alphabet != 2 && alphabet != 4) {
      throw std::invalid_argument("alphabet must be 2 or 4");
    }
    if (query_count == 0) {
      throw std::invalid_argument("query count must be positive");
    }
    if (prefetch_distance == 0) {
      throw std::invalid_argument("prefetch distance must be at least 1");
    }
    if (repeats % 2 == 0) {
      throw std::invalid_argument("repeats must be odd");
    }
    if (threads.empty() || std::find(threads.begin(), threads.end(), 0u) != threads.end()) {
      throw std::invalid_argument("thread counts must be positive");
    }
  }
};

struct BenchRecord {
  std::string structure;
  double overhead = 0;
  Mode mode = Mode::Loop;
  unsigned threads = 1;
  double ns_per_query = 0;
  std::uint64_t checksum = 0;
  std::uint64_t total_bytes = 0;
};

struct RunResult {
  double ns_per_query = 0;
  std::uint64_t checksum = 0;
};

/// Anything answering single-argument rank queries with a prefetch hint.
template <class T>
concept RankQueryable = requires(T const& s, std::uint64_t q) {
  { s.size() } -> std::convertible_to<std::uint64_t>;
  { s.rank(q) } -> std::convertible_to<std::uint64_t>;
  { s.size_in_bytes() } -> std::convertible_to<std::uint64_t>;
  s.prefetch(q);
};

/// Benchmarks QuadRank::rank with the symbol taken from the low query bits.
template <class Q>
class QuadRank1Adapter {
public:
  explicit QuadRank1Adapter(Q const& q) : q_(&q) {}
  [[nodiscard]] std::uint64_t size() const noexcept { return q_->size(); }
  [[nodiscard]] std::uint64_t size_in_bytes() const noexcept { return q_->size_in_bytes(); }
  [[nodiscard]] std::uint64_t rank(std::uint64_t q) const noexcept { return q_->rank(q, q & 3); }
  void prefetch(std::uint64_t q) const noexcept { q_->prefetch(q); }

private:
  Q const* q_;
};

/// Benchmarks QuadRank::rank4; the four counts are folded into one value.
template <class Q>
class QuadRank4Adapter {
public:
  explicit QuadRank4Adapter(Q const& q) : q_(&q) {}
  [[nodiscard]] std::uint64_t size() const noexcept { return q_->size(); }
  [[nodiscard]] std::uint64_t size_in_bytes() const noexcept { return q_->size_in_bytes(); }
  [[nodiscard]] std::uint64_t rank(std::uint64_t q) const noexcept {
    Ranks4 const r = q_->rank4(q);
    return r[0] + 2 * r[1] + 3 * r[2] + 4 * r[3];
  }
  void prefetch(std::uint64_t q) const noexcept { q_->prefetch(q); }

private:
  Q const* q_;
};

inline BitText gen_bit_input(std::uint64_t seed, std::uint64_t bytes) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> words((bytes + 7) / 8);
  for (auto& w : words) {
    w = rng();
  }
  return BitText::from_words(std::move(words), 8 * bytes);
}

inline QuadText gen_quad_input(std::uint64_t seed, std::uint64_t bytes) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> words((bytes + 7) / 8);
  for (auto& w : words) {
    w = rng();
  }
  return QuadText::from_words(std::move(words), 4 * bytes);
}

/// `count` positions uniform in [0, n].
inline std::vector<std::uint64_t> make_queries(std::uint64_t seed, std::uint64_t count, std::uint64_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> dist(0, n);
  std::vector<std::uint64_t> out(count);
  for (auto& q : out) {
    q = dist(rng);
  }
  return out;
}

/// Seed of worker t's query stream; independent of the worker count.
inline constexpr std::uint64_t thread_seed(std::uint64_t seed, unsigned t) noexcept {
  return seed * 0x9E3779B97F4A7C15ull + t + 1;
}

namespace detail {

template <class F>
double time_ns(F&& f) {
  auto const t0 = std::chrono::steady_clock::now();
  f();
  auto const t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::nano>(t1 - t0).count();
}

inline void require_queries(std::span<std::uint64_t const> queries) {
  if (queries.empty()) {
    throw std::invalid_argument("no queries to run");
  }
}

} // namespace detail

/// Each query position is offset by the previous answer, so every query waits
/// for the one before it.
template <RankQueryable S>
RunResult run_latency(S const& s, std::span<std::uint64_t const> queries) {
  detail::require_queries(queries);
  std::uint64_t const mod = s.size() + 1;
  std::uint64_t checksum = 0;
  double const ns = detail::time_ns([&] {
    std::uint64_t prev = 0;
    for (std::uint64_t q : queries) {
      prev = s.rank((q + prev) % mod);
      checksum += prev;
    }
  });
  return {ns / static_cast<double>(queries.size()), checksum};
}

template <RankQueryable S>
RunResult run_loop(S const& s, std::span<std::uint64_t const> queries) {
  detail::require_queries(queries);
  std::uint64_t checksum = 0;
  double const ns = detail::time_ns([&] {
    for (std::uint64_t q : queries) {
      checksum += s.rank(q);
    }
  });
  return {ns / static_cast<double>(queries.size()), checksum};
}

/// Plain loop that also requests the line of the query `distance` iterations
/// ahead and the query array itself further ahead.
template <RankQueryable S>
RunResult run_prefetch(S const& s, std::span<std::uint64_t const> queries, std::uint64_t distance = 32) {
  detail::require_queries(queries);
  if (distance == 0) {
    throw std::invalid_argument("prefetch distance must be at least 1");
  }
  std::uint64_t const count = queries.size();
  std::uint64_t const array_ahead = distance + kCacheLineBytes / sizeof(std::uint64_t);
  std::uint64_t const end_both = count > array_ahead ? count - array_ahead : 0;
  std::uint64_t const end_one = count > distance ? count - distance : 0;
  std::uint64_t checksum = 0;
  double const ns = detail::time_ns([&] {
    std::uint64_t const* qs = queries.data();
    std::uint64_t i = 0;
    for (; i < end_both; ++i) {
      prefetch_read(qs + i + array_ahead);
      s.prefetch(qs[i + distance]);
      checksum += s.rank(qs[i]);
    }
    for (; i < end_one; ++i) {
      s.prefetch(qs[i + distance]);
      checksum += s.rank(qs[i]);
    }
    for (; i < count; ++i) {
      checksum += s.rank(qs[i]);
    }
  });
  return {ns / static_cast<double>(count), checksum};
}

template <RankQueryable S>
RunResult run_mode(S const& s, Mode mode, std::span<std::uint64_t const> queries, std::uint64_t distance) {
  switch (mode) {
  case Mode::Latency: return run_latency(s, queries);
  case Mode::Loop: return run_loop(s, queries);
  case Mode::Prefetch: return run_prefetch(s, queries, distance);
  }
  throw std::invalid_argument("unknown mode");
}

/// For every configured thread count and mode, runs `repeats` rounds in which
/// each worker answers its own query stream against the shared structure.
/// ns_per_query is the mean over workers of their per-query time, taken as
/// the median over rounds; checksum is the wrapping sum over workers.
template <RankQueryable S>
std::vector<BenchRecord> run_threads(S const& s, std::string_view structure, BenchConfig const& cfg) {
  cfg.validate();
  double const input_bytes = cfg.alphabet == 2 ? static_cast<double>(s.size()) / 8.0 : static_cast<double>(s.size()) / 4.0;
  double const overhead = input_bytes == 0 ? 0.0 : (static_cast<double>(s.size_in_bytes()) - input_bytes) / input_bytes;

  std::vector<BenchRecord> records;
  for (unsigned threads : cfg.threads) {
    std::vector<std::vector<std::uint64_t>> queries(threads);
    for (unsigned t = 0; t < threads; ++t) {
      queries[t] = make_queries(thread_seed(cfg.seed, t), cfg.query_count, s.size());
    }
    for (Mode mode : cfg.modes) {
      std::vector<double> round_ns;
      std::uint64_t checksum = 0;
      for (unsigned r = 0; r < cfg.repeats; ++r) {
        std::vector<RunResult> results(threads);
        std::barrier start(static_cast<std::ptrdiff_t>(threads));
        {
          std::vector<std::jthread> workers;
          workers.reserve(threads);
          for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&, t] {
              start.arrive_and_wait();
              results[t] = run_mode(s, mode, queries[t], cfg.prefetch_distance);
            });
          }
        }
        double ns = 0;
        std::uint64_t sum = 0;
        for (auto const& res : results) {
          ns += res.ns_per_query;
          sum += res.checksum;
        }
        round_ns.push_back(ns / threads);
        checksum = sum;
      }
      std::nth_element(round_ns.begin(), round_ns.begin() + round_ns.size() / 2, round_ns.end());
      records.push_back({std::string(structure), overhead, mode, threads, round_ns[round_ns.size() / 2], checksum,
                         s.size_in_bytes()});
    }
  }
  return records;
}

inline void sort_records(std::vector<BenchRecord>& records) {
  auto key = [](BenchRecord const& r) { return std::tie(r.structure, r.mode, r.threads); };
  std::stable_sort(records.begin(), records.end(),
                   [&](BenchRecord const& a, BenchRecord const& b) { return key(a) < key(b); });
}

inline void write_csv(std::ostream& out, std::vector<BenchRecord> records) {
  sort_records(records);
  out << "structure,overhead,mode,threads,ns_per_query,checksum\n";
  for (auto const& r : records) {
    out << r.structure << ',' << std::setprecision(6) << r.overhead << ',' << mode_name(r.mode) << ','
        << r.threads << ',' << std::fixed << std::setprecision(3) << r.ns_per_query << std::defaultfloat << ','
        << r.checksum << '\n';
  }
}

} // namespace qrank::bench
