// rankbench: times rank queries on random input in latency, loop and
// prefetch mode and writes one CSV row per (structure, mode, threads).

#include "qrank/bench.hpp"
#include "qrank/birank.hpp"
#include "qrank/birank_paired.hpp"
#include "qrank/quadrank.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace qrank;
using namespace qrank::bench;

struct Options {
  BenchConfig cfg;
  std::string mode = "all";
  std::string csv;
  std::set<std::string> only;
  unsigned build_threads = std::max(1u, std::thread::hardware_concurrency());
};

bool wanted(Options const& o, std::string_view name) {
  return o.only.empty() || o.only.count(std::string(name)) != 0;
}

template <class R>
void bench_bi(Options const& o, BitText const& text, std::vector<BenchRecord>& out) {
  if (!wanted(o, structure_name<R>)) {
    return;
  }
  std::cerr << "building " << structure_name<R> << '\n';
  R const r = R::build(text, o.build_threads);
  auto recs = run_threads(r, structure_name<R>, o.cfg);
  out.insert(out.end(), recs.begin(), recs.end());
}

template <class Q>
void bench_quad(Options const& o, QuadText const& text, std::vector<BenchRecord>& out) {
  std::string const name1 = std::string(structure_name<Q>) + ":rank";
  std::string const name4 = std::string(structure_name<Q>) + ":rank4";
  if (!wanted(o, structure_name<Q>) && !wanted(o, name1) && !wanted(o, name4)) {
    return;
  }
  std::cerr << "building " << structure_name<Q> << '\n';
  Q const q = Q::build(text, o.build_threads);
  if (wanted(o, structure_name<Q>) || wanted(o, name1)) {
    auto recs = run_threads(QuadRank1Adapter<Q>(q), name1, o.cfg);
    out.insert(out.end(), recs.begin(), recs.end());
  }
  if (wanted(o, structure_name<Q>) || wanted(o, name4)) {
    auto recs = run_threads(QuadRank4Adapter<Q>(q), name4, o.cfg);
    out.insert(out.end(), recs.begin(), recs.end());
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank query benchmark"};
  Options o;
  bool small = false;
  app.add_option("--alphabet", o.cfg.alphabet, "2 for bits, 4 for DNA")->check(CLI::IsMember({2u, 4u}));
  app.add_option("--size", o.cfg.input_bytes, "Input size in bytes")->check(CLI::PositiveNumber);
  app.add_flag("--small", small, "Use a 128 KiB input (overrides --size)");
  app.add_option("--mode", o.mode, "latency, loop, prefetch or all")
      ->check(CLI::IsMember({"latency", "loop", "prefetch", "all"}));
  app.add_option("--threads", o.cfg.threads, "Worker counts, e.g. 1,6,12")->delimiter(',');
  app.add_option("--distance", o.cfg.prefetch_distance, "Prefetch distance")->check(CLI::PositiveNumber);
  app.add_option("--queries", o.cfg.query_count, "Queries per thread")->check(CLI::PositiveNumber);
  app.add_option("--repeats", o.cfg.repeats, "Rounds per measurement (odd, median reported)");
  app.add_option("--seed", o.cfg.seed, "Seed for input and queries");
  app.add_option("--csv", o.csv, "Write CSV here instead of stdout");
  app.add_option("--structures", o.only, "Restrict to these structure names")->delimiter(',');
  app.add_option("--build-threads", o.build_threads, "Threads used for construction")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  if (small) {
    o.cfg.input_bytes = BenchConfig::small_input().input_bytes;
  }
  if (o.mode != "all") {
    o.cfg.modes = {*parse_mode(o.mode)};
  }

  try {
    o.cfg.validate();
    std::vector<BenchRecord> records;
    if (o.cfg.alphabet == 2) {
      BitText const text = gen_bit_input(o.cfg.seed, o.cfg.input_bytes);
      bench_bi<BiRank16>(o, text, records);
      bench_bi<BiRank16x2>(o, text, records);
      bench_bi<BiRank32x2>(o, text, records);
      bench_bi<BiRank64x2>(o, text, records);
      bench_bi<BiRankPaired>(o, text, records);
      bench_bi<BiRank32>(o, text, records);
      bench_bi<BiRank64>(o, text, records);
    } else {
      QuadText const text = gen_quad_input(o.cfg.seed, o.cfg.input_bytes);
      bench_quad<QuadRank16>(o, text, records);
      bench_quad<QuadRank24_8>(o, text, records);
      bench_quad<QuadRank64>(o, text, records);
    }
    if (o.csv.empty()) {
      write_csv(std::cout, records);
    } else {
      std::ofstream out(o.csv);
      if (!out) {
        std::cerr << "cannot open " << o.csv << '\n';
        return 1;
      }
      write_csv(out, records);
    }
  } catch (std::exception const& e) {
    std::cerr << "rankbench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
