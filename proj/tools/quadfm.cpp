// quadfm: builds a count-only FM-index over DNA and counts reads (forward
// and reverse complement) against it.

#include "qrank/bits.hpp"
#include "qrank/dna.hpp"
#include "qrank/fm.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace qrank;

std::ifstream open_in(std::string const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  return in;
}

/// Encodes records, reporting and dropping those with non-ACGT characters.
std::vector<std::vector<std::uint8_t>> encode_records(std::vector<dna::Record> const& records, std::string_view what) {
  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(records.size());
  for (auto const& rec : records) {
    auto enc = dna::encode(rec.sequence);
    if (!enc || enc->empty()) {
      std::cerr << "skipping " << what << ' ' << rec.name << ": " << (enc ? "empty" : "non-ACGT character")
                << '\n';
      continue;
    }
    out.push_back(std::move(*enc));
  }
  return out;
}

int cmd_build(std::string const& input, std::string const& output, unsigned threads) {
  auto in = open_in(input);
  auto const seqs = encode_records(dna::read_records(in), "record");
  std::vector<std::uint8_t> all;
  for (auto const& s : seqs) {
    all.insert(all.end(), s.begin(), s.end());
  }
  if (all.empty()) {
    std::cerr << "quadfm: no usable sequence in " << input << '\n';
    return 1;
  }
  auto const t0 = std::chrono::steady_clock::now();
  FmIndex const fm = FmIndex::build(pack_quad(all), threads);
  auto const t1 = std::chrono::steady_clock::now();
  std::ofstream out(output, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + output);
  }
  fm.save(out);
  std::cout << "indexed " << all.size() << " bases from " << seqs.size() << " records in "
            << std::chrono::duration<double>(t1 - t0).count() << " s\n";
  return 0;
}

enum class CountMode { Sequential, Batch, BatchPrefetch };

std::uint64_t count_range(FmIndex const& fm, std::vector<std::vector<std::uint8_t>> const& patterns,
                          std::size_t begin, std::size_t end, CountMode mode) {
  std::uint64_t total = 0;
  if (mode == CountMode::Sequential) {
    for (std::size_t i = begin; i < end; ++i) {
      total += fm.count(patterns[i]);
    }
    return total;
  }
  std::array<std::span<std::uint8_t const>, FmIndex::kBatchSize> batch;
  std::array<BwtInterval, FmIndex::kBatchSize> out;
  for (std::size_t i = begin; i < end; i += FmIndex::kBatchSize) {
    std::size_t const m = std::min<std::size_t>(FmIndex::kBatchSize, end - i);
    for (std::size_t k = 0; k < m; ++k) {
      batch[k] = patterns[i + k];
    }
    std::span<std::span<std::uint8_t const> const> const b(batch.data(), m);
    if (mode == CountMode::BatchPrefetch) {
      fm.query_batch<true>(b, out);
    } else {
      fm.query_batch<false>(b, out);
    }
    for (std::size_t k = 0; k < m; ++k) {
      total += out[k].size();
    }
  }
  return total;
}

int cmd_count(std::string const& index, std::string const& reads_path, unsigned threads,
              std::vector<std::string> const& modes) {
  auto in = open_in(index);
  FmIndex const fm = FmIndex::load(in);
  auto rin = open_in(reads_path);
  auto const reads = encode_records(dna::read_records(rin), "read");
  std::vector<std::vector<std::uint8_t>> patterns;
  patterns.reserve(2 * reads.size());
  for (auto const& r : reads) {
    patterns.push_back(r);
    patterns.push_back(dna::reverse_complement(r));
  }
  std::cout << "mode,threads,reads,seconds,reads_per_second,matches\n";
  for (auto const& name : modes) {
    CountMode const mode = name == "sequential" ? CountMode::Sequential
                           : name == "batch"    ? CountMode::Batch
                                                : CountMode::BatchPrefetch;
    std::atomic<std::uint64_t> total{0};
    auto const t0 = std::chrono::steady_clock::now();
    parallel_chunks(patterns.size(), threads, [&](std::size_t b, std::size_t e) {
      total += count_range(fm, patterns, b, e, mode);
    });
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << name << ',' << threads << ',' << reads.size() << ',' << secs << ','
              << (secs > 0 ? static_cast<double>(reads.size()) / secs : 0.0) << ',' << total.load() << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Count-only FM-index for DNA"};
  app.require_subcommand(1);

  std::string input, output;
  unsigned threads = 1;
  auto* build = app.add_subcommand("build", "Index a FASTA file or one-sequence-per-line text");
  build->add_option("input", input, "FASTA or raw sequence file")->required();
  build->add_option("-o,--output", output, "Index file to write")->required();
  build->add_option("--threads", threads, "Construction threads")->check(CLI::PositiveNumber);

  std::string index, reads;
  std::string mode = "all";
  auto* count = app.add_subcommand("count", "Count reads and their reverse complements");
  count->add_option("index", index, "Index written by build")->required();
  count->add_option("reads", reads, "FASTA or one read per line")->required();
  count->add_option("--threads", threads, "Query threads")->check(CLI::PositiveNumber);
  count->add_option("--mode", mode, "sequential, batch, batch+prefetch or all")
      ->check(CLI::IsMember({"sequential", "batch", "batch+prefetch", "all"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*build) {
      return cmd_build(input, output, threads);
    }
    std::vector<std::string> modes{mode};
    if (mode == "all") {
      modes = {"sequential", "batch", "batch+prefetch"};
    }
    return cmd_count(index, reads, threads, modes);
  } catch (std::exception const& e) {
    std::cerr << "quadfm: " << e.what() << '\n';
    return 1;
  }
}
