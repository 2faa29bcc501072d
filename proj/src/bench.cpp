/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rcf/bench.hpp"

#include <time.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <functional>
#include <random>

#include "rcf/blockstore.hpp"
#include "rcf/io.hpp"
#include "rcf/synthgen.hpp"

namespace rcf {

namespace {

namespace fs = std::filesystem;

double now_real() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double now_cpu() {
  timespec ts{};
  clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
  return double(ts.tv_sec) + double(ts.tv_nsec) * 1e-9;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

struct Timing {
  double real = 0;
  double cpu = 0;
};

// The CPU window nests inside the real window, so cpu <= real per rep on a
// single thread, and medians preserve the order.
Timing time_reps(int reps, const std::function<void()>& fn) {
  std::vector<double> reals, cpus;
  reals.reserve(reps);
  cpus.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    double r0 = now_real();
    double c0 = now_cpu();
    fn();
    double c1 = now_cpu();
    double r1 = now_real();
    reals.push_back(r1 - r0);
    cpus.push_back(c1 - c0);
  }
  return {median(std::move(reals)), median(std::move(cpus))};
}

std::string base_id(const char* experiment, const BenchConfig& config) {
  std::string id = experiment;
  id += "|corpus=" + std::to_string(config.corpus_bytes);
  id += "|seed=" + std::to_string(config.seed);
  id += "|reps=" + std::to_string(config.reps);
  id += "|rng=mt19937_64";
  return id;
}

BenchConfig effective(const BenchConfig& in) {
  BenchConfig config = in;
  if (config.codec_matrix.empty()) config.codec_matrix = default_codec_matrix();
  if (config.granule_sizes.empty())
    config.granule_sizes = default_granule_sizes();
  if (config.strides.empty()) config.strides = default_strides();
  config.validate();
  return config;
}

std::string staging_dir(const BenchConfig& config) {
  if (config.work_dir.empty())
    raise(ErrorCode::UsageError, "this experiment needs a work directory");
  if (!fs::is_directory(config.work_dir))
    raise(ErrorCode::UsageError,
          "work directory '" + config.work_dir + "' does not exist");
  return config.work_dir;
}

std::uint64_t file_bytes(const std::string& path) {
  return static_cast<std::uint64_t>(fs::file_size(path));
}

void write_corpus(TreeWriter& writer, const Corpus& corpus) {
  for (EventKind kind : kAllKinds) {
    const CorpusBranch& branch = corpus.branch(kind);
    for (std::uint64_t i = 0; i < branch.count; ++i)
      writer.append(kind_name(kind), branch.event(i));
  }
}

std::uint64_t kind_salt(EventKind kind) {
  return 0xC2B2AE3D27D4EB4Full * (static_cast<std::uint64_t>(kind) + 1);
}

// Visits one branch of a container at the given stride.
void scan_branch(const TreeReader& reader, EventKind kind, std::uint64_t stride) {
  reader.scan(kind_name(kind), stride, [](std::uint64_t, const Bytes&) {});
}

struct ReadPass {
  std::function<void()> run;
  std::uint64_t requested_bytes = 0;
};

BenchRow stats_row(std::string id, std::string codec, const ReadPass& pass,
                   std::string workload, std::string cache_mode,
                   const ReadStats& stats) {
  BenchRow row;
  row.config_id = std::move(id);
  row.codec = std::move(codec);
  row.size = pass.requested_bytes;
  row.workload = std::move(workload);
  row.cache_mode = std::move(cache_mode);
  row.bytes_fetched = stats.bytes_fetched;
  row.bytes_decompressed = stats.bytes_decompressed;
  row.blocks_or_baskets_touched = stats.baskets_fetched;
  return row;
}

ReadStats stats_delta(const ReadStats& after, const ReadStats& before, int reps) {
  ReadStats d;
  d.baskets_fetched = (after.baskets_fetched - before.baskets_fetched) / reps;
  d.frames_fetched = (after.frames_fetched - before.frames_fetched) / reps;
  d.bytes_fetched = (after.bytes_fetched - before.bytes_fetched) / reps;
  d.bytes_decompressed =
      (after.bytes_decompressed - before.bytes_decompressed) / reps;
  return d;
}

FetchStats fetch_delta(const FetchStats& after, const FetchStats& before,
                       int reps) {
  FetchStats d;
  d.blocks_fetched = (after.blocks_fetched - before.blocks_fetched) / reps;
  d.bytes_fetched_compressed =
      (after.bytes_fetched_compressed - before.bytes_fetched_compressed) / reps;
  d.bytes_decompressed =
      (after.bytes_decompressed - before.bytes_decompressed) / reps;
  return d;
}

// ---- CSV ----

constexpr std::string_view kCsvHeader =
    "config_id,codec,size,workload,cache_mode,real_time,cpu_time,"
    "compressed_size,ratio,bytes_fetched,bytes_decompressed,"
    "blocks_or_baskets_touched";

void append_number(std::string& out, double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, p);
}

void append_number(std::string& out, std::uint64_t v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, p);
}

const std::string& checked_field(const std::string& s) {
  if (s.empty() || s.find_first_of(",\r\n") != std::string::npos)
    raise(ErrorCode::UsageError, "CSV field must be non-empty and comma-free");
  return s;
}

std::uint64_t parse_u64_field(std::string_view text, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    raise(ErrorCode::UsageError,
          "CSV line " + std::to_string(line) + ": bad integer '" +
              std::string(text) + "'");
  return v;
}

double parse_double_field(std::string_view text, std::size_t line) {
  double v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    raise(ErrorCode::UsageError,
          "CSV line " + std::to_string(line) + ": bad number '" +
              std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string row_field(const BenchRow& row, std::size_t column) {
  std::string out;
  switch (column) {
    case 0: return row.config_id;
    case 1: return row.codec;
    case 2: append_number(out, row.size); return out;
    case 3: return row.workload;
    case 4: return row.cache_mode;
    case 5: append_number(out, row.real_time); return out;
    case 6: append_number(out, row.cpu_time); return out;
    case 7: append_number(out, row.compressed_size); return out;
    case 8: append_number(out, row.ratio); return out;
    case 9: append_number(out, row.bytes_fetched); return out;
    case 10: append_number(out, row.bytes_decompressed); return out;
    case 11: append_number(out, row.blocks_or_baskets_touched); return out;
  }
  return out;
}

}  // namespace

std::vector<CodecSpec> default_codec_matrix() {
  return {CodecSpec::identity(), CodecSpec::deflate(1), CodecSpec::deflate(6),
          CodecSpec::lz4(),      CodecSpec::lz4hc(9),   CodecSpec::lzma(1),
          CodecSpec::lzma(5)};
}

std::vector<std::uint32_t> default_granule_sizes() {
  return {4096, 16384, 65536, 262144, 1048576};
}

std::vector<std::uint64_t> default_strides() { return {10, 100}; }

void BenchConfig::validate() const {
  if (reps < 3)
    raise(ErrorCode::UsageError, "timing runs need at least 3 repetitions");
  if (container_capacity < kMinBasketCapacity)
    raise(ErrorCode::UsageError, "container capacity below minimum");
  if (random_k == 0) raise(ErrorCode::UsageError, "random workload needs k >= 1");
  for (std::uint32_t g : granule_sizes) validate_block_size(g);
  for (std::uint64_t s : strides)
    if (s == 0) raise(ErrorCode::UsageError, "stride must be at least 1");
}

std::vector<std::uint32_t> sample_indices(std::uint64_t population,
                                          std::uint64_t k, std::uint64_t seed) {
  if (k > population) k = population;
  std::vector<std::uint32_t> pool(population);
  for (std::uint64_t i = 0; i < population; ++i)
    pool[i] = static_cast<std::uint32_t>(i);
  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < k; ++i) {
    std::uint64_t j = i + rng() % (population - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

BenchReport bench_codecs(const BenchConfig& raw_config) {
  BenchConfig config = effective(raw_config);
  Corpus corpus = make_corpus(plan_corpus(config.corpus_bytes), config.seed);
  std::uint64_t raw_total = corpus.total_bytes();
  std::string id = base_id("codecs", config);

  BenchReport report;
  for (const CodecSpec& spec : config.codec_matrix) {
    try {
      Bytes frames[3];
      Timing comp = time_reps(config.reps, [&] {
        for (EventKind kind : kAllKinds) {
          std::size_t k = static_cast<std::size_t>(kind);
          frames[k] = compress(spec, corpus.branch(kind).data);
        }
      });
      std::uint64_t comp_size = 0;
      for (const Bytes& f : frames) comp_size += f.size();
      double ratio = double(raw_total) / double(comp_size);

      Timing dec = time_reps(config.reps, [&] {
        for (EventKind kind : kAllKinds) {
          std::size_t k = static_cast<std::size_t>(kind);
          Bytes out =
              decompress(spec, frames[k], corpus.branch(kind).data.size());
        }
      });
      for (EventKind kind : kAllKinds) {
        std::size_t k = static_cast<std::size_t>(kind);
        Bytes out = decompress(spec, frames[k], corpus.branch(kind).data.size());
        if (out != corpus.branch(kind).data)
          raise(ErrorCode::CorruptFrame, "round trip mismatch for " + spec.name());
      }

      BenchRow row;
      row.config_id = id;
      row.codec = spec.name();
      row.size = raw_total;
      row.workload = "compress";
      row.cache_mode = "none";
      row.real_time = comp.real;
      row.cpu_time = comp.cpu;
      row.compressed_size = comp_size;
      row.ratio = ratio;
      report.rows.push_back(row);

      row.workload = "decompress";
      row.real_time = dec.real;
      row.cpu_time = dec.cpu;
      row.bytes_decompressed = raw_total;
      report.rows.push_back(row);
    } catch (const Error&) {
      BenchRow row;
      row.config_id = id;
      row.codec = spec.name();
      row.workload = "error";
      row.cache_mode = "none";
      report.rows.push_back(row);
    }
  }
  return report;
}

BenchReport bench_rac(const BenchConfig& raw_config) {
  BenchConfig config = effective(raw_config);
  std::string dir = staging_dir(config);
  Corpus corpus = make_corpus(plan_corpus(config.corpus_bytes), config.seed);
  std::uint64_t raw_total = corpus.total_bytes();
  CodecSpec codec = CodecSpec::deflate(6);
  std::string workload_random = "random" + std::to_string(config.random_k);

  BenchReport report;
  for (bool event_frames : {false, true}) {
    std::string path =
        (fs::path(dir) / (event_frames ? "rac_on.rcf" : "rac_off.rcf")).string();
    std::string id = base_id("rac", config) +
                     "|granule=" + std::to_string(config.container_capacity) +
                     "|k=" + std::to_string(config.random_k) +
                     "|mode=" + (event_frames ? "rac" : "plain");

    TreeIndex index;
    Timing wt = time_reps(config.reps, [&] {
      TreeWriter writer(path, config.container_capacity, codec, event_frames);
      write_corpus(writer, corpus);
      index = writer.finalize();
    });

    BenchRow write_row;
    write_row.config_id = id;
    write_row.codec = codec.name();
    write_row.size = raw_total;
    write_row.workload = "write";
    write_row.cache_mode = "none";
    write_row.real_time = wt.real;
    write_row.cpu_time = wt.cpu;
    write_row.compressed_size = file_bytes(path);
    write_row.ratio = double(raw_total) / double(write_row.compressed_size);
    report.rows.push_back(write_row);

    for (EventKind kind : kAllKinds) {
      const BranchIndex& branch = index.at(kind_name(kind));
      BenchRow row;
      row.config_id = id;
      row.codec = codec.name();
      row.size = corpus.branch(kind).bytes();
      row.workload = std::string("ratio/") + kind_name(kind);
      row.cache_mode = "none";
      row.compressed_size = branch.stored_bytes();
      row.ratio = double(row.size) / double(row.compressed_size);
      report.rows.push_back(row);
    }

    TreeReader reader(path);
    for (EventKind kind : kAllKinds) {
      std::uint64_t count = reader.event_count(kind_name(kind));
      std::vector<std::uint32_t> picks = sample_indices(
          count, config.random_k, config.seed ^ kind_salt(kind));

      ReadPass random_pass{
          [&reader, kind, picks] {
            for (std::uint32_t i : picks) reader.read_event(kind_name(kind), i);
          },
          picks.size() * event_size(kind)};
      ReadPass seq_pass{[&reader, kind] { scan_branch(reader, kind, 1); },
                        corpus.branch(kind).bytes()};

      struct Work {
        const ReadPass* pass;
        std::string name;
      } works[] = {{&random_pass, workload_random + "/" + kind_name(kind)},
                   {&seq_pass, std::string("seqall/") + kind_name(kind)}};

      for (const Work& work : works) {
        reader.clear_cache();
        reader.reset_stats();
        work.pass->run();
        report.rows.push_back(stats_row(id, codec.name(), *work.pass,
                                        work.name, "cold", reader.stats()));

        work.pass->run();  // warm
        ReadStats before = reader.stats();
        Timing t = time_reps(config.reps, work.pass->run);
        ReadStats per_pass =
            stats_delta(reader.stats(), before, config.reps);
        BenchRow hot = stats_row(id, codec.name(), *work.pass, work.name,
                                 "hot", per_pass);
        hot.real_time = t.real;
        hot.cpu_time = t.cpu;
        report.rows.push_back(hot);
      }
    }
  }
  return report;
}

BenchReport bench_blockstore(const BenchConfig& raw_config) {
  BenchConfig config = effective(raw_config);
  std::string dir = staging_dir(config);
  Corpus corpus = make_corpus(plan_corpus(config.corpus_bytes), config.seed);
  std::uint64_t raw_total = corpus.total_bytes();
  CodecSpec codec = CodecSpec::deflate(6);

  // The blockstore input: the same events stored verbatim, so both sides
  // compress identical content and byte ranges of single events are known.
  std::string verbatim_path = (fs::path(dir) / "verbatim.rcf").string();
  {
    TreeWriter writer(verbatim_path, kDefaultBasketCapacity,
                      CodecSpec::identity(), false);
    write_corpus(writer, corpus);
    writer.finalize();
  }
  TreeReader verbatim(verbatim_path);

  BenchReport report;
  for (std::uint32_t granule : config.granule_sizes) {
    // Container side. The "pack" row counts stored basket images (header +
    // tables + payload), the bytes that exist because of the data; the
    // "packfile" row adds the directory (footer locators) for reference.
    // Basket-level accounting is how a tree reports its own compression
    // factor, and the archive file size is how an archive is measured.
    std::string cpath =
        (fs::path(dir) / ("container_" + std::to_string(granule) + ".rcf"))
            .string();
    std::uint64_t stored = 0;
    {
      TreeWriter writer(cpath, granule, codec, false);
      write_corpus(writer, corpus);
      TreeIndex cindex = writer.finalize();
      for (const BranchIndex& branch : cindex.branches)
        stored += branch.stored_bytes();
    }
    std::string cid = base_id("blockstore", config) +
                      "|granule=" + std::to_string(granule) + "|side=container";
    BenchRow pack_row;
    pack_row.config_id = cid;
    pack_row.codec = codec.name();
    pack_row.size = raw_total;
    pack_row.workload = "pack";
    pack_row.cache_mode = "none";
    pack_row.compressed_size = stored;
    pack_row.ratio = double(raw_total) / double(stored);
    report.rows.push_back(pack_row);

    BenchRow file_row = pack_row;
    file_row.workload = "packfile";
    file_row.compressed_size = file_bytes(cpath);
    file_row.ratio = double(raw_total) / double(file_row.compressed_size);
    report.rows.push_back(file_row);

    TreeReader creader(cpath);
    for (std::uint64_t stride : config.strides) {
      std::uint64_t requested = 0;
      for (EventKind kind : kAllKinds) {
        std::uint64_t n = corpus.branch(kind).count;
        requested += ((n + stride - 1) / stride) * event_size(kind);
      }
      ReadPass pass{[&creader, stride] {
                      for (EventKind kind : kAllKinds)
                        scan_branch(creader, kind, stride);
                    },
                    requested};
      std::string name = "stride" + std::to_string(stride) + "/all";

      creader.clear_cache();
      creader.reset_stats();
      pass.run();
      report.rows.push_back(
          stats_row(cid, codec.name(), pass, name, "cold", creader.stats()));

      pass.run();  // warm
      ReadStats before = creader.stats();
      Timing t = time_reps(config.reps, pass.run);
      BenchRow hot = stats_row(cid, codec.name(), pass, name, "hot",
                               stats_delta(creader.stats(), before, config.reps));
      hot.real_time = t.real;
      hot.cpu_time = t.cpu;
      report.rows.push_back(hot);
    }

    // Blockstore side.
    std::string bpath =
        (fs::path(dir) / ("blocks_" + std::to_string(granule) + ".bpk")).string();
    pack_file(verbatim_path, bpath, granule, codec);
    std::string bid = base_id("blockstore", config) +
                      "|granule=" + std::to_string(granule) + "|side=blockstore";
    BenchRow bpack;
    bpack.config_id = bid;
    bpack.codec = codec.name();
    bpack.size = raw_total;
    bpack.workload = "pack";
    bpack.cache_mode = "none";
    bpack.compressed_size = file_bytes(bpath);
    bpack.ratio = double(raw_total) / double(bpack.compressed_size);
    report.rows.push_back(bpack);

    BlockReader breader(bpath);
    for (std::uint64_t stride : config.strides) {
      std::vector<TreeReader::EventLocation> ranges;
      std::uint64_t requested = 0;
      for (EventKind kind : kAllKinds) {
        std::uint64_t n = corpus.branch(kind).count;
        for (std::uint64_t i = 0; i < n; i += stride) {
          ranges.push_back(verbatim.event_location(kind_name(kind), i));
          requested += ranges.back().length;
        }
      }
      ReadPass pass{[&breader, &ranges] {
                      for (const auto& r : ranges)
                        breader.read_range(r.offset, r.length);
                    },
                    requested};
      std::string name = "stride" + std::to_string(stride) + "/all";

      breader.clear_caches();
      breader.reset_stats();
      pass.run();
      FetchStats cold = breader.stats();
      BenchRow cold_row;
      cold_row.config_id = bid;
      cold_row.codec = codec.name();
      cold_row.size = requested;
      cold_row.workload = name;
      cold_row.cache_mode = "cold";
      cold_row.bytes_fetched = cold.bytes_fetched_compressed;
      cold_row.bytes_decompressed = cold.bytes_decompressed;
      cold_row.blocks_or_baskets_touched = cold.blocks_fetched;
      report.rows.push_back(cold_row);

      pass.run();  // warm
      FetchStats before = breader.stats();
      Timing t = time_reps(config.reps, pass.run);
      FetchStats per_pass = fetch_delta(breader.stats(), before, config.reps);
      BenchRow hot = cold_row;
      hot.cache_mode = "hot";
      hot.real_time = t.real;
      hot.cpu_time = t.cpu;
      hot.bytes_fetched = per_pass.bytes_fetched_compressed;
      hot.bytes_decompressed = per_pass.bytes_decompressed;
      hot.blocks_or_baskets_touched = per_pass.blocks_fetched;
      report.rows.push_back(hot);
    }
  }
  return report;
}

std::string emit_csv(const BenchReport& report) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const BenchRow& row : report.rows) {
    out += checked_field(row.config_id);
    out += ',';
    out += checked_field(row.codec);
    out += ',';
    append_number(out, row.size);
    out += ',';
    out += checked_field(row.workload);
    out += ',';
    out += checked_field(row.cache_mode);
    out += ',';
    append_number(out, row.real_time);
    out += ',';
    append_number(out, row.cpu_time);
    out += ',';
    append_number(out, row.compressed_size);
    out += ',';
    append_number(out, row.ratio);
    out += ',';
    append_number(out, row.bytes_fetched);
    out += ',';
    append_number(out, row.bytes_decompressed);
    out += ',';
    append_number(out, row.blocks_or_baskets_touched);
    out += '\n';
  }
  return out;
}

BenchReport parse_csv(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kCsvHeader)
    raise(ErrorCode::UsageError, "missing or unexpected CSV header");

  BenchReport report;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    std::vector<std::string_view> f = split(lines[ln], ',');
    if (f.size() != 12)
      raise(ErrorCode::UsageError,
            "CSV line " + std::to_string(ln + 1) + ": expected 12 fields, got " +
                std::to_string(f.size()));
    BenchRow row;
    row.config_id = std::string(f[0]);
    row.codec = std::string(f[1]);
    row.size = parse_u64_field(f[2], ln + 1);
    row.workload = std::string(f[3]);
    row.cache_mode = std::string(f[4]);
    row.real_time = parse_double_field(f[5], ln + 1);
    row.cpu_time = parse_double_field(f[6], ln + 1);
    row.compressed_size = parse_u64_field(f[7], ln + 1);
    row.ratio = parse_double_field(f[8], ln + 1);
    row.bytes_fetched = parse_u64_field(f[9], ln + 1);
    row.bytes_decompressed = parse_u64_field(f[10], ln + 1);
    row.blocks_or_baskets_touched = parse_u64_field(f[11], ln + 1);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string emit_table(const BenchReport& report) {
  std::vector<std::string_view> names = split(kCsvHeader, ',');
  const std::size_t columns = names.size();
  std::vector<std::size_t> width(columns);
  for (std::size_t c = 0; c < columns; ++c) width[c] = names[c].size();
  std::vector<std::vector<std::string>> cells;
  cells.reserve(report.rows.size());
  for (const BenchRow& row : report.rows) {
    std::vector<std::string> line(columns);
    for (std::size_t c = 0; c < columns; ++c) {
      line[c] = row_field(row, c);
      width[c] = std::max(width[c], line[c].size());
    }
    cells.push_back(std::move(line));
  }

  std::string out;
  auto emit_line = [&](const std::function<std::string_view(std::size_t)>& get) {
    for (std::size_t c = 0; c < columns; ++c) {
      std::string_view v = get(c);
      out += v;
      if (c + 1 < columns) out.append(width[c] - v.size() + 2, ' ');
    }
    out += '\n';
  };
  emit_line([&](std::size_t c) { return names[c]; });
  for (const auto& line : cells)
    emit_line([&](std::size_t c) { return std::string_view(line[c]); });
  return out;
}

void load_config_file(const std::string& path, BenchConfig& config) {
  Bytes raw = read_whole_file(path);
  std::string_view text(reinterpret_cast<const char*>(raw.data()), raw.size());
  std::vector<std::string_view> lines = split(text, '\n');

  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
      s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
      s.remove_suffix(1);
    return s;
  };
  auto fail = [&](std::size_t ln, const std::string& what) {
    raise(ErrorCode::UsageError,
          path + ":" + std::to_string(ln + 1) + ": " + what);
  };
  auto parse_u64 = [&](std::string_view v, std::size_t ln) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      fail(ln, "bad integer '" + std::string(v) + "'");
    return out;
  };

  std::string section;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = trim(lines[ln]);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ln, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "bench" && section != "codecs" && section != "rac" &&
          section != "blockstore")
        fail(ln, "unknown section '" + section + "'");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(ln, "expected key = value");
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(ln, "empty key or value");

    if (section == "bench") {
      if (key == "corpus_mib") config.corpus_bytes = parse_u64(value, ln) << 20;
      else if (key == "corpus_bytes") config.corpus_bytes = parse_u64(value, ln);
      else if (key == "seed") config.seed = parse_u64(value, ln);
      else if (key == "reps") config.reps = static_cast<int>(parse_u64(value, ln));
      else if (key == "workdir") config.work_dir = std::string(value);
      else fail(ln, "unknown key '" + key + "' in [bench]");
    } else if (section == "codecs") {
      if (key == "matrix") {
        config.codec_matrix.clear();
        for (std::string_view name : split(value, ','))
          config.codec_matrix.push_back(CodecSpec::parse(trim(name)));
      } else {
        fail(ln, "unknown key '" + key + "' in [codecs]");
      }
    } else if (section == "rac") {
      if (key == "capacity") config.container_capacity = parse_u64(value, ln);
      else if (key == "random_k") config.random_k = parse_u64(value, ln);
      else fail(ln, "unknown key '" + key + "' in [rac]");
    } else if (section == "blockstore") {
      if (key == "granules") {
        config.granule_sizes.clear();
        for (std::string_view g : split(value, ','))
          config.granule_sizes.push_back(
              static_cast<std::uint32_t>(parse_u64(trim(g), ln)));
      } else if (key == "strides") {
        config.strides.clear();
        for (std::string_view s : split(value, ','))
          config.strides.push_back(parse_u64(trim(s), ln));
      } else {
        fail(ln, "unknown key '" + key + "' in [blockstore]");
      }
    } else {
      fail(ln, "key outside any section");
    }
  }
}

}  // namespace rcf
