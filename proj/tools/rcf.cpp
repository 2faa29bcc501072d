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

// rcf: generate synthetic event streams, store them in columnar container
// files, pack finished files into block-compressed archives, and run the
// benchmark experiments. Data goes to stdout, diagnostics to stderr; exit
// codes: 0 ok, 1 usage, 2 I/O or codec backend, 3 corrupt data.

#include <algorithm>
#include <cinttypes>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rcf/bench.hpp"
#include "rcf/blockstore.hpp"
#include "rcf/container.hpp"
#include "rcf/synthgen.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rcf;

// Event stream file, the handoff between `gen` and `write`:
//   magic "RCG1", kind u8, count u64, then per event u32 length + bytes.
constexpr char kStreamMagic[4] = {'R', 'C', 'G', '1'};

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

CodecSpec spec_from_flags(const std::string& codec, int level) {
  CodecSpec spec = CodecSpec::parse(codec);
  if (level >= 0) {
    spec.level = static_cast<std::uint8_t>(level);
    spec.validate();
  }
  return spec;
}

struct GenFlags {
  std::string kind = "tfloat";
  std::uint64_t count = 1;
  std::uint64_t seed = 42;
  std::string out;
};

int cmd_gen(const GenFlags& f) {
  EventKind kind = parse_kind(f.kind);
  EventGenerator gen(kind, f.seed);
  FileWriter out(f.out);

  Bytes header;
  header.insert(header.end(), kStreamMagic, kStreamMagic + 4);
  put_u8(header, static_cast<std::uint8_t>(kind));
  put_u64(header, f.count);
  out.write(header);

  std::size_t len = event_size(kind);
  Bytes record;
  put_u32(record, static_cast<std::uint32_t>(len));
  record.resize(4 + len);
  for (std::uint64_t i = 0; i < f.count; ++i) {
    gen.fill(record.data() + 4);
    out.write(record);
  }
  out.close();
  std::printf("events=%" PRIu64 " bytes=%" PRIu64 "\n", f.count,
              f.count * static_cast<std::uint64_t>(len));
  return 0;
}

struct WriteFlags {
  std::string in;
  std::string out;
  std::string branch;
  std::uint64_t basket_size = kDefaultBasketCapacity;
  std::string codec = "deflate";
  int level = -1;
  bool rac = false;
};

int cmd_write(const WriteFlags& f) {
  Bytes stream = read_whole_file(f.in);
  ByteCursor cursor(stream, ErrorCode::CorruptFrame);
  ByteSpan magic = cursor.take(4);
  if (!std::equal(magic.begin(), magic.end(), kStreamMagic))
    raise(ErrorCode::BadMagic, "'" + f.in + "' is not an event stream");
  std::uint8_t kind_byte = cursor.u8();
  if (kind_byte > 2)
    raise(ErrorCode::CorruptFrame, "unknown event kind in stream header");
  std::uint64_t count = cursor.u64();
  std::string branch =
      f.branch.empty() ? kind_name(static_cast<EventKind>(kind_byte)) : f.branch;

  TreeWriter writer(f.out, f.basket_size, spec_from_flags(f.codec, f.level),
                    f.rac);
  std::uint64_t raw = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t len = cursor.u32();
    writer.append(branch, cursor.take(len));
    raw += len;
  }
  if (!cursor.done())
    raise(ErrorCode::CorruptFrame, "trailing bytes after the last event");
  writer.finalize();

  std::uint64_t file_bytes = fs::file_size(f.out);
  std::printf("events=%" PRIu64 " bytes=%" PRIu64 " file_bytes=%" PRIu64
              " ratio=%s\n",
              count, raw, file_bytes,
              format_double(double(raw) / double(file_bytes)).c_str());
  return 0;
}

struct ReadFlags {
  std::string file;
  std::string branch;
  std::uint64_t index = 0;
  std::uint64_t stride = 0;
  bool has_index = false;
  bool has_stride = false;
};

int cmd_read(const ReadFlags& f) {
  if (f.has_index == f.has_stride)
    raise(ErrorCode::UsageError, "pass exactly one of --index and --stride");
  TreeReader reader(f.file);
  if (f.has_index) {
    Bytes payload = reader.read_event(f.branch, f.index);
    std::fwrite(payload.data(), 1, payload.size(), stdout);
    return 0;
  }
  std::uint64_t events = 0, bytes = 0;
  reader.scan(f.branch, f.stride, [&](std::uint64_t, const Bytes& payload) {
    ++events;
    bytes += payload.size();
  });
  ReadStats stats = reader.stats();
  std::printf("events=%" PRIu64 " bytes=%" PRIu64 " fetched=%" PRIu64
              " decompressed=%" PRIu64 "\n",
              events, bytes, stats.bytes_fetched, stats.bytes_decompressed);
  return 0;
}

struct PackFlags {
  std::string in;
  std::string out;
  std::uint64_t block_size = 65536;
  std::string codec = "deflate";
  int level = -1;
};

int cmd_pack(const PackFlags& f) {
  BlockIndex index =
      pack_file(f.in, f.out, static_cast<std::uint32_t>(f.block_size),
                spec_from_flags(f.codec, f.level));
  std::uint64_t packed = fs::file_size(f.out);
  std::printf("blocks=%" PRIu64 " bytes=%" PRIu64 " packed_bytes=%" PRIu64
              " ratio=%s\n",
              index.block_count(), index.original_len, packed,
              format_double(double(index.original_len) / double(packed)).c_str());
  return 0;
}

int cmd_unpack(const std::string& in, const std::string& out) {
  BlockReader reader(in);
  reader.unpack_to(out);
  std::printf("bytes=%" PRIu64 "\n", reader.original_len());
  return 0;
}

int cmd_codecs() {
  for (const CodecInfo& info : list_codecs())
    std::printf("%s levels %d..%d\n", info.name.c_str(), int(info.min_level),
                int(info.max_level));
  return 0;
}

struct BenchFlags {
  std::uint64_t corpus_mib = 0;
  std::uint64_t seed = 0;
  int reps = 0;
  std::string format = "csv";
  std::string config;
  std::string workdir;
};

int cmd_bench(const std::string& experiment, const BenchFlags& f,
              const CLI::App& sub) {
  BenchConfig config;
  if (sub.count("--config")) load_config_file(f.config, config);
  if (sub.count("--corpus-mib")) config.corpus_bytes = f.corpus_mib << 20;
  if (sub.count("--seed")) config.seed = f.seed;
  if (sub.count("--reps")) config.reps = f.reps;
  if (sub.count("--workdir")) config.work_dir = f.workdir;
  if (config.work_dir.empty())
    config.work_dir = (fs::temp_directory_path() / "rcf-bench").string();
  fs::create_directories(config.work_dir);

  BenchReport report;
  if (experiment == "codecs") report = bench_codecs(config);
  else if (experiment == "rac") report = bench_rac(config);
  else report = bench_blockstore(config);

  std::string text = f.format == "table" ? emit_table(report) : emit_csv(report);
  std::fwrite(text.data(), 1, text.size(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Columnar event storage, compression codecs and benchmarks"};
  app.require_subcommand(1);

  GenFlags gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic event stream");
  gen_cmd->add_option("--kind", gen.kind, "Event kind: tfloat, tsmall or tlarge");
  gen_cmd->add_option("--count", gen.count, "Number of events");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out", gen.out, "Output stream file")->required();

  WriteFlags write;
  CLI::App* write_cmd =
      app.add_subcommand("write", "Store an event stream in a container file");
  write_cmd->add_option("--in", write.in, "Input event stream")->required();
  write_cmd->add_option("--out", write.out, "Output container file")->required();
  write_cmd->add_option("--branch", write.branch,
                        "Branch name (default: the stream's event kind)");
  write_cmd->add_option("--basket-size", write.basket_size,
                        "Basket capacity in bytes");
  write_cmd->add_option("--codec", write.codec, "Codec name, e.g. deflate, lzma");
  write_cmd->add_option("--level", write.level, "Compression level");
  write_cmd->add_flag("--rac", write.rac, "Compress each event independently");

  ReadFlags read;
  CLI::App* read_cmd = app.add_subcommand("read", "Read events from a container file");
  read_cmd->add_option("--file", read.file, "Container file")->required();
  read_cmd->add_option("--branch", read.branch, "Branch name")->required();
  CLI::Option* index_opt =
      read_cmd->add_option("--index", read.index, "Emit one event's bytes");
  CLI::Option* stride_opt = read_cmd->add_option(
      "--stride", read.stride, "Visit every stride-th event, print totals");

  PackFlags pack;
  CLI::App* pack_cmd =
      app.add_subcommand("pack", "Compress a file into fixed-size blocks");
  pack_cmd->add_option("--in", pack.in, "Input file")->required();
  pack_cmd->add_option("--out", pack.out, "Packed output file")->required();
  pack_cmd->add_option("--block-size", pack.block_size, "Block size in bytes");
  pack_cmd->add_option("--codec", pack.codec, "Codec name");
  pack_cmd->add_option("--level", pack.level, "Compression level");

  std::string unpack_in, unpack_out;
  CLI::App* unpack_cmd = app.add_subcommand("unpack", "Restore a packed file");
  unpack_cmd->add_option("--in", unpack_in, "Packed input file")->required();
  unpack_cmd->add_option("--out", unpack_out, "Restored output file")->required();

  CLI::App* bench_cmd = app.add_subcommand("bench", "Run a benchmark experiment");
  bench_cmd->require_subcommand(1);
  BenchFlags bench;
  auto add_bench_flags = [&](CLI::App* sub) {
    sub->add_option("--corpus-mib", bench.corpus_mib, "Corpus size in MiB");
    sub->add_option("--seed", bench.seed, "Corpus seed");
    sub->add_option("--reps", bench.reps, "Timing repetitions (median)");
    sub->add_option("--format", bench.format, "Output format")
        ->check(CLI::IsMember({"csv", "table"}));
    sub->add_option("--config", bench.config, "Config file with key = value sections");
    sub->add_option("--workdir", bench.workdir, "Directory for staged files");
  };
  CLI::App* bench_codecs_cmd =
      bench_cmd->add_subcommand("codecs", "Whole-corpus compress/decompress matrix");
  CLI::App* bench_rac_cmd = bench_cmd->add_subcommand(
      "rac", "Container reads with and without per-event frames");
  CLI::App* bench_blockstore_cmd = bench_cmd->add_subcommand(
      "blockstore", "Container versus block-compressed archive");
  add_bench_flags(bench_codecs_cmd);
  add_bench_flags(bench_rac_cmd);
  add_bench_flags(bench_blockstore_cmd);

  CLI::App* codecs_cmd =
      app.add_subcommand("codecs", "List codecs and their level ranges");
  (void)codecs_cmd;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "E_USAGE: %s\n", e.what());
    return 1;
  }

  try {
    if (app.got_subcommand("gen")) return cmd_gen(gen);
    if (app.got_subcommand("write")) return cmd_write(write);
    if (app.got_subcommand("read")) {
      read.has_index = index_opt->count() > 0;
      read.has_stride = stride_opt->count() > 0;
      return cmd_read(read);
    }
    if (app.got_subcommand("pack")) return cmd_pack(pack);
    if (app.got_subcommand("unpack")) return cmd_unpack(unpack_in, unpack_out);
    if (app.got_subcommand("codecs")) return cmd_codecs();
    if (app.got_subcommand("bench")) {
      if (bench_cmd->got_subcommand("codecs"))
        return cmd_bench("codecs", bench, *bench_codecs_cmd);
      if (bench_cmd->got_subcommand("rac"))
        return cmd_bench("rac", bench, *bench_rac_cmd);
      return cmd_bench("blockstore", bench, *bench_blockstore_cmd);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "E_IO: %s\n", e.what());
    return 2;
  }
  return 0;
}
