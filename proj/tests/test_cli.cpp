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

// End-to-end checks of the rcf executable: every subcommand is driven
// through a real process so argument parsing, output formats and exit
// codes are pinned exactly as a shell user sees them.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "rcf/bench.hpp"
#include "rcf/bytes.hpp"
#include "rcf/io.hpp"
#include "rcf/synthgen.hpp"
#include "support.hpp"

using namespace rcf;
using testsupport::TempDir;

namespace {

struct CliResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

/// Runs the rcf binary with `args`, capturing exit code, stdout and stderr.
CliResult run_cli(const TempDir& dir, const std::string& args) {
  static int serial = 0;
  std::string out_path = dir.file("cli-out-" + std::to_string(serial));
  std::string err_path = dir.file("cli-err-" + std::to_string(serial));
  ++serial;
  std::string cmd =
      std::string(RCF_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
  int rc = std::system(cmd.c_str());
  CliResult r;
  if (rc != -1 && WIFEXITED(rc)) r.status = WEXITSTATUS(rc);
  r.out = read_text(out_path);
  r.err = read_text(err_path);
  return r;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

/// Expected payload of event `index` in a stream generated from (kind, seed).
Bytes oracle_event(EventKind kind, std::uint64_t seed, std::uint64_t index) {
  EventGenerator gen(kind, seed);
  Bytes event;
  for (std::uint64_t i = 0; i <= index; ++i) event = gen.next();
  return event;
}

}  // namespace

TEST_CASE("codecs subcommand lists every algorithm with its level range") {
  TempDir dir;
  CliResult r = run_cli(dir, "codecs");
  CHECK(r.status == 0);
  CHECK(r.err.empty());
  CHECK(r.out ==
        "identity levels 0..0\n"
        "deflate levels 1..9\n"
        "lzma levels 1..9\n"
        "lz4 levels 0..0\n"
        "lz4hc levels 4..9\n");
  CliResult again = run_cli(dir, "codecs");
  CHECK(again.out == r.out);
}

TEST_CASE("gen writes a deterministic stream and reports its size") {
  TempDir dir;
  std::string s1 = dir.file("a.evs");
  std::string s2 = dir.file("b.evs");

  CliResult r = run_cli(dir, "gen --kind tsmall --count 5 --seed 9 --out " + s1);
  REQUIRE(r.status == 0);
  CHECK(r.err.empty());
  CHECK(r.out == "events=5 bytes=20000\n");

  CliResult again =
      run_cli(dir, "gen --kind tsmall --count 5 --seed 9 --out " + s2);
  REQUIRE(again.status == 0);
  CHECK(read_whole_file(s1) == read_whole_file(s2));

  // Layout: magic, kind byte, count, then u32-length-prefixed events.
  Bytes stream = read_whole_file(s1);
  REQUIRE(stream.size() == 4 + 1 + 8 + 5 * (4 + 4000));
  CHECK(stream[0] == 'R');
  CHECK(stream[1] == 'C');
  CHECK(stream[2] == 'G');
  CHECK(stream[3] == '1');
  CHECK(stream[4] == 1);  // tsmall
  ByteCursor cursor(ByteSpan(stream.data() + 5, stream.size() - 5),
                    ErrorCode::CorruptFrame);
  CHECK(cursor.u64() == 5);
  CHECK(cursor.u32() == 4000);
  ByteSpan stored = cursor.take(4000);
  Bytes expect = oracle_event(EventKind::TSmall, 9, 0);
  CHECK(std::equal(stored.begin(), stored.end(), expect.begin(), expect.end()));

  CliResult other =
      run_cli(dir, "gen --kind tsmall --count 5 --seed 10 --out " + s2);
  REQUIRE(other.status == 0);
  CHECK(read_whole_file(s1) != read_whole_file(s2));

  CliResult bad = run_cli(dir, "gen --kind vector --out " + s1);
  CHECK(bad.status == 1);
  CHECK(contains(bad.err, "E_USAGE"));
}

TEST_CASE("gen, write and indexed read round-trip event bytes") {
  TempDir dir;
  std::string stream = dir.file("events.evs");
  std::string plain = dir.file("plain.rcf");
  std::string framed = dir.file("framed.rcf");

  REQUIRE(run_cli(dir, "gen --kind tsmall --count 100 --seed 3 --out " + stream)
              .status == 0);

  CliResult w = run_cli(dir, "write --in " + stream + " --out " + plain +
                                 " --codec lzma --level 1 --basket-size 65536");
  REQUIRE(w.status == 0);
  unsigned long long events = 0, raw = 0, file_bytes = 0;
  double ratio = 0.0;
  REQUIRE(std::sscanf(w.out.c_str(),
                      "events=%llu bytes=%llu file_bytes=%llu ratio=%lf", &events,
                      &raw, &file_bytes, &ratio) == 4);
  CHECK(events == 100);
  CHECK(raw == 400000);
  CHECK(file_bytes == std::filesystem::file_size(plain));
  CHECK(ratio == doctest::Approx(double(raw) / double(file_bytes)).epsilon(1e-9));

  REQUIRE(run_cli(dir, "write --in " + stream + " --out " + framed +
                           " --codec deflate --level 6 --rac")
              .status == 0);

  // The branch name defaults to the stream's kind.
  for (const std::string& file : {plain, framed}) {
    CliResult r42 = run_cli(dir, "read --file " + file + " --branch tsmall" +
                                     " --index 42");
    REQUIRE(r42.status == 0);
    Bytes expect = oracle_event(EventKind::TSmall, 3, 42);
    REQUIRE(r42.out.size() == expect.size());
    CHECK(std::equal(expect.begin(), expect.end(),
                     reinterpret_cast<const std::uint8_t*>(r42.out.data())));
  }

  CliResult named = run_cli(dir, "write --in " + stream + " --out " + framed +
                                     " --branch hits --codec lz4");
  REQUIRE(named.status == 0);
  CliResult r0 = run_cli(dir, "read --file " + framed + " --branch hits --index 0");
  REQUIRE(r0.status == 0);
  CHECK(r0.out.size() == 4000);
  CliResult wrong =
      run_cli(dir, "read --file " + framed + " --branch tsmall --index 0");
  CHECK(wrong.status == 1);
  CHECK(contains(wrong.err, "E_RANGE"));
}

TEST_CASE("strided read reports visit totals") {
  TempDir dir;
  std::string stream = dir.file("events.evs");
  std::string file = dir.file("tree.rcf");
  REQUIRE(run_cli(dir, "gen --kind tsmall --count 100 --seed 3 --out " + stream)
              .status == 0);
  REQUIRE(run_cli(dir, "write --in " + stream + " --out " + file +
                           " --codec deflate --basket-size 65536")
              .status == 0);

  CliResult r = run_cli(dir, "read --file " + file + " --branch tsmall --stride 7");
  REQUIRE(r.status == 0);
  unsigned long long events = 0, bytes = 0, fetched = 0, decompressed = 0;
  REQUIRE(std::sscanf(r.out.c_str(),
                      "events=%llu bytes=%llu fetched=%llu decompressed=%llu",
                      &events, &bytes, &fetched, &decompressed) == 4);
  CHECK(events == 15);  // ceil(100 / 7)
  CHECK(bytes == 15 * 4000);
  // Stride 7 touches all six baskets, so every byte is decompressed once.
  CHECK(decompressed == 400000);
  CHECK(fetched > 0);
  CHECK(fetched < std::filesystem::file_size(file));
}

TEST_CASE("read demands exactly one access mode") {
  TempDir dir;
  std::string stream = dir.file("events.evs");
  std::string file = dir.file("tree.rcf");
  REQUIRE(run_cli(dir, "gen --kind tfloat --count 10 --seed 1 --out " + stream)
              .status == 0);
  REQUIRE(run_cli(dir, "write --in " + stream + " --out " + file).status == 0);

  CliResult both = run_cli(
      dir, "read --file " + file + " --branch tfloat --index 1 --stride 2");
  CHECK(both.status == 1);
  CHECK(contains(both.err, "E_USAGE"));
  CHECK(contains(both.err, "exactly one of --index and --stride"));

  CliResult neither = run_cli(dir, "read --file " + file + " --branch tfloat");
  CHECK(neither.status == 1);
  CHECK(contains(neither.err, "exactly one of --index and --stride"));

  CliResult past =
      run_cli(dir, "read --file " + file + " --branch tfloat --index 10");
  CHECK(past.status == 1);
  CHECK(contains(past.err, "E_RANGE"));
}

TEST_CASE("mangled input files are rejected with corrupt-data exits") {
  TempDir dir;
  std::string text = dir.file("notes.txt");
  {
    std::ofstream out(text, std::ios::binary);
    out << "just some prose, long enough to pass any size precheck............";
  }

  CliResult w = run_cli(dir, "write --in " + text + " --out " + dir.file("x"));
  CHECK(w.status == 3);
  CHECK(contains(w.err, "E_MAGIC"));
  CHECK(contains(w.err, "is not an event stream"));

  CliResult r = run_cli(dir, "read --file " + text + " --branch b --stride 1");
  CHECK(r.status == 3);
  CHECK(contains(r.err, "E_MAGIC"));

  CliResult u = run_cli(dir, "unpack --in " + text + " --out " + dir.file("y"));
  CHECK(u.status == 3);
}

TEST_CASE("missing input files fail with an io error") {
  TempDir dir;
  std::string ghost = dir.file("missing.bin");
  for (const std::string& args :
       {"write --in " + ghost + " --out " + dir.file("o1"),
        "read --file " + ghost + " --branch b --stride 1",
        "pack --in " + ghost + " --out " + dir.file("o2"),
        "unpack --in " + ghost + " --out " + dir.file("o3")}) {
    CliResult r = run_cli(dir, args);
    CHECK(r.status == 2);
    CHECK(contains(r.err, "E_IO"));
  }
}

TEST_CASE("pack validates the block size before writing") {
  TempDir dir;
  std::string input = dir.file("input.bin");
  write_whole_file(input, Bytes(1000, 7));
  std::string out = dir.file("out.bpk");

  CliResult r = run_cli(dir, "pack --in " + input + " --out " + out +
                                 " --block-size 5000");
  CHECK(r.status == 1);
  CHECK(contains(r.err, "E_BLOCKSIZE"));
  CHECK(!std::filesystem::exists(out));

  CliResult lvl = run_cli(dir, "pack --in " + input + " --out " + out +
                                   " --codec deflate --level 42");
  CHECK(lvl.status == 1);
  CHECK(contains(lvl.err, "E_LEVEL"));
}

TEST_CASE("pack and unpack restore the original file") {
  TempDir dir;
  std::string stream = dir.file("events.evs");
  REQUIRE(run_cli(dir, "gen --kind tsmall --count 60 --seed 11 --out " + stream)
              .status == 0);
  Bytes original = read_whole_file(stream);

  std::string packed = dir.file("events.bpk");
  CliResult p = run_cli(dir, "pack --in " + stream + " --out " + packed);
  REQUIRE(p.status == 0);
  unsigned long long blocks = 0, bytes = 0, packed_bytes = 0;
  double ratio = 0.0;
  REQUIRE(std::sscanf(p.out.c_str(),
                      "blocks=%llu bytes=%llu packed_bytes=%llu ratio=%lf",
                      &blocks, &bytes, &packed_bytes, &ratio) == 4);
  CHECK(bytes == original.size());
  CHECK(blocks == (original.size() + 65535) / 65536);
  CHECK(packed_bytes == std::filesystem::file_size(packed));
  CHECK(ratio ==
        doctest::Approx(double(bytes) / double(packed_bytes)).epsilon(1e-9));

  std::string restored = dir.file("restored.evs");
  CliResult u = run_cli(dir, "unpack --in " + packed + " --out " + restored);
  REQUIRE(u.status == 0);
  CHECK(u.out == "bytes=" + std::to_string(original.size()) + "\n");
  CHECK(read_whole_file(restored) == original);

  // A flipped payload byte must surface as corruption, not silent damage.
  Bytes damaged = read_whole_file(packed);
  damaged[25] ^= 0x40;
  std::string bad = dir.file("bad.bpk");
  write_whole_file(bad, damaged);
  CliResult d = run_cli(dir, "unpack --in " + bad + " --out " + restored);
  CHECK(d.status == 3);

  Bytes truncated(read_whole_file(packed));
  truncated.resize(truncated.size() - 10);
  write_whole_file(bad, truncated);
  CliResult t = run_cli(dir, "unpack --in " + bad + " --out " + restored);
  CHECK(t.status == 3);
}

TEST_CASE("help requests exit cleanly and parse errors do not") {
  TempDir dir;
  CliResult top = run_cli(dir, "--help");
  CHECK(top.status == 0);
  for (const char* sub : {"gen", "write", "read", "pack", "unpack", "bench"})
    CHECK(contains(top.out, sub));

  CliResult sub = run_cli(dir, "write --help");
  CHECK(sub.status == 0);
  CHECK(contains(sub.out, "--basket-size"));
  CHECK(contains(sub.out, "--rac"));

  CliResult none = run_cli(dir, "");
  CHECK(none.status == 1);
  CHECK(contains(none.err, "E_USAGE"));

  CliResult unknown = run_cli(dir, "gen --bogus 1 --out " + dir.file("z"));
  CHECK(unknown.status == 1);
  CHECK(contains(unknown.err, "E_USAGE"));

  CliResult format = run_cli(dir, "bench rac --format yaml");
  CHECK(format.status == 1);
  CHECK(contains(format.err, "E_USAGE"));
}

TEST_CASE("bench config file problems are reported with file and line") {
  TempDir dir;
  CliResult missing =
      run_cli(dir, "bench codecs --config " + dir.file("absent.ini"));
  CHECK(missing.status == 2);
  CHECK(contains(missing.err, "E_IO"));

  std::string bad = dir.file("bad.ini");
  {
    std::ofstream out(bad);
    out << "[bench]\n";
    out << "mystery = 1\n";
  }
  CliResult r = run_cli(dir, "bench codecs --config " + bad);
  CHECK(r.status == 1);
  CHECK(contains(r.err, "bad.ini:2"));
}

TEST_CASE("bench codecs renders a table when asked") {
  TempDir dir;
  std::string config = dir.file("fast.ini");
  {
    std::ofstream out(config);
    out << "[codecs]\n";
    out << "matrix = identity, lz4\n";
  }
  CliResult r = run_cli(dir, "bench codecs --corpus-mib 12 --seed 4 --reps 3" +
                                 std::string(" --format table --config ") +
                                 config + " --workdir " + dir.file("work"));
  REQUIRE(r.status == 0);
  CHECK(contains(r.out, "config_id"));
  CHECK(contains(r.out, "identity"));
  CHECK(contains(r.out, "lz4"));
  // Table output pads with spaces instead of joining on commas.
  CHECK(!contains(r.out, ","));
}

TEST_CASE("bench rac emits parseable csv over a small corpus") {
  TempDir dir;
  CliResult r = run_cli(
      dir, "bench rac --corpus-mib 12 --seed 5 --reps 3 --format csv --workdir " +
               dir.file("work"));
  REQUIRE(r.status == 0);
  BenchReport report = parse_csv(r.out);
  CHECK(report.rows.size() == 32);
  bool saw_rac = false, saw_plain = false;
  for (const BenchRow& row : report.rows) {
    if (contains(row.config_id, "mode=rac")) saw_rac = true;
    if (contains(row.config_id, "mode=plain")) saw_plain = true;
    if (row.compressed_size > 0 && row.size > 0)
      CHECK(row.ratio == doctest::Approx(double(row.size) /
                                         double(row.compressed_size))
                             .epsilon(1e-9));
  }
  CHECK(saw_rac);
  CHECK(saw_plain);
  CHECK(emit_csv(parse_csv(emit_csv(report))) == emit_csv(report));
}
