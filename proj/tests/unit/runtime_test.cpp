// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

// The runtime header is C; these tests compile small C programs against it.

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "test_util.hpp"

using namespace motepy;
namespace mt = motepy::testing;
namespace fs = std::filesystem;

namespace {

fs::path runtime_dir() { return resolve_runtime_dir({}); }

// Builds `source` as strict C99 and runs it with `args`.
ProcessResult build_c(const mt::TempDir& dir, const std::string& source, const std::vector<std::string>& args = {}) {
  write_file(dir.path() / "t.c", source);
  std::string exe = (dir.path() / "t").string();
  std::vector<std::string> cmd = c_compiler_command("");
  cmd.insert(cmd.end(), {"-std=c99", "-pedantic", "-Wall", "-Wextra", "-Werror", "-I", runtime_dir().string(),
                         (dir.path() / "t.c").string(), "-o", exe});
  auto cc = run_process(cmd, true);
  if (cc.exit_code != 0) return cc;
  std::vector<std::string> argv{exe};
  argv.insert(argv.end(), args.begin(), args.end());
  return run_process(argv, true);
}

// Prints "<rc> <present> <value>" for the arguments it was given.
const char* kParseHarness =
    "#include <stdio.h>\n#include \"motepy_rt.h\"\n"
    "int main(int argc, char **argv) {\n"
    "  mp_iters it;\n"
    "  int rc = mp_parse_iters(argc, argv, &it);\n"
    "  printf(\"%d %d %llu\\n\", rc, it.present, it.value);\n"
    "  return 0;\n}\n";

}  // namespace

TEST(Runtime, ParseIterations) {
  if (!mt::have_c_compiler()) GTEST_SKIP() << "no C compiler";
  mt::TempDir dir;
  struct Case {
    std::vector<std::string> args;
    std::string expect;
  };
  const Case cases[] = {
      {{}, "0 0 0\n"},
      {{"1"}, "0 1 1\n"},
      {{"0"}, "0 1 0\n"},
      {{"007"}, "0 1 7\n"},
      {{"18446744073709551615"}, "0 1 18446744073709551615\n"},
      {{"18446744073709551616"}, "-1 0 0\n"},
      {{"abc"}, "-1 0 0\n"},
      {{""}, "-1 0 0\n"},
      {{"-1"}, "-1 0 0\n"},
      {{"+1"}, "-1 0 0\n"},
      {{" 1"}, "-1 0 0\n"},
      {{"1x"}, "-1 0 0\n"},
      {{"1", "2"}, "-1 0 0\n"},
  };
  for (const auto& c : cases) {
    auto r = build_c(dir, kParseHarness, c.args);
    ASSERT_EQ(r.exit_code, 0) << r.spawn_error;
    std::string shown = c.args.empty() ? "(none)" : c.args[0];
    EXPECT_EQ(r.out, c.expect) << shown;
  }
}

// Random argument strings against an independent reading of the rule: all
// decimal digits, no overflow.
TEST(Runtime, ParseIterationsFuzz) {
  if (!mt::have_c_compiler()) GTEST_SKIP() << "no C compiler";
  mt::TempDir dir;
  const std::string harness =
      "#include <stdio.h>\n#include \"motepy_rt.h\"\n"
      "int main(int argc, char **argv) {\n"
      "  int k;\n"
      "  for (k = 1; k < argc; ++k) {\n"
      "    char *pair[2];\n    mp_iters it;\n    int rc;\n"
      "    pair[0] = argv[0];\n    pair[1] = argv[k];\n"
      "    rc = mp_parse_iters(2, pair, &it);\n"
      "    printf(\"%d %llu\\n\", rc, it.value);\n"
      "  }\n  return 0;\n}\n";
  std::mt19937_64 rng(9);
  const std::string alphabet = "0123456789 -+xe.";
  std::vector<std::string> args;
  std::string expect;
  for (int i = 0; i < 500; ++i) {
    std::string s;
    int len = 1 + static_cast<int>(rng() % 22);
    bool digits_only = rng() % 2 == 0;
    for (int k = 0; k < len; ++k)
      s += digits_only ? static_cast<char>('0' + rng() % 10) : alphabet[rng() % alphabet.size()];
    args.push_back(s);
    bool ok = s.find_first_not_of("0123456789") == std::string::npos;
    unsigned long long v = 0;
    for (char ch : s) {
      if (!ok) break;
      unsigned d = static_cast<unsigned>(ch - '0');
      if (v > (ULLONG_MAX - d) / 10) ok = false;
      else v = v * 10 + d;
    }
    expect += ok ? "0 " + std::to_string(v) + "\n" : "-1 0\n";
  }
  auto r = build_c(dir, harness, args);
  ASSERT_EQ(r.exit_code, 0) << r.spawn_error;
  EXPECT_EQ(r.out, expect);
}

TEST(Runtime, HeaderIsStrictC99) {
  if (!mt::have_c_compiler()) GTEST_SKIP() << "no C compiler";
  mt::TempDir dir;
  auto r = build_c(dir, "#include \"motepy_rt.h\"\n#include \"motepy_rt.h\"\nint main(void) { return 0; }\n");
  EXPECT_EQ(r.exit_code, 0);
}

TEST(Runtime, ArenaSizeAndAlignment) {
  if (!mt::have_c_compiler()) GTEST_SKIP() << "no C compiler";
  mt::TempDir dir;
  const std::string src =
      "#include <stdio.h>\n#include \"motepy_rt.h\"\n"
      "MP_DEFINE_ARENA(20)\n"
      "int main(void) {\n"
      "  printf(\"%d %d\\n\", (int)(sizeof mp_arena_storage.bytes), (int)((uintptr_t)MP_ARENA_BASE % 8u));\n"
      "  return 0;\n}\n";
  auto r = build_c(dir, src);
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "20 0\n");
}

TEST(Runtime, ZeroArenaExpandsToNothing) {
  if (!mt::have_c_compiler()) GTEST_SKIP() << "no C compiler";
  mt::TempDir dir;
  auto r = build_c(dir, "#include \"motepy_rt.h\"\nMP_DEFINE_ARENA(0)\nint main(void) { return 0; }\n");
  EXPECT_EQ(r.exit_code, 0);
}
