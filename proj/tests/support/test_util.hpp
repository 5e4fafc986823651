// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "motepy/driver.hpp"
#include "motepy/interp.hpp"
#include "program_gen.hpp"

namespace motepy::testing {

namespace fs = std::filesystem;

fs::path corpus_dir();   // tests/corpus in the source tree
fs::path support_dir();  // tests/support (holds mp_test_rand.h)
fs::path motec_path();   // the built motec binary

// Compiles a program held in memory. `modules` maps module name to source.
std::unique_ptr<Compilation> compile_text(const std::string& pipeline,
                                          const std::map<std::string, std::string>& modules,
                                          const CompileOptions& opts = {});
std::unique_ptr<Compilation> compile_generated(const GeneratedProgram& p, const CompileOptions& opts = {});
// One of the corpus programs, e.g. "address_reuse".
std::unique_ptr<Compilation> compile_corpus(const std::string& name, const CompileOptions& opts = {});

// The diagnostics of a failed compilation joined into one string, or "" on
// success.
std::string compile_errors(const std::string& pipeline, const std::map<std::string, std::string>& modules);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_program(const fs::path& dir, const GeneratedProgram& p);

bool have_c_compiler();

struct RunResult {
  bool ok = false;
  std::string output;
  std::string error;  // what went wrong when !ok
};

// Compiles `c` with the deterministic rand shim (the Compilation must have
// been produced with kRandShim among its includes), runs it, captures stdout.
RunResult build_and_run(const Compilation& c, const fs::path& pipeline_path, std::uint64_t iterations,
                        const std::vector<std::string>& extra_cflags = {});

inline constexpr const char* kRandShim = "mp_test_rand.h";
CompileOptions shim_options();

std::string interp_output(const Compilation& c, std::uint64_t iterations);

// Accesses the interpreter recorded outside the live interval of a
// non-persistent instance, formatted one per line.
std::vector<std::string> trace_violations(const Compilation& c, std::uint64_t iterations);

// First differing line of two transcripts, for readable failures.
std::string first_difference(const std::string& a, const std::string& b);

}  // namespace motepy::testing
