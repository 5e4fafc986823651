// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "motepy/arena.hpp"
#include "motepy/codegen.hpp"
#include "motepy/diagnostics.hpp"
#include "motepy/lifetime.hpp"
#include "motepy/sema.hpp"

namespace motepy {

struct CompileOptions {
  std::vector<std::string> externs;   // `name:signature`
  std::vector<std::string> includes;  // extra #include lines for the C unit
  bool header_comment = false;        // embed the arena dump in the C unit
};

/// Every artifact of one compilation. Heap-allocated because the typed
/// program points into `sources`.
struct Compilation {
  SourceManager sources;
  TypedProgram program;
  LifetimeResult lifetimes;
  std::vector<AllocRequest> requests;
  ArenaLayout layout;
  std::string c_source;

  std::string arena_dump() const;
  std::string liveness_dump() const;
  std::string ast_dump() const;
};

struct ModuleSource {
  std::string path;  // shown in diagnostics
  std::string text;
};

/// Returns the source of `module`, or nothing when it cannot be found.
using ModuleLoader = std::function<std::optional<ModuleSource>(const std::string& module)>;

/// parse -> resolve -> typecheck -> lifetimes -> arena -> C. Throws
/// CompileError for user errors; the partially built Compilation is lost.
/// `sources_out`, when given, receives the sources so diagnostics can be
/// rendered with file names even on failure.
std::unique_ptr<Compilation> compile_program(const std::string& pipeline_path, const std::string& pipeline_text,
                                             const ModuleLoader& loader, const CompileOptions& opts,
                                             SourceManager* sources_out = nullptr);

/// Loader that looks for `<module>.py` next to the pipeline, then in each
/// include directory.
ModuleLoader directory_loader(const std::filesystem::path& pipeline_path,
                              const std::vector<std::filesystem::path>& include_dirs);

struct BuildConfig {
  std::filesystem::path pipeline;
  std::vector<std::filesystem::path> include_dirs;
  std::filesystem::path output;
  std::string cc;  // empty: $CC, then `cc`
  std::vector<std::string> cflags;
  std::filesystem::path runtime_dir;  // empty: see resolve_runtime_dir
  bool keep_c = false;
  CompileOptions compile;
};

/// Flag value, then $MOTEPY_RUNTIME_DIR, then the source tree, then the
/// install prefix.
std::filesystem::path resolve_runtime_dir(const std::filesystem::path& flag);

/// Words of the C compiler command: `cc` argument, else $CC split on
/// whitespace, else `cc`.
std::vector<std::string> c_compiler_command(const std::string& cc);

/// Flags always passed to the C compiler.
std::vector<std::string> default_cflags();

struct ProcessResult {
  int exit_code = -1;        // -1 when the process could not be started
  std::string out;           // captured stdout when requested
  std::string spawn_error;   // set when exit_code == -1
};

/// Runs argv[0] (looked up in PATH) and waits. Stdout is captured when
/// `capture_stdout` is set, otherwise inherited; stderr is inherited.
ProcessResult run_process(const std::vector<std::string>& argv, bool capture_stdout);

/// Writes the C unit next to `output`, runs the C compiler, and removes the
/// C file unless keep_c. Returns the compiler result.
ProcessResult build_executable(const Compilation& c, const BuildConfig& cfg);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

}  // namespace motepy
