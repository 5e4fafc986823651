// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

// motec: compile, build, run or interpret a pipeline.

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "motepy/driver.hpp"
#include "motepy/interp.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string pipeline;
  std::vector<std::string> include_dirs;
  std::string output;
  std::vector<std::string> externs;
  std::vector<std::string> includes;
  std::vector<std::string> cflags;
  std::string runtime_dir;
  std::string trace_path;
  bool dump_ast = false;
  bool dump_liveness = false;
  bool dump_arena = false;
  bool header_comment = false;
  bool keep_c = false;
  long long iterations = -1;
};

void print_diagnostics(const std::vector<motepy::Diagnostic>& diags, const motepy::SourceManager& sm) {
  for (const auto& d : diags) std::cerr << motepy::format_diagnostic(d, sm) << '\n';
}

std::unique_ptr<motepy::Compilation> compile(const Options& o) {
  motepy::CompileOptions co;
  co.externs = o.externs;
  co.includes = o.includes;
  co.header_comment = o.header_comment;
  std::vector<fs::path> dirs(o.include_dirs.begin(), o.include_dirs.end());
  std::string text = motepy::read_file(o.pipeline);
  motepy::SourceManager sm;
  try {
    auto c = motepy::compile_program(o.pipeline, text, motepy::directory_loader(o.pipeline, dirs), co, &sm);
    print_diagnostics(c->program.warnings, c->sources);
    if (o.dump_ast) std::cout << c->ast_dump();
    if (o.dump_liveness) std::cout << c->liveness_dump();
    if (o.dump_arena) std::cout << c->arena_dump();
    return c;
  } catch (const motepy::CompileError& e) {
    print_diagnostics(e.diagnostics(), sm);
    return nullptr;
  }
}

motepy::BuildConfig build_config(const Options& o, const fs::path& output) {
  motepy::BuildConfig cfg;
  cfg.pipeline = o.pipeline;
  cfg.include_dirs.assign(o.include_dirs.begin(), o.include_dirs.end());
  cfg.output = output;
  cfg.cflags = o.cflags;
  cfg.runtime_dir = o.runtime_dir;
  cfg.keep_c = o.keep_c;
  return cfg;
}

fs::path default_output(const Options& o, const char* ext) {
  fs::path p = fs::path(o.pipeline).stem();
  p += ext;
  return p;
}

int cmd_compile(const Options& o) {
  auto c = compile(o);
  if (!c) return 1;
  fs::path out = o.output.empty() ? default_output(o, ".c") : fs::path(o.output);
  motepy::write_file(out, c->c_source);
  return 0;
}

int build(const Options& o, const motepy::Compilation& c, const fs::path& out) {
  motepy::ProcessResult r = motepy::build_executable(c, build_config(o, out));
  if (r.exit_code == -1) {
    std::cerr << "motec: " << r.spawn_error << '\n';
    return 1;
  }
  if (r.exit_code != 0) {
    std::cerr << "motec: C compiler exited with status " << r.exit_code << '\n';
    return 1;
  }
  return 0;
}

int cmd_build(const Options& o) {
  auto c = compile(o);
  if (!c) return 1;
  return build(o, *c, o.output.empty() ? default_output(o, "") : fs::path(o.output));
}

int cmd_run(const Options& o) {
  if (o.iterations < 0) {
    const char* test_mode = std::getenv("MOTEC_TEST_MODE");
    if (test_mode && std::string(test_mode) == "1") {
      std::cerr << "motec: run needs --iterations when MOTEC_TEST_MODE=1\n";
      return 2;
    }
  }
  auto c = compile(o);
  if (!c) return 1;
  fs::path exe;
  fs::path tmp;
  if (!o.output.empty()) {
    exe = o.output;
  } else {
    std::string templ = (fs::temp_directory_path() / "motec-XXXXXX").string();
    if (!mkdtemp(templ.data())) {
      std::cerr << "motec: cannot create a temporary directory\n";
      return 1;
    }
    tmp = templ;
    exe = tmp / default_output(o, "");
  }
  int rc = build(o, *c, exe);
  if (rc == 0) {
    std::vector<std::string> argv{fs::absolute(exe).string()};
    if (o.iterations >= 0) argv.push_back(std::to_string(o.iterations));
    motepy::ProcessResult r = motepy::run_process(argv, false);
    if (r.exit_code == -1) {
      std::cerr << "motec: " << r.spawn_error << '\n';
      rc = 1;
    } else {
      rc = r.exit_code;
    }
  }
  if (!tmp.empty()) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
  }
  return rc;
}

int cmd_interp(const Options& o) {
  auto c = compile(o);
  if (!c) return 1;
  motepy::InterpOptions io;
  io.iterations = o.iterations < 0 ? 1 : static_cast<std::uint64_t>(o.iterations);
  io.layout = &c->layout;
  io.record_trace = !o.trace_path.empty();
  try {
    motepy::Trace t = motepy::interpret(c->program, c->lifetimes.lin, io, motepy::default_stubs());
    std::cout << t.output;
    if (!o.trace_path.empty()) {
      std::ofstream out(o.trace_path);
      for (const auto& r : t.records)
        out << r.point << ' ' << c->program.arena_objects[r.object].display_name << ' '
            << (r.kind == motepy::Access::Read ? "read" : "write") << '\n';
      if (!out) {
        std::cerr << "motec: cannot write " << o.trace_path << '\n';
        return 1;
      }
    }
  } catch (const motepy::InterpError& e) {
    std::cout << std::flush;
    std::cerr << "motec: interp: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("pipeline", o.pipeline, "pipeline specification file")->required()->check(CLI::ExistingFile);
  sub->add_option("-I", o.include_dirs, "extra module search directory")->allow_extra_args(false);
  sub->add_option("--extern", o.externs, "declare a C name, e.g. clampf:(float,float)->float")
      ->allow_extra_args(false);
  sub->add_option("--include", o.includes, "extra #include for the generated C")->allow_extra_args(false);
  sub->add_flag("--dump-ast", o.dump_ast, "print the parsed modules");
  sub->add_flag("--dump-liveness", o.dump_liveness, "print live intervals");
  sub->add_flag("--dump-arena", o.dump_arena, "print the arena layout");
  sub->add_flag("--emit-header-comment", o.header_comment, "embed the arena layout in the C file");
}

void add_build(CLI::App* sub, Options& o) {
  sub->add_option("--cflag", o.cflags, "extra C compiler flag")->allow_extra_args(false);
  sub->add_option("--runtime-dir", o.runtime_dir, "directory holding motepy_rt.h");
  sub->add_flag("--keep-c", o.keep_c, "keep the generated C file next to the executable");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MotePy pipeline compiler"};
  app.require_subcommand(1);
  Options o;

  auto* compile_cmd = app.add_subcommand("compile", "translate a pipeline to C");
  add_common(compile_cmd, o);
  compile_cmd->add_option("-o", o.output, "output C file");

  auto* build_cmd = app.add_subcommand("build", "translate and compile to an executable");
  add_common(build_cmd, o);
  add_build(build_cmd, o);
  build_cmd->add_option("-o", o.output, "output executable");

  auto* run_cmd = app.add_subcommand("run", "build, then run the executable");
  add_common(run_cmd, o);
  add_build(run_cmd, o);
  run_cmd->add_option("-o", o.output, "keep the executable at this path");
  run_cmd->add_option("--iterations", o.iterations, "pipeline iterations (default: forever)")
      ->check(CLI::NonNegativeNumber);

  auto* interp_cmd = app.add_subcommand("interp", "run the reference interpreter");
  add_common(interp_cmd, o);
  interp_cmd->add_option("--iterations", o.iterations, "pipeline iterations (default 1)")
      ->check(CLI::NonNegativeNumber);
  interp_cmd->add_option("--trace", o.trace_path, "write `point object read|write` records here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*compile_cmd) return cmd_compile(o);
    if (*build_cmd) return cmd_build(o);
    if (*run_cmd) return cmd_run(o);
    if (*interp_cmd) return cmd_interp(o);
  } catch (const std::exception& e) {
    std::cerr << "motec: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
