// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include "test_util.hpp"

#include <unistd.h>

#include <sstream>
#include <stdexcept>

namespace motepy::testing {

fs::path corpus_dir() { return MOTEPY_TEST_CORPUS_DIR; }
fs::path support_dir() { return MOTEPY_TEST_SUPPORT_DIR; }
fs::path motec_path() { return MOTEPY_TEST_MOTEC; }

std::unique_ptr<Compilation> compile_text(const std::string& pipeline,
                                          const std::map<std::string, std::string>& modules,
                                          const CompileOptions& opts) {
  ModuleLoader loader = [modules](const std::string& name) -> std::optional<ModuleSource> {
    auto it = modules.find(name);
    if (it == modules.end()) return std::nullopt;
    return ModuleSource{name + ".py", it->second};
  };
  return compile_program("pipeline.py", pipeline, loader, opts);
}

std::unique_ptr<Compilation> compile_generated(const GeneratedProgram& p, const CompileOptions& opts) {
  return compile_text(p.pipeline, {p.modules.begin(), p.modules.end()}, opts);
}

std::unique_ptr<Compilation> compile_corpus(const std::string& name, const CompileOptions& opts) {
  fs::path pipeline = corpus_dir() / name / "pipeline.py";
  return compile_program(pipeline.string(), read_file(pipeline), directory_loader(pipeline, {}), opts);
}

std::string compile_errors(const std::string& pipeline, const std::map<std::string, std::string>& modules) {
  SourceManager sm;
  ModuleLoader loader = [modules](const std::string& name) -> std::optional<ModuleSource> {
    auto it = modules.find(name);
    if (it == modules.end()) return std::nullopt;
    return ModuleSource{name + ".py", it->second};
  };
  try {
    compile_program("pipeline.py", pipeline, loader, {}, &sm);
  } catch (const CompileError& e) {
    std::string s;
    for (const auto& d : e.diagnostics()) s += format_diagnostic(d, sm) + "\n";
    return s;
  }
  return "";
}

TempDir::TempDir() {
  std::string templ = (fs::temp_directory_path() / "motepy-test-XXXXXX").string();
  if (!mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
  path_ = templ;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_program(const fs::path& dir, const GeneratedProgram& p) {
  write_file(dir / "pipeline.py", p.pipeline);
  for (const auto& [name, text] : p.modules) write_file(dir / (name + ".py"), text);
}

bool have_c_compiler() {
  std::vector<std::string> argv = c_compiler_command("");
  argv.push_back("--version");
  return run_process(argv, true).exit_code == 0;
}

CompileOptions shim_options() {
  CompileOptions o;
  o.includes.push_back(kRandShim);
  return o;
}

RunResult build_and_run(const Compilation& c, const fs::path& pipeline_path, std::uint64_t iterations,
                        const std::vector<std::string>& extra_cflags) {
  RunResult r;
  TempDir dir;
  BuildConfig cfg;
  cfg.pipeline = pipeline_path;
  cfg.include_dirs.push_back(support_dir());
  cfg.output = dir.path() / "prog";
  cfg.cflags = extra_cflags;
  ProcessResult b = build_executable(c, cfg);
  if (b.exit_code != 0) {
    r.error = "C compiler failed (" + std::to_string(b.exit_code) + ") " + b.spawn_error;
    return r;
  }
  ProcessResult p = run_process({cfg.output.string(), std::to_string(iterations)}, true);
  if (p.exit_code != 0) {
    r.error = "program exited with " + std::to_string(p.exit_code) + " " + p.spawn_error;
    r.output = p.out;
    return r;
  }
  r.ok = true;
  r.output = p.out;
  return r;
}

std::string interp_output(const Compilation& c, std::uint64_t iterations) {
  InterpOptions o;
  o.iterations = iterations;
  o.layout = &c.layout;
  o.record_trace = false;
  return interpret(c.program, c.lifetimes.lin, o, default_stubs()).output;
}

std::vector<std::string> trace_violations(const Compilation& c, std::uint64_t iterations) {
  InterpOptions o;
  o.iterations = iterations;
  o.layout = &c.layout;
  Trace t = interpret(c.program, c.lifetimes.lin, o, default_stubs());
  std::vector<std::string> bad;
  for (const TraceRecord& rec : t.records) {
    const LiveInterval& iv = c.lifetimes.intervals.at(static_cast<std::size_t>(rec.instance));
    if (iv.instance != rec.instance || iv.object != rec.object) {
      bad.push_back("trace record for instance " + std::to_string(rec.instance) + " has no matching interval");
      continue;
    }
    if (iv.persistent || (rec.point >= iv.start && rec.point <= iv.end)) continue;
    std::ostringstream os;
    os << c.program.arena_objects[rec.object].display_name << " instance " << rec.instance << " "
       << (rec.kind == Access::Read ? "read" : "write") << " at point " << rec.point << " outside [" << iv.start
       << ", " << iv.end << "]";
    bad.push_back(os.str());
  }
  return bad;
}

std::string first_difference(const std::string& a, const std::string& b) {
  std::istringstream x(a), y(b);
  std::string la, lb;
  for (int n = 1;; ++n) {
    bool ga = static_cast<bool>(std::getline(x, la));
    bool gb = static_cast<bool>(std::getline(y, lb));
    if (!ga && !gb) return "";
    if (!ga) la = "<end>";
    if (!gb) lb = "<end>";
    if (la != lb || !ga || !gb) return "line " + std::to_string(n) + ": '" + la + "' vs '" + lb + "'";
  }
}

}  // namespace motepy::testing
