// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include "motepy/driver.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "motepy/lexer.hpp"
#include "motepy/parser.hpp"

extern char** environ;

namespace motepy {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("error writing " + p.string());
}

std::string Compilation::arena_dump() const { return dump_arena(program, requests, layout); }

std::string Compilation::liveness_dump() const { return dump_liveness(program, lifetimes); }

std::string Compilation::ast_dump() const {
  std::ostringstream os;
  for (const auto& m : program.modules) os << "# module " << m->name << '\n' << frontend::unparse(m->ast);
  return os.str();
}

std::unique_ptr<Compilation> compile_program(const std::string& pipeline_path, const std::string& pipeline_text,
                                             const ModuleLoader& loader, const CompileOptions& opts,
                                             SourceManager* sources_out) {
  auto c = std::make_unique<Compilation>();
  try {
    FileId pf = c->sources.add(pipeline_path, pipeline_text);
    ast::PipelineSpec spec = frontend::parse_pipeline(frontend::tokenize(c->sources.contents(pf), pf));

    std::vector<ast::Module> modules;
    std::set<std::string> seen;
    for (const auto& st : spec.stages) {
      if (!seen.insert(st.module).second) continue;
      std::optional<ModuleSource> src = loader(st.module);
      if (!src) continue;  // resolve reports the missing module
      FileId f = c->sources.add(src->path, src->text);
      modules.push_back(frontend::parse_module(frontend::tokenize(c->sources.contents(f), f), st.module));
    }

    std::vector<ExternDecl> externs;
    for (const auto& text : opts.externs) {
      try {
        externs.push_back(parse_extern_signature(text));
      } catch (const std::invalid_argument& e) {
        throw CompileError(SourceSpan{pf, 1, 1, 0}, "invalid --extern '" + text + "': " + e.what());
      }
    }

    c->program = resolve(spec, std::move(modules), c->sources, externs);
    typecheck(c->program);
    c->lifetimes = analyze_lifetimes(c->program);
    c->requests = alloc_requests(c->program, c->lifetimes.intervals);
    c->layout = plan_arena(c->requests);
    auto violations = verify_layout(c->requests, c->layout);
    if (!violations.empty())
      throw std::logic_error("internal error: arena layout failed verification: " + violations.front().message);

    CodegenOptions cg;
    cg.extra_includes = opts.includes;
    if (opts.header_comment) cg.header_comment = c->arena_dump();
    c->c_source = emit_translation_unit(c->program, c->layout, cg).text;
  } catch (...) {
    if (sources_out) *sources_out = c->sources;
    throw;
  }
  if (sources_out) *sources_out = c->sources;
  return c;
}

ModuleLoader directory_loader(const std::filesystem::path& pipeline_path,
                              const std::vector<std::filesystem::path>& include_dirs) {
  std::vector<std::filesystem::path> dirs;
  dirs.push_back(pipeline_path.parent_path().empty() ? std::filesystem::path(".") : pipeline_path.parent_path());
  dirs.insert(dirs.end(), include_dirs.begin(), include_dirs.end());
  return [dirs](const std::string& module) -> std::optional<ModuleSource> {
    for (const auto& d : dirs) {
      std::filesystem::path p = d / (module + ".py");
      std::error_code ec;
      if (std::filesystem::is_regular_file(p, ec)) return ModuleSource{p.string(), read_file(p)};
    }
    return std::nullopt;
  };
}

std::filesystem::path resolve_runtime_dir(const std::filesystem::path& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MOTEPY_RUNTIME_DIR"); env && *env) return env;
  std::error_code ec;
  std::filesystem::path src = MOTEPY_SOURCE_RUNTIME_DIR;
  if (std::filesystem::exists(src / "motepy_rt.h", ec)) return src;
  return MOTEPY_INSTALL_RUNTIME_DIR;
}

std::vector<std::string> c_compiler_command(const std::string& cc) {
  std::string text = cc;
  if (text.empty())
    if (const char* env = std::getenv("CC"); env) text = env;
  std::vector<std::string> words;
  std::istringstream in(text);
  for (std::string w; in >> w;) words.push_back(w);
  if (words.empty()) words.push_back("cc");
  return words;
}

std::vector<std::string> default_cflags() {
  return {"-std=c99", "-O2", "-ffp-contract=off", "-fno-strict-aliasing"};
}

ProcessResult run_process(const std::vector<std::string>& argv, bool capture_stdout) {
  ProcessResult r;
  if (argv.empty()) {
    r.spawn_error = "empty command";
    return r;
  }
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  int fds[2] = {-1, -1};
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  if (capture_stdout) {
    if (pipe(fds) != 0) {
      r.spawn_error = std::strerror(errno);
      posix_spawn_file_actions_destroy(&actions);
      return r;
    }
    posix_spawn_file_actions_addclose(&actions, fds[0]);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, fds[1]);
  }
  std::fflush(nullptr);
  pid_t pid = 0;
  int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (capture_stdout) close(fds[1]);
  if (rc != 0) {
    if (capture_stdout) close(fds[0]);
    r.spawn_error = "cannot run '" + argv[0] + "': " + std::strerror(rc);
    return r;
  }
  if (capture_stdout) {
    char buf[4096];
    for (;;) {
      ssize_t n = read(fds[0], buf, sizeof buf);
      if (n > 0) {
        r.out.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        break;
      }
    }
    close(fds[0]);
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) {
      r.spawn_error = std::strerror(errno);
      return r;
    }
  }
  if (WIFEXITED(status)) {
    r.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    r.exit_code = 128 + WTERMSIG(status);
  }
  return r;
}

ProcessResult build_executable(const Compilation& c, const BuildConfig& cfg) {
  std::filesystem::path c_path = cfg.output;
  c_path += ".c";
  write_file(c_path, c.c_source);
  std::vector<std::string> argv = c_compiler_command(cfg.cc);
  for (const auto& f : default_cflags()) argv.push_back(f);
  for (const auto& f : cfg.cflags) argv.push_back(f);
  argv.push_back("-I" + resolve_runtime_dir(cfg.runtime_dir).string());
  std::filesystem::path pdir = cfg.pipeline.parent_path();
  argv.push_back("-I" + (pdir.empty() ? std::string(".") : pdir.string()));
  for (const auto& d : cfg.include_dirs) argv.push_back("-I" + d.string());
  argv.push_back("-o");
  argv.push_back(cfg.output.string());
  argv.push_back(c_path.string());
  argv.push_back("-lm");
  ProcessResult r = run_process(argv, false);
  if (!cfg.keep_c) {
    std::error_code ec;
    std::filesystem::remove(c_path, ec);
  }
  return r;
}

}  // namespace motepy
