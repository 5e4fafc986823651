// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include "motepy/diagnostics.hpp"

#include <sstream>
#include <utility>

namespace motepy {

FileId SourceManager::add(std::string name, std::string contents) {
  files_.push_back({std::move(name), std::move(contents)});
  return static_cast<FileId>(files_.size() - 1);
}

std::string format_diagnostic(const Diagnostic& d, const SourceManager& sm) {
  std::ostringstream os;
  std::string file = d.span.file < sm.size() ? sm.name(d.span.file) : "<unknown>";
  os << file << ':' << d.span.line << ':' << d.span.col << ": "
     << (d.severity == Severity::Error ? "error" : "warning") << ": " << d.message;
  return os.str();
}

void DiagnosticEngine::error(SourceSpan span, std::string message) {
  diags_.push_back({Severity::Error, span, std::move(message)});
  ++error_count_;
}

void DiagnosticEngine::warning(SourceSpan span, std::string message) {
  diags_.push_back({Severity::Warning, span, std::move(message)});
}

std::vector<Diagnostic> DiagnosticEngine::errors() const {
  std::vector<Diagnostic> out;
  for (const auto& d : diags_)
    if (d.severity == Severity::Error) out.push_back(d);
  return out;
}

std::vector<Diagnostic> DiagnosticEngine::warnings() const {
  std::vector<Diagnostic> out;
  for (const auto& d : diags_)
    if (d.severity == Severity::Warning) out.push_back(d);
  return out;
}

void DiagnosticEngine::throw_if_errors() const {
  if (has_errors()) throw CompileError(errors());
}

namespace {

std::string summarize(const std::vector<Diagnostic>& diags) {
  if (diags.empty()) return "compile error";
  std::ostringstream os;
  os << diags.front().span.line << ':' << diags.front().span.col << ": "
     << diags.front().message;
  if (diags.size() > 1) os << " (+" << diags.size() - 1 << " more)";
  return os.str();
}

}  // namespace

CompileError::CompileError(std::vector<Diagnostic> diags)
    : std::runtime_error(summarize(diags)), diags_(std::move(diags)) {}

CompileError::CompileError(SourceSpan span, std::string message)
    : CompileError(std::vector<Diagnostic>{{Severity::Error, span, std::move(message)}}) {}

}  // namespace motepy
