// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace motepy {

using FileId = std::uint32_t;

struct SourceSpan {
  FileId file = 0;
  std::uint32_t line = 1;  // 1-based
  std::uint32_t col = 1;   // 1-based
  std::uint32_t length = 0;
};

/// Owns file names and contents for every source loaded in a session so
/// spans can stay as small value types.
class SourceManager {
 public:
  FileId add(std::string name, std::string contents);

  const std::string& name(FileId id) const { return files_.at(id).name; }
  const std::string& contents(FileId id) const { return files_.at(id).contents; }
  std::size_t size() const { return files_.size(); }

 private:
  struct File {
    std::string name;
    std::string contents;
  };
  std::vector<File> files_;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceSpan span;
  std::string message;
};

/// Renders `file:line:col: error|warning: message`.
std::string format_diagnostic(const Diagnostic& d, const SourceManager& sm);

class DiagnosticEngine {
 public:
  void error(SourceSpan span, std::string message);
  void warning(SourceSpan span, std::string message);

  bool has_errors() const { return error_count_ > 0; }
  const std::vector<Diagnostic>& all() const { return diags_; }
  std::vector<Diagnostic> errors() const;
  std::vector<Diagnostic> warnings() const;

  /// Throws CompileError carrying every recorded error, if any.
  void throw_if_errors() const;

 private:
  std::vector<Diagnostic> diags_;
  int error_count_ = 0;
};

/// Raised by every compiler phase on a user-facing error.
class CompileError : public std::runtime_error {
 public:
  explicit CompileError(std::vector<Diagnostic> diags);
  CompileError(SourceSpan span, std::string message);

  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

}  // namespace motepy
