// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include "motepy/interp.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <memory>
#include <optional>
#include <unordered_map>

namespace motepy {

std::string decode_string_literal(const std::string& lexeme) {
  std::string s;
  std::size_t n = lexeme.size();
  std::size_t i = 0;
  if (n >= 2 && (lexeme[0] == '"' || lexeme[0] == '\'')) {
    i = 1;
    n -= 1;
  }
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (; i < n; ++i) {
    char c = lexeme[i];
    if (c != '\\' || i + 1 >= n) {
      s += c;
      continue;
    }
    char e = lexeme[++i];
    switch (e) {
      case 'n': s += '\n'; break;
      case 't': s += '\t'; break;
      case 'r': s += '\r'; break;
      case 'a': s += '\a'; break;
      case 'b': s += '\b'; break;
      case 'f': s += '\f'; break;
      case 'v': s += '\v'; break;
      case '\\': s += '\\'; break;
      case '"': s += '"'; break;
      case '\'': s += '\''; break;
      case '?': s += '?'; break;
      case 'x': {
        int v = 0;
        while (i + 1 < n && hex(lexeme[i + 1]) >= 0) v = v * 16 + hex(lexeme[++i]);
        s += static_cast<char>(v);
        break;
      }
      default:
        if (e >= '0' && e <= '7') {
          int v = e - '0';
          for (int k = 0; k < 2 && i + 1 < n && lexeme[i + 1] >= '0' && lexeme[i + 1] <= '7'; ++k)
            v = v * 8 + (lexeme[++i] - '0');
          s += static_cast<char>(v);
        } else {
          s += '\\';
          s += e;
        }
    }
  }
  return s;
}

namespace {

std::int64_t as_i64(const ScalarValue& v) { return std::get<std::int64_t>(convert(v, ScalarKind::Int64)); }
std::uint64_t as_u64(const ScalarValue& v) { return std::get<std::uint64_t>(convert(v, ScalarKind::UInt64)); }

std::string snformat(const std::string& spec, auto value) {
  int len = std::snprintf(nullptr, 0, spec.c_str(), value);
  if (len < 0) throw InterpError("printf: cannot format '" + spec + "'");
  std::string out(static_cast<std::size_t>(len) + 1, '\0');
  std::snprintf(out.data(), out.size(), spec.c_str(), value);
  out.resize(static_cast<std::size_t>(len));
  return out;
}

}  // namespace

std::string format_printf(const std::string& format, std::span<const ExternArg> args) {
  std::string out;
  std::size_t next_arg = 0;
  auto take = [&](char conv) -> const ExternArg& {
    if (next_arg >= args.size())
      throw InterpError(std::string("printf: missing argument for %") + conv);
    return args[next_arg++];
  };
  for (std::size_t i = 0; i < format.size(); ++i) {
    char c = format[i];
    if (c != '%') {
      out += c;
      continue;
    }
    std::size_t j = i + 1;
    std::string flags, width, precision, length;
    while (j < format.size() && std::string("-+ #0").find(format[j]) != std::string::npos) flags += format[j++];
    while (j < format.size() && std::isdigit(static_cast<unsigned char>(format[j]))) width += format[j++];
    if (j < format.size() && format[j] == '.') {
      precision += format[j++];
      while (j < format.size() && std::isdigit(static_cast<unsigned char>(format[j]))) precision += format[j++];
    }
    if (j < format.size() && format[j] == '*') throw InterpError("printf: '*' width/precision is not supported");
    while (j < format.size() && std::string("hljztL").find(format[j]) != std::string::npos) length += format[j++];
    if (j >= format.size()) throw InterpError("printf: incomplete conversion at end of format");
    char conv = format[j];
    i = j;
    std::string base = "%" + flags + width + precision;
    switch (conv) {
      case '%':
        out += '%';
        break;
      case 'd':
      case 'i': {
        std::int64_t v = as_i64(take(conv).scalar);
        if (length.empty()) v = static_cast<int>(v);
        else if (length == "h") v = static_cast<short>(v);
        else if (length == "hh") v = static_cast<signed char>(v);
        out += snformat(base + "lld", static_cast<long long>(v));
        break;
      }
      case 'u':
      case 'o':
      case 'x':
      case 'X': {
        std::uint64_t v = as_u64(take(conv).scalar);
        if (length.empty()) v = static_cast<unsigned>(v);
        else if (length == "h") v = static_cast<unsigned short>(v);
        else if (length == "hh") v = static_cast<unsigned char>(v);
        out += snformat(base + "ll" + conv, static_cast<unsigned long long>(v));
        break;
      }
      case 'c':
        out += snformat(base + "c", static_cast<int>(as_i64(take(conv).scalar)));
        break;
      case 's': {
        const ExternArg& a = take(conv);
        if (a.kind != ExternArg::Kind::String) throw InterpError("printf: %s needs a string argument");
        out += snformat(base + "s", a.text.c_str());
        break;
      }
      case 'f':
      case 'F':
      case 'e':
      case 'E':
      case 'g':
      case 'G':
      case 'a':
      case 'A': {
        if (length == "L") throw InterpError("printf: long double conversions are not supported");
        const ExternArg& a = take(conv);
        double v = std::visit([](auto x) { return static_cast<double>(x); }, a.scalar);
        out += snformat(base + conv, v);
        break;
      }
      case 'p': {
        const ExternArg& a = take(conv);
        std::uint64_t addr = a.kind == ExternArg::Kind::Array ? a.address : as_u64(a.scalar);
        out += snformat(base + "p", reinterpret_cast<void*>(static_cast<std::uintptr_t>(addr)));
        break;
      }
      default:
        throw InterpError(std::string("printf: unsupported conversion %") + conv);
    }
  }
  return out;
}

ScalarValue apply_binary(ast::BinaryOp op, const ScalarValue& av, const ScalarValue& bv, ScalarKind k) {
  ScalarValue a = convert(av, k);
  ScalarValue b = convert(bv, k);
  auto int_op = [op](auto x, auto y, auto ux, auto uy) {
    using S = decltype(x);
    using U = decltype(ux);
    switch (op) {
      case ast::BinaryOp::Add: return static_cast<S>(static_cast<U>(ux + uy));
      case ast::BinaryOp::Sub: return static_cast<S>(static_cast<U>(ux - uy));
      case ast::BinaryOp::Mul: return static_cast<S>(static_cast<U>(ux * uy));
      case ast::BinaryOp::Div:
        if (y == 0) throw InterpError("integer division by zero");
        if constexpr (std::is_signed_v<S>)
          if (x == std::numeric_limits<S>::min() && y == -1) throw InterpError("integer division overflow");
        return static_cast<S>(x / y);
    }
    return S{};
  };
  switch (k) {
    case ScalarKind::Int32: {
      auto x = std::get<std::int32_t>(a), y = std::get<std::int32_t>(b);
      return int_op(x, y, static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y));
    }
    case ScalarKind::Int64: {
      auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
      return int_op(x, y, static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(y));
    }
    case ScalarKind::UInt64: {
      auto x = std::get<std::uint64_t>(a), y = std::get<std::uint64_t>(b);
      return int_op(x, y, x, y);
    }
    case ScalarKind::Float32: {
      float x = std::get<float>(a), y = std::get<float>(b);
      switch (op) {
        case ast::BinaryOp::Add: return x + y;
        case ast::BinaryOp::Sub: return x - y;
        case ast::BinaryOp::Mul: return x * y;
        case ast::BinaryOp::Div: return x / y;
      }
    }
  }
  return std::int32_t{0};
}

ExternStubs default_stubs() {
  ExternStubs s;
  s.functions["printf"] = [](std::span<const ExternArg> args, ExternContext& ctx) -> ScalarValue {
    if (args.empty() || args[0].kind != ExternArg::Kind::String)
      throw InterpError("printf: first argument must be a format string");
    std::string text = format_printf(args[0].text, args.subspan(1));
    ctx.output += text;
    return static_cast<std::int32_t>(text.size());
  };
  auto state = std::make_shared<std::uint32_t>(1);
  s.functions["rand"] = [state](std::span<const ExternArg>, ExternContext&) -> ScalarValue {
    *state = *state * 1103515245u + 12345u;
    return static_cast<std::int32_t>((*state / 65536u) % 32768u);
  };
  s.functions["exp"] = [](std::span<const ExternArg> args, ExternContext&) -> ScalarValue {
    if (args.size() != 1 || args[0].kind != ExternArg::Kind::Scalar) throw InterpError("exp: expects one number");
    return std::exp(std::get<float>(convert(args[0].scalar, ScalarKind::Float32)));
  };
  s.values["RAND_MAX"] = std::int32_t{32767};
  return s;
}

namespace {

class Interpreter {
 public:
  Interpreter(const TypedProgram& p, const Linearization& lin, const InterpOptions& o, const ExternStubs& s)
      : prog_(p), lin_(lin), opts_(o), stubs_(s) {}

  Trace run() {
    for (const auto& o : prog_.arena_objects)
      storage_.emplace_back(static_cast<std::size_t>(o.element_count), convert(std::int32_t{0}, o.element));
    for (int act : lin_.init_activations) call(act, {});
    if (lin_.pipeline_activation >= 0)
      for (std::uint64_t n = 0; n < opts_.iterations; ++n) call(lin_.pipeline_activation, {});
    for (std::size_t i = 0; i < storage_.size(); ++i) trace_.values[static_cast<int>(i)] = storage_[i];
    return std::move(trace_);
  }

 private:
  struct Frame {
    int act = 0;
    std::unordered_map<const Symbol*, ScalarValue> scalars;
  };

  struct ArrayRef {
    std::vector<ScalarValue>* data = nullptr;
    const Type* type = nullptr;
    int instance = -1;
    int object = -1;
  };

  ScalarValue call(int act, const std::vector<ScalarValue>& scalar_args) {
    const FunctionInfo* f = lin_.activations.at(act).function;
    Frame fr;
    fr.act = act;
    for (const auto& s : f->symbols)
      if (s->storage == Storage::Stack) fr.scalars[s.get()] = convert(std::int32_t{0}, s->type.scalar);
    std::size_t k = 0;
    for (const Symbol* p : f->params)
      if (!p->type.is_array()) fr.scalars[p] = convert(scalar_args.at(k++), p->type.scalar);
    int saved = point_;
    std::optional<ScalarValue> r = exec_body(f->def->body, fr);
    point_ = saved;
    if (f->return_type.is_void()) return std::int32_t{0};
    return convert(r.value_or(std::int32_t{0}), f->return_type.scalar);
  }

  std::optional<ScalarValue> exec_body(const std::vector<ast::StmtPtr>& body, Frame& fr) {
    for (const auto& s : body) {
      if (auto r = exec(*s, fr)) return r;
    }
    return std::nullopt;
  }

  void enter(const ast::Stmt& s, const Frame& fr) { point_ = lin_.point_of.at({&s, fr.act}); }

  void record(int instance, Access kind) {
    if (!opts_.record_trace) return;
    if (point_ != run_point_) {
      run_point_ = point_;
      run_seen_.clear();
    }
    for (const auto& [i, k] : run_seen_)
      if (i == instance && k == kind) return;
    run_seen_.emplace_back(instance, kind);
    trace_.records.push_back({point_, lin_.instances[instance].object, instance, kind});
  }

  ArrayRef array(const Symbol* s, const Frame& fr) {
    int inst = lin_.instance_of(s, fr.act);
    if (inst < 0) throw InterpError("internal: array '" + (s ? s->name : std::string("?")) + "' has no instance");
    int obj = lin_.instances[inst].object;
    return {&storage_[obj], &s->type, inst, obj};
  }

  std::size_t flat_index(const ArrayRef& a, const std::vector<std::int64_t>& idx, SourceSpan span) {
    const auto& d = a.type->dims;
    if (idx.size() != d.size()) throw InterpError("internal: rank mismatch");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (idx[k] < 0 || idx[k] >= d[k])
        throw InterpError("index " + std::to_string(idx[k]) + " out of bounds for extent " +
                          std::to_string(d[k]) + " at line " + std::to_string(span.line));
      flat = flat * static_cast<std::size_t>(d[k]) + static_cast<std::size_t>(idx[k]);
    }
    return flat;
  }

  std::uint64_t address_of(int object) const {
    if (opts_.layout) return opts_.fake_arena_base + opts_.layout->offsets.at(object);
    return opts_.fake_arena_base + static_cast<std::uint64_t>(object) * 0x10000u;
  }

  ScalarValue read(ArrayRef& a, std::size_t flat) {
    record(a.instance, Access::Read);
    return (*a.data)[flat];
  }

  void write(ArrayRef& a, std::size_t flat, const ScalarValue& v) {
    record(a.instance, Access::Write);
    (*a.data)[flat] = convert(v, a.type->scalar);
  }

  float dot(const ast::Expr& e, Frame& fr) {
    ArrayRef a = array(e.operands[0]->symbol, fr);
    ArrayRef b = array(e.operands[1]->symbol, fr);
    float acc = 0.0f;
    for (std::size_t i = 0; i < a.data->size(); ++i) {
      float prod = std::get<float>(read(a, i)) * std::get<float>(read(b, i));
      acc = acc + prod;
    }
    return acc;
  }

  ScalarValue eval(const ast::Expr& e, Frame& fr) {
    switch (e.kind) {
      case ast::ExprKind::IntLit:
        return convert(ScalarValue{e.int_value}, e.type.scalar);
      case ast::ExprKind::FloatLit:
        return std::strtof(e.text.c_str(), nullptr);
      case ast::ExprKind::StrLit:
        throw InterpError("internal: string literal used as a number");
      case ast::ExprKind::Name: {
        const Symbol* s = e.symbol;
        if (!s) {
          auto it = stubs_.values.find(e.external ? e.external->name : e.text);
          if (it == stubs_.values.end()) throw InterpError("no stub value for external '" + e.text + "'");
          return convert(it->second, e.type.scalar);
        }
        if (s->storage == Storage::Constant) return s->const_value;
        auto it = fr.scalars.find(s);
        if (it == fr.scalars.end()) throw InterpError("internal: scalar '" + s->name + "' not in frame");
        return it->second;
      }
      case ast::ExprKind::Index: {
        std::vector<std::int64_t> idx;
        for (std::size_t i = 1; i < e.operands.size(); ++i) idx.push_back(as_i64(eval(*e.operands[i], fr)));
        ArrayRef a = array(e.operands[0]->symbol, fr);
        return read(a, flat_index(a, idx, e.span));
      }
      case ast::ExprKind::Binary: {
        if (e.array_op == ast::ArrayOp::Dot) return dot(e, fr);
        ScalarValue l = eval(*e.operands[0], fr);
        ScalarValue r = eval(*e.operands[1], fr);
        return apply_binary(e.op, l, r, e.type.scalar);
      }
      case ast::ExprKind::Cast: {
        const ast::Expr& a = *e.operands[0];
        if (a.type.is_array()) {
          ArrayRef ar = array(a.symbol, fr);
          record(ar.instance, Access::Read);
          return address_of(ar.object);
        }
        return convert(eval(a, fr), e.type.scalar);
      }
      case ast::ExprKind::Call:
        return eval_call(e, fr);
    }
    return std::int32_t{0};
  }

  ScalarValue eval_call(const ast::Expr& e, Frame& fr) {
    if (e.call_target == ast::CallTarget::Function || e.call_target == ast::CallTarget::Next) {
      auto it = lin_.call_activation.find({&e, fr.act});
      if (it == lin_.call_activation.end()) {
        if (e.call_target == ast::CallTarget::Next) return std::int32_t{0};  // last stage
        throw InterpError("internal: call to '" + e.text + "' was not linearized");
      }
      const FunctionInfo* callee = lin_.activations[it->second].function;
      std::vector<ScalarValue> args;
      for (std::size_t i = 0; i < e.operands.size(); ++i)
        if (!callee->params[i]->type.is_array()) args.push_back(eval(*e.operands[i], fr));
      int saved = point_;
      ScalarValue r = call(it->second, args);
      point_ = saved;
      return r;
    }
    const ExternInfo* x = e.external;
    std::string name = x ? x->name : e.text;
    auto stub = stubs_.functions.find(name);
    if (stub == stubs_.functions.end()) throw InterpError("no stub for external function '" + name + "'");
    std::vector<ExternArg> args;
    for (const auto& o : e.operands) {
      ExternArg a;
      if (o->kind == ast::ExprKind::StrLit) {
        a.kind = ExternArg::Kind::String;
        a.text = decode_string_literal(o->text);
      } else if (o->type.is_array()) {
        ArrayRef ar = array(o->symbol, fr);
        record(ar.instance, Access::Read);
        a.kind = ExternArg::Kind::Array;
        a.address = address_of(ar.object);
      } else {
        a.scalar = eval(*o, fr);
      }
      args.push_back(std::move(a));
    }
    ExternContext ctx{trace_.output};
    ScalarValue r = stub->second(args, ctx);
    if (!x || x->result.is_void()) return std::int32_t{0};
    return convert(r, x->result.scalar);
  }

  ScalarValue elementwise(const ast::Expr& e, std::size_t flat, Frame& fr) {
    if (e.kind == ast::ExprKind::Name) {
      ArrayRef a = array(e.symbol, fr);
      return read(a, flat);
    }
    ScalarValue l = elementwise(*e.operands[0], flat, fr);
    ScalarValue r = elementwise(*e.operands[1], flat, fr);
    return apply_binary(e.op, l, r, e.type.scalar);
  }

  void whole_assign(const ast::Stmt& s, Frame& fr) {
    const Symbol* t = s.target;
    const ast::Expr& rhs = *s.value;
    switch (s.form) {
      case ast::AssignForm::Scalar: {
        ScalarValue v = eval(rhs, fr);
        fr.scalars[t] = convert(v, t->type.scalar);
        return;
      }
      case ast::AssignForm::Fill: {
        ScalarValue v = convert(eval(rhs, fr), t->type.scalar);
        ArrayRef a = array(t, fr);
        for (std::size_t i = 0; i < a.data->size(); ++i) write(a, i, v);
        return;
      }
      case ast::AssignForm::Copy: {
        ArrayRef a = array(t, fr);
        ArrayRef b = array(rhs.symbol, fr);
        for (std::size_t i = 0; i < a.data->size(); ++i) write(a, i, read(b, i));
        return;
      }
      case ast::AssignForm::Elementwise: {
        ArrayRef a = array(t, fr);
        for (std::size_t i = 0; i < a.data->size(); ++i) write(a, i, elementwise(rhs, i, fr));
        return;
      }
      case ast::AssignForm::Contraction: {
        ArrayRef out = array(t, fr);
        ArrayRef a = array(rhs.operands[0]->symbol, fr);
        ArrayRef b = array(rhs.operands[1]->symbol, fr);
        const auto& ad = a.type->dims;
        const auto& bd = b.type->dims;
        if (rhs.array_op == ast::ArrayOp::VecMat) {
          std::size_t n = static_cast<std::size_t>(ad[0]), m = static_cast<std::size_t>(bd[1]);
          for (std::size_t j = 0; j < m; ++j) {
            float acc = 0.0f;
            for (std::size_t i = 0; i < n; ++i) {
              float prod = std::get<float>(read(a, i)) * std::get<float>(read(b, i * m + j));
              acc = acc + prod;
            }
            write(out, j, acc);
          }
        } else {
          std::size_t n = static_cast<std::size_t>(ad[0]), m = static_cast<std::size_t>(ad[1]);
          for (std::size_t i = 0; i < n; ++i) {
            float acc = 0.0f;
            for (std::size_t j = 0; j < m; ++j) {
              float prod = std::get<float>(read(a, i * m + j)) * std::get<float>(read(b, j));
              acc = acc + prod;
            }
            write(out, i, acc);
          }
        }
        return;
      }
    }
  }

  std::optional<ScalarValue> exec(const ast::Stmt& s, Frame& fr) {
    switch (s.kind) {
      case ast::StmtKind::Pass:
        enter(s, fr);
        return std::nullopt;
      case ast::StmtKind::Decl:
        enter(s, fr);
        if (s.value) whole_assign(s, fr);
        return std::nullopt;
      case ast::StmtKind::Assign:
        enter(s, fr);
        whole_assign(s, fr);
        return std::nullopt;
      case ast::StmtKind::ElemAssign: {
        enter(s, fr);
        std::vector<std::int64_t> idx;
        for (const auto& i : s.indices) idx.push_back(as_i64(eval(*i, fr)));
        ScalarValue v = eval(*s.value, fr);
        ArrayRef a = array(s.target, fr);
        write(a, flat_index(a, idx, s.span), v);
        return std::nullopt;
      }
      case ast::StmtKind::For: {
        enter(s, fr);
        std::int32_t lo = std::get<std::int32_t>(convert(eval(*s.lower, fr), ScalarKind::Int32));
        std::int32_t hi = std::get<std::int32_t>(convert(eval(*s.upper, fr), ScalarKind::Int32));
        std::int32_t i = lo;
        for (; i < hi; ++i) {
          fr.scalars[s.target] = i;
          exec_body(s.body, fr);
        }
        fr.scalars[s.target] = i;
        return std::nullopt;
      }
      case ast::StmtKind::ExprStmt:
        enter(s, fr);
        eval(*s.value, fr);
        return std::nullopt;
      case ast::StmtKind::Return: {
        enter(s, fr);
        if (!s.value) return ScalarValue{std::int32_t{0}};
        return eval(*s.value, fr);
      }
    }
    return std::nullopt;
  }

  const TypedProgram& prog_;
  const Linearization& lin_;
  const InterpOptions& opts_;
  const ExternStubs& stubs_;
  Trace trace_;
  std::vector<std::vector<ScalarValue>> storage_;
  int point_ = -1;
  int run_point_ = -2;
  std::vector<std::pair<int, Access>> run_seen_;
};

}  // namespace

Trace interpret(const TypedProgram& program, const Linearization& lin, const InterpOptions& opts,
                const ExternStubs& stubs) {
  if (!program.typed) throw InterpError("interpret needs a type-checked program");
  return Interpreter(program, lin, opts, stubs).run();
}

}  // namespace motepy
