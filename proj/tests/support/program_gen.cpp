// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include "program_gen.hpp"

#include <functional>
#include <random>
#include <sstream>

namespace motepy::testing {

std::string GeneratedProgram::listing() const {
  std::string s = "# pipeline.py\n" + pipeline;
  for (const auto& [name, text] : modules) s += "# " + name + ".py\n" + text;
  return s;
}

namespace {

struct Arr {
  std::string name;
  bool is_float = true;
  std::vector<int> dims;
  std::vector<std::string> spelled;  // extents as written in the declaration
  bool whole = true;                 // whole assignment allowed (not a parameter)
  bool local = false;

  bool same_type(const Arr& o) const { return is_float == o.is_float && dims == o.dims; }
  std::string type_text() const {
    std::string t = is_float ? "float" : "int32_t";
    for (const auto& d : spelled) t += "[" + d + "]";
    return t;
  }
};

struct Helper {
  std::string name;
  std::vector<Arr> params;  // array parameters, in order
  bool scalar_param = false;
  bool returns_float = false;
};

struct Ctx {
  std::vector<Arr> arrays;
  std::vector<std::string> scalars;  // float locals
  std::vector<std::string> scalar_params;
  std::vector<std::pair<std::string, int>> loop_vars;  // enclosing loops: name, extent
  bool in_helper = false;
  std::size_t callable_helpers = 0;
  int indent = 1;
};

class Gen {
 public:
  Gen(std::uint64_t seed, const GenOptions& o) : rng_(seed), o_(o) {}

  GeneratedProgram run() {
    GeneratedProgram p;
    int stages = pick(1, o_.max_stages);
    std::vector<Arr> params;
    p.pipeline = "[\n";
    for (int k = 0; k < stages; ++k) {
      std::string name = "m" + std::to_string(k);
      bool last = k + 1 == stages;
      std::vector<Arr> next_params;
      p.modules.emplace_back(name, module(params, last, next_params));
      params = next_params;
      p.pipeline += "  " + name + ".step" + (last ? "\n" : ",\n");
    }
    p.pipeline += "]\n";
    return p;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <class T>
  const T& choose(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))];
  }

  void line(int indent, const std::string& text) { out_ << std::string(4 * indent, ' ') << text << '\n'; }

  std::string float_literal() {
    int q = pick(-32, 32);
    std::ostringstream os;
    os << q / 4 << '.' << (std::abs(q) % 4) * 25;
    std::string s = os.str();
    if (q < 0 && q / 4 == 0) s = "-" + s;
    return s;
  }

  std::string spell(int extent) {
    for (const auto& [n, v] : consts_)
      if (v == extent && chance(0.6)) return n;
    return std::to_string(extent);
  }

  Arr make_array(const std::string& name, bool is_float, std::vector<int> dims) {
    Arr a;
    a.name = name;
    a.is_float = is_float;
    a.dims = std::move(dims);
    for (int d : a.dims) a.spelled.push_back(spell(d));
    return a;
  }

  std::vector<int> random_dims() {
    if (chance(0.3)) return {choose(extents_), choose(extents_)};
    return {choose(extents_)};
  }

  std::string module(const std::vector<Arr>& flow_params, bool last, std::vector<Arr>& next_params) {
    out_.str("");
    consts_.clear();
    extents_.clear();
    helpers_.clear();
    int n_ext = pick(1, 3);
    for (int i = 0; i < n_ext; ++i) {
      int e = pick(1, o_.max_extent);
      extents_.push_back(e);
      if (chance(0.7)) {
        std::string c = std::string(1, static_cast<char>('A' + i));
        consts_.emplace_back(c, e);
        line(0, c + " : const int32_t = " + std::to_string(e));
      }
    }
    // Flow parameters must be expressible with this module's extents.
    for (const auto& p : flow_params)
      for (int d : p.dims) extents_.push_back(d);

    std::vector<Arr> globals;
    int n_glob = pick(1, 5);
    for (int i = 0; i < n_glob; ++i) {
      bool is_float = chance(0.8);
      Arr g = make_array((is_float ? "g" : "q") + std::to_string(i), is_float, random_dims());
      line(0, g.name + ": " + g.type_text());
      globals.push_back(g);
    }
    // Products need compatible shapes; add a matching pair now and then.
    if (o_.contractions && chance(0.7)) {
      int n = choose(extents_), m = choose(extents_);
      Arr w = make_array("w0", true, {n, m});
      Arr x = make_array("x0", true, {n});
      Arr y = make_array("y0", true, {m});
      for (const Arr* a : {&w, &x, &y}) {
        line(0, a->name + ": " + a->type_text());
        globals.push_back(*a);
      }
    }
    out_ << '\n';

    if (o_.helpers) {
      int n_help = pick(0, 2);
      for (int i = 0; i < n_help; ++i) helper(globals, i);
    }

    line(0, "def init() -> void:");
    {
      Ctx c;
      c.arrays = globals;
      c.callable_helpers = helpers_.size();
      int n = pick(0, 3);
      for (int i = 0; i < n; ++i) statement(c);
      if (n == 0) line(1, "pass");
    }
    out_ << '\n';

    if (!last) {
      int n_params = pick(0, 2);
      for (int i = 0; i < n_params; ++i) {
        Arr p = choose(globals);
        p.name = "p" + std::to_string(i);
        p.whole = false;
        p.spelled.clear();
        for (int d : p.dims) p.spelled.push_back(std::to_string(d));
        next_params.push_back(p);
      }
    }

    line(0, "@flow");
    std::string sig;
    for (const auto& p : flow_params) sig += (sig.empty() ? "" : ", ") + p.name + ": " + p.type_text();
    line(0, "def step(" + sig + ") -> void:");
    Ctx c;
    c.arrays = globals;
    for (auto p : flow_params) {
      p.whole = false;
      c.arrays.push_back(p);
    }
    c.callable_helpers = helpers_.size();
    locals(c);
    int n = pick(2, 8);
    int next_at = last ? -1 : pick(0, n);
    for (int i = 0; i <= n; ++i) {
      if (i == next_at) {
        std::string args;
        for (const auto& p : next_params) {
          std::vector<Arr> cand;
          for (const auto& a : c.arrays)
            if (a.same_type(p)) cand.push_back(a);
          args += (args.empty() ? "" : ", ") + choose(cand).name;
        }
        line(1, "next(" + args + ")");
      }
      if (i < n) statement(c);
    }
    print_state(c);
    return out_.str();
  }

  void locals(Ctx& c) {
    int n_scalars = pick(0, 2);
    for (int i = 0; i < n_scalars; ++i) {
      std::string s = "s" + std::to_string(i);
      line(c.indent, s + ": float" + (chance(0.5) ? " = " + float_literal() : std::string()));
      c.scalars.push_back(s);
    }
    int n_arrays = pick(0, 2);
    for (int i = 0; i < n_arrays; ++i) {
      Arr t = make_array("t" + std::to_string(i), true, random_dims());
      t.local = true;
      line(c.indent, t.name + ": " + t.type_text() + " = " + float_literal());
      c.arrays.push_back(t);
    }
  }

  void helper(const std::vector<Arr>& globals, int index) {
    Helper h;
    h.name = "h" + std::to_string(index);
    h.returns_float = chance(0.6);
    h.scalar_param = chance(0.5);
    int n_arr = pick(1, 2);
    for (int i = 0; i < n_arr; ++i) {
      Arr p = make_array("a" + std::to_string(i), chance(0.85), random_dims());
      p.whole = false;
      h.params.push_back(p);
    }
    std::string sig;
    for (const auto& p : h.params) sig += (sig.empty() ? "" : ", ") + p.name + ": " + p.type_text();
    if (h.scalar_param) sig += ", k: float";
    line(0, "def " + h.name + "(" + sig + ") -> " + (h.returns_float ? "float" : "void") + ":");
    Ctx c;
    c.in_helper = true;
    c.arrays = globals;
    for (const auto& p : h.params) c.arrays.push_back(p);
    if (h.scalar_param) c.scalar_params.push_back("k");
    c.callable_helpers = helpers_.size();
    locals(c);
    int n = pick(1, 4);
    for (int i = 0; i < n; ++i) statement(c);
    if (h.returns_float) line(1, "return " + fexpr(c, 2));
    out_ << '\n';
    helpers_.push_back(h);
  }

  std::string index_for(const Ctx& c, int extent) {
    std::vector<std::string> vars;
    for (const auto& [v, e] : c.loop_vars)
      if (e == extent) vars.push_back(v);
    if (!vars.empty() && chance(0.85)) return choose(vars);
    return std::to_string(pick(0, extent - 1));
  }

  std::string element(const Ctx& c, const Arr& a) {
    std::string s = a.name;
    for (int d : a.dims) s += "[" + index_for(c, d) + "]";
    return s;
  }

  std::string fexpr(const Ctx& c, int depth) {
    int k = pick(0, depth > 0 ? 9 : 5);
    switch (k) {
      case 0:
      case 1:
        return float_literal();
      case 2:
        if (!c.scalars.empty()) return choose(c.scalars);
        if (!c.scalar_params.empty()) return choose(c.scalar_params);
        return float_literal();
      case 3:
      case 4: {
        const Arr& a = choose(c.arrays);
        return a.is_float ? element(c, a) : "float(" + element(c, a) + ")";
      }
      case 5:
        if (!c.loop_vars.empty()) return "float(" + choose(c.loop_vars).first + ")";
        return float_literal();
      case 9:
        if (chance(0.3)) return "exp(" + fexpr(c, 0) + " / 8.0)";
        return "(" + fexpr(c, depth - 1) + " / " + (chance(0.5) ? "2.0" : "-4.0") + ")";
      default: {
        static const char* ops[] = {" + ", " - ", " * "};
        return "(" + fexpr(c, depth - 1) + ops[pick(0, 2)] + fexpr(c, depth - 1) + ")";
      }
    }
  }

  // Integer values only grow linearly so nothing can overflow.
  std::string iexpr(const Ctx& c) {
    switch (pick(0, 3)) {
      case 0:
        return std::to_string(pick(-8, 8));
      case 1:
        if (!c.loop_vars.empty()) return choose(c.loop_vars).first;
        return std::to_string(pick(-8, 8));
      default: {
        std::vector<Arr> ints;
        for (const auto& a : c.arrays)
          if (!a.is_float) ints.push_back(a);
        if (ints.empty()) return std::to_string(pick(-8, 8));
        return "(" + element(c, choose(ints)) + " + " + std::to_string(pick(-3, 3)) + ")";
      }
    }
  }

  std::string value_for(const Ctx& c, const Arr& a) { return a.is_float ? fexpr(c, 2) : iexpr(c); }

  std::vector<Arr> filter(const Ctx& c, const std::function<bool(const Arr&)>& f) {
    std::vector<Arr> r;
    for (const auto& a : c.arrays)
      if (f(a)) r.push_back(a);
    return r;
  }

  void statement(Ctx& c) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      int k = pick(0, 10);
      if (try_statement(c, k)) return;
    }
    line(c.indent, "pass");
  }

  bool try_statement(Ctx& c, int kind) {
    switch (kind) {
      case 0: {  // fill
        auto t = filter(c, [](const Arr& a) { return a.whole; });
        if (t.empty()) return false;
        const Arr& a = choose(t);
        line(c.indent, a.name + " = " + (a.is_float ? fexpr(c, 1) : std::to_string(pick(-8, 8))));
        return true;
      }
      case 1: {  // copy
        auto t = filter(c, [](const Arr& a) { return a.whole; });
        if (t.empty()) return false;
        const Arr& a = choose(t);
        auto src = filter(c, [&](const Arr& b) { return b.same_type(a) && b.name != a.name; });
        if (src.empty()) return false;
        line(c.indent, a.name + " = " + choose(src).name);
        return true;
      }
      case 2: {  // elementwise, float only
        auto t = filter(c, [](const Arr& a) { return a.whole && a.is_float; });
        if (t.empty()) return false;
        const Arr& a = choose(t);
        auto ops = filter(c, [&](const Arr& b) { return b.same_type(a); });
        std::string rhs = choose(ops).name;
        int n = pick(1, 2);
        for (int i = 0; i < n; ++i) rhs += (chance(0.5) ? " + " : " - ") + choose(ops).name;
        line(c.indent, a.name + " = " + rhs);
        return true;
      }
      case 3:
        return o_.contractions && contraction(c);
      case 4:
      case 5:
        return element_writes(c);
      case 6: {  // scalar assignment
        if (c.scalars.empty()) return false;
        line(c.indent, choose(c.scalars) + " = " + fexpr(c, 2));
        return true;
      }
      case 7: {  // random fill of a float array
        auto t = filter(c, [](const Arr& a) { return a.is_float; });
        if (t.empty() || (!o_.loops && c.loop_vars.empty())) return false;
        const Arr& a = choose(t);
        with_loops(c, a.dims, [&](Ctx& in) {
          line(in.indent, element(in, a) + " = float(rand()) / RAND_MAX * 16.0 - 8.0");
        });
        return true;
      }
      case 8:
        return call_helper(c);
      case 9: {
        if (c.scalars.empty()) return false;
        line(c.indent, "printf(\"%a\\n\", " + choose(c.scalars) + ")");
        return true;
      }
      default: {  // single element write at constant or enclosing-loop index
        const Arr& a = choose(c.arrays);
        line(c.indent, element(c, a) + " = " + value_for(c, a));
        return true;
      }
    }
  }

  void with_loops(Ctx& c, const std::vector<int>& dims, const std::function<void(Ctx&)>& body) {
    Ctx in = c;
    int base = static_cast<int>(c.loop_vars.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
      std::string v = "i" + std::to_string(base + static_cast<int>(i));
      line(in.indent, "for " + v + " in range(0, " + spell(dims[i]) + "):");
      in.loop_vars.emplace_back(v, dims[i]);
      ++in.indent;
    }
    body(in);
  }

  bool element_writes(Ctx& c) {
    const Arr& a = choose(c.arrays);
    if (!o_.loops || c.loop_vars.size() + a.dims.size() > 4) {
      line(c.indent, element(c, a) + " = " + value_for(c, a));
      return true;
    }
    with_loops(c, a.dims, [&](Ctx& in) {
      line(in.indent, element(in, a) + " = " + value_for(in, a));
      int extra = pick(0, 2);
      for (int i = 0; i < extra; ++i) {
        const Arr& b = choose(in.arrays);
        line(in.indent, element(in, b) + " = " + value_for(in, b));
      }
    });
    return true;
  }

  bool contraction(Ctx& c) {
    auto vecs = filter(c, [](const Arr& a) { return a.is_float && a.dims.size() == 1; });
    auto mats = filter(c, [](const Arr& a) { return a.is_float && a.dims.size() == 2; });
    bool params_involved = false;
    auto target_ok = [&](const Arr& t, const std::vector<const Arr*>& operands) {
      if (!t.whole) return false;
      for (const Arr* o : operands) {
        if (o->name == t.name) return false;
        if (!o->whole) params_involved = true;
      }
      // Inside a helper a parameter may alias any global it was called with.
      return !(c.in_helper && params_involved && !t.local);
    };
    int form = pick(0, 2);
    if (form == 0) {
      if (c.scalars.empty() || vecs.empty()) return false;
      const Arr& x = choose(vecs);
      auto ys = filter(c, [&](const Arr& a) { return a.is_float && a.dims == x.dims; });
      line(c.indent, choose(c.scalars) + " = " + x.name + " * " + choose(ys).name);
      return true;
    }
    if (mats.empty()) return false;
    const Arr& w = choose(mats);
    int in_ext = form == 1 ? w.dims[0] : w.dims[1];
    int out_ext = form == 1 ? w.dims[1] : w.dims[0];
    auto xs = filter(c, [&](const Arr& a) { return a.is_float && a.dims == std::vector<int>{in_ext}; });
    auto ts = filter(c, [&](const Arr& a) { return a.is_float && a.dims == std::vector<int>{out_ext}; });
    if (xs.empty() || ts.empty()) return false;
    const Arr& x = choose(xs);
    std::vector<Arr> ok;
    for (const auto& t : ts) {
      params_involved = false;
      if (target_ok(t, {&x, &w})) ok.push_back(t);
    }
    if (ok.empty()) return false;
    std::string rhs = form == 1 ? x.name + " * " + w.name : w.name + " * " + x.name;
    line(c.indent, choose(ok).name + " = " + rhs);
    return true;
  }

  bool call_helper(Ctx& c) {
    if (c.callable_helpers == 0) return false;
    const Helper& h = helpers_[static_cast<std::size_t>(pick(0, static_cast<int>(c.callable_helpers) - 1))];
    std::string args;
    for (const auto& p : h.params) {
      auto cand = filter(c, [&](const Arr& a) { return a.same_type(p); });
      if (cand.empty()) return false;
      args += (args.empty() ? "" : ", ") + choose(cand).name;
    }
    if (h.scalar_param) args += ", " + fexpr(c, 1);
    std::string call = h.name + "(" + args + ")";
    if (h.returns_float && !c.scalars.empty())
      line(c.indent, choose(c.scalars) + " = " + call);
    else
      line(c.indent, call);
    return true;
  }

  void print_state(Ctx& c) {
    for (const auto& s : c.scalars) line(c.indent, "printf(\"%a\\n\", " + s + ")");
    for (const auto& a : c.arrays) {
      std::string fmt = a.is_float ? "%a\\n" : "%d\\n";
      if (o_.loops) {
        with_loops(c, a.dims, [&](Ctx& in) {
          std::string e = a.name;
          for (std::size_t i = 0; i < a.dims.size(); ++i) e += "[" + in.loop_vars[i].first + "]";
          line(in.indent, "printf(\"" + a.name + " " + fmt + "\", " + e + ")");
        });
      } else {
        int rows = a.dims[0];
        int cols = a.dims.size() > 1 ? a.dims[1] : 0;
        for (int i = 0; i < rows; ++i) {
          if (cols == 0) {
            line(c.indent, "printf(\"" + a.name + " " + fmt + "\", " + a.name + "[" + std::to_string(i) + "])");
          } else {
            for (int j = 0; j < cols; ++j)
              line(c.indent, "printf(\"" + a.name + " " + fmt + "\", " + a.name + "[" + std::to_string(i) +
                                 "][" + std::to_string(j) + "])");
          }
        }
      }
    }
  }

  std::mt19937_64 rng_;
  GenOptions o_;
  std::ostringstream out_;
  std::vector<std::pair<std::string, int>> consts_;
  std::vector<int> extents_;
  std::vector<Helper> helpers_;
};

}  // namespace

GeneratedProgram generate_program(std::uint64_t seed, const GenOptions& opts) { return Gen(seed, opts).run(); }

}  // namespace motepy::testing
