// Copyright 2026 The MotePy Authors
// SPDX-License-Identifier: Apache-2.0

#include "motepy/lifetime.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace motepy {

int Linearization::instance_of(const Symbol* s, int activation) const {
  if (!s || !s->type.is_array()) return -1;
  if (s->storage == Storage::ParameterAlias) {
    const auto& b = activations.at(activation).bindings;
    auto it = b.find(s);
    return it == b.end() ? -1 : it->second;
  }
  if (s->storage != Storage::Arena) return -1;
  auto it = local_instance.find({s, s->function.empty() ? -1 : activation});
  return it == local_instance.end() ? -1 : it->second;
}

std::vector<int> Linearization::successors(int point) const {
  const int n = static_cast<int>(points.size());
  auto wrap = [&](int q) { return q < n ? q : (loop_first < n ? loop_first : -1); };
  std::vector<int> out;
  auto add = [&](int q) {
    if (q >= 0 && std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
  };
  add(wrap(point + 1));
  for (const auto& l : loops) {
    if (l.header == point) add(wrap(l.body_last + 1));
    if (l.body_last == point) add(l.body_first);
  }
  return out;
}

bool InstanceSet::merge(const InstanceSet& o) {
  bool changed = false;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i] | o.words_[i];
    changed |= w != words_[i];
    words_[i] = w;
  }
  return changed;
}

namespace {

class Linearizer {
 public:
  Linearizer(const TypedProgram& p, Linearization& lin) : prog_(p), lin_(lin) {}

  void run() {
    for (const auto& o : prog_.arena_objects) {
      if (!o.global) continue;
      lin_.local_instance[{o.symbol, -1}] = add_instance(o.id, -1);
    }
    phase_ = Phase::Init;
    for (ModuleInfo* m : prog_.init_order()) {
      if (!m->init) continue;
      int act = new_activation(m->init, -1, {});
      lin_.init_activations.push_back(act);
      emit_body(m->init->def->body, act);
    }
    lin_.loop_first = static_cast<int>(lin_.points.size());
    phase_ = Phase::Loop;
    if (!prog_.stages.empty()) {
      const FunctionInfo* first = prog_.stages.front().flow;
      lin_.pipeline_activation = new_activation(first, -1, {});
      emit_body(first->def->body, lin_.pipeline_activation);
    }
  }

 private:
  int add_instance(int object, int activation) {
    Instance inst;
    inst.id = static_cast<int>(lin_.instances.size());
    inst.object = object;
    inst.activation = activation;
    lin_.instances.push_back(inst);
    return inst.id;
  }

  int new_activation(const FunctionInfo* f, int parent, std::map<const Symbol*, int> bindings) {
    Activation a;
    a.id = static_cast<int>(lin_.activations.size());
    a.function = f;
    a.parent = parent;
    a.bindings = std::move(bindings);
    lin_.activations.push_back(std::move(a));
    int id = lin_.activations.back().id;
    for (const auto& s : f->symbols)
      if (s->storage == Storage::Arena && s->arena_object >= 0)
        lin_.local_instance[{s.get(), id}] = add_instance(s->arena_object, id);
    return id;
  }

  std::map<const Symbol*, int> bind(const FunctionInfo* callee, const ast::Expr& call, int act) {
    std::map<const Symbol*, int> b;
    for (std::size_t i = 0; i < callee->params.size() && i < call.operands.size(); ++i) {
      if (!callee->params[i]->type.is_array()) continue;
      b[callee->params[i]] = lin_.instance_of(call.operands[i]->symbol, act);
    }
    return b;
  }

  void add_point(const ast::Stmt& s, int act) {
    ProgramPoint p;
    p.index = static_cast<int>(lin_.points.size());
    p.stmt = &s;
    p.phase = phase_;
    p.activation = act;
    lin_.point_of[{&s, act}] = p.index;
    lin_.points.push_back(p);
  }

  void splice_calls(const ast::Expr* e, int act) {
    if (!e) return;
    for (const auto& o : e->operands) splice_calls(o.get(), act);
    if (e->kind != ast::ExprKind::Call || e->call_target != ast::CallTarget::Function) return;
    const FunctionInfo* callee = e->callee;
    int child = new_activation(callee, act, bind(callee, *e, act));
    lin_.call_activation[{e, act}] = child;
    emit_body(callee->def->body, child);
  }

  void emit_body(const std::vector<ast::StmtPtr>& body, int act) {
    for (const auto& s : body) emit_stmt(*s, act);
  }

  void emit_stmt(const ast::Stmt& s, int act) {
    if (s.kind == ast::StmtKind::For) {
      splice_calls(s.lower.get(), act);
      splice_calls(s.upper.get(), act);
      LoopRange r;
      r.header = static_cast<int>(lin_.points.size());
      add_point(s, act);
      r.body_first = static_cast<int>(lin_.points.size());
      emit_body(s.body, act);
      r.body_last = static_cast<int>(lin_.points.size()) - 1;
      lin_.loops.push_back(r);
      return;
    }
    for (const auto& i : s.indices) splice_calls(i.get(), act);
    splice_calls(s.value.get(), act);
    add_point(s, act);
    if (s.kind == ast::StmtKind::ExprStmt && s.value->call_target == ast::CallTarget::Next) {
      const FunctionInfo* self = lin_.activations[act].function;
      std::size_t k = static_cast<std::size_t>(self->stage_index) + 1;
      if (self->stage_index < 0 || k >= prog_.stages.size()) return;
      const FunctionInfo* down = prog_.stages[k].flow;
      int child = new_activation(down, act, bind(down, *s.value, act));
      lin_.call_activation[{s.value.get(), act}] = child;
      emit_body(down->def->body, child);
    }
  }

  const TypedProgram& prog_;
  Linearization& lin_;
  Phase phase_ = Phase::Init;
};

void add_unique(std::vector<int>& v, int x) {
  if (x >= 0 && std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

void collect_uses(const Linearization& lin, const ast::Expr* e, int act, DefsUses& du) {
  if (!e) return;
  if (e->kind == ast::ExprKind::Name) {
    add_unique(du.uses, lin.instance_of(e->symbol, act));
    return;
  }
  if (e->kind == ast::ExprKind::Call && e->call_target == ast::CallTarget::Extern) {
    for (const auto& o : e->operands)
      if (o->kind == ast::ExprKind::Name) add_unique(du.escapes, lin.instance_of(o->symbol, act));
  }
  for (const auto& o : e->operands) collect_uses(lin, o.get(), act, du);
}

}  // namespace

Linearization linearize(const TypedProgram& program) {
  Linearization lin;
  Linearizer(program, lin).run();
  return lin;
}

DefsUses defs_uses(const Linearization& lin, int point) {
  DefsUses du;
  const ProgramPoint& p = lin.points.at(point);
  const ast::Stmt& s = *p.stmt;
  int act = p.activation;
  switch (s.kind) {
    case ast::StmtKind::Decl:
    case ast::StmtKind::Assign: {
      if (!s.value) break;
      collect_uses(lin, s.value.get(), act, du);
      int t = lin.instance_of(s.target, act);
      add_unique(du.defs, t);
      add_unique(du.kills, t);
      break;
    }
    case ast::StmtKind::ElemAssign: {
      for (const auto& i : s.indices) collect_uses(lin, i.get(), act, du);
      collect_uses(lin, s.value.get(), act, du);
      int t = lin.instance_of(s.target, act);
      add_unique(du.uses, t);
      add_unique(du.defs, t);
      break;
    }
    case ast::StmtKind::For:
      collect_uses(lin, s.lower.get(), act, du);
      collect_uses(lin, s.upper.get(), act, du);
      break;
    case ast::StmtKind::ExprStmt:
    case ast::StmtKind::Return:
      collect_uses(lin, s.value.get(), act, du);
      break;
    case ast::StmtKind::Pass:
      break;
  }
  return du;
}

Liveness compute_liveness(const Linearization& lin) {
  const std::size_t n = lin.points.size();
  const std::size_t m = lin.instances.size();
  Liveness lv;
  lv.transfer.reserve(n);
  std::vector<std::vector<int>> succ(n);
  for (std::size_t p = 0; p < n; ++p) {
    lv.transfer.push_back(defs_uses(lin, static_cast<int>(p)));
    succ[p] = lin.successors(static_cast<int>(p));
  }
  lv.live_in.assign(n, InstanceSet(m));
  lv.live_out.assign(n, InstanceSet(m));
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = n; k-- > 0;) {
      InstanceSet out(m);
      for (int s : succ[k]) out.merge(lv.live_in[s]);
      InstanceSet in = out;
      for (int x : lv.transfer[k].kills) in.reset(x);
      for (int x : lv.transfer[k].uses) in.set(x);
      if (!(in == lv.live_in[k])) {
        lv.live_in[k] = std::move(in);
        changed = true;
      }
      lv.live_out[k] = std::move(out);
    }
  }
  return lv;
}

std::vector<LiveInterval> live_intervals(const TypedProgram& program, const Linearization& lin,
                                         const Liveness& liveness, std::vector<Diagnostic>* warnings) {
  const int n = static_cast<int>(lin.points.size());
  std::vector<LiveInterval> out;
  std::vector<bool> object_touched(program.arena_objects.size(), false);
  for (const auto& inst : lin.instances) {
    LiveInterval iv;
    iv.object = inst.object;
    iv.instance = inst.id;
    int lo = -1, hi = -1;
    bool init_def = false, loop_use = false, escapes = false;
    for (int p = 0; p < n; ++p) {
      const DefsUses& du = liveness.transfer[p];
      auto has = [&](const std::vector<int>& v) {
        return std::find(v.begin(), v.end(), inst.id) != v.end();
      };
      bool used = has(du.uses), defined = has(du.defs);
      escapes |= has(du.escapes);
      if (defined && lin.points[p].phase == Phase::Init) init_def = true;
      if (used && lin.points[p].phase == Phase::Loop) loop_use = true;
      if (used || defined || liveness.live_in[p].test(inst.id)) {
        if (lo < 0) lo = p;
        hi = p;
      }
    }
    bool live_at_entry = lin.loop_first < n && liveness.live_in[lin.loop_first].test(inst.id);
    iv.persistent = live_at_entry || (init_def && loop_use) || escapes;
    if (lo < 0) {
      // Never touched: pin it to its declaration point.
      int decl = 0;
      if (inst.activation >= 0) {
        const Symbol* sym = program.arena_objects[inst.object].symbol;
        for (int p = 0; p < n; ++p) {
          const auto& pt = lin.points[p];
          if (pt.activation == inst.activation && pt.stmt->kind == ast::StmtKind::Decl &&
              pt.stmt->target == sym) {
            decl = p;
            break;
          }
        }
      }
      lo = hi = decl;
    } else {
      object_touched[inst.object] = true;
    }
    iv.start = lo;
    iv.end = hi;
    out.push_back(iv);
  }
  if (warnings) {
    for (const auto& o : program.arena_objects)
      if (!object_touched[o.id])
        warnings->push_back({Severity::Warning, o.symbol->span,
                             "array '" + o.display_name + "' is never used; it still gets arena space"});
  }
  return out;
}

LifetimeResult analyze_lifetimes(TypedProgram& program) {
  LifetimeResult r;
  r.lin = linearize(program);
  r.liveness = compute_liveness(r.lin);
  r.intervals = live_intervals(program, r.lin, r.liveness, &program.warnings);
  return r;
}

std::string dump_liveness(const TypedProgram& program, const LifetimeResult& lt) {
  std::ostringstream os;
  for (const auto& iv : lt.intervals) {
    const ArenaObject& o = program.arena_objects[iv.object];
    os << o.display_name << ' ' << iv.start << ' ' << iv.end << " persistent=" << (iv.persistent ? 1 : 0)
       << " size=" << o.byte_size << '\n';
  }
  os << "# points:";
  for (const auto& p : lt.lin.points) {
    std::string file = program.sources
                           ? std::filesystem::path(program.sources->name(p.stmt->span.file)).filename().string()
                           : "?";
    os << ' ' << p.index << '=' << file << ':' << p.stmt->span.line;
  }
  os << '\n';
  return os.str();
}

}  // namespace motepy
