#include "catt/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <unordered_set>

namespace catt {

NameId Interner::intern(std::string_view s) {
  auto it = index_.find(std::string(s));
  if (it != index_.end()) return it->second;
  NameId id = static_cast<NameId>(names_.size());
  names_.emplace_back(s);
  index_.emplace(names_.back(), id);
  return id;
}

const char* err_name(Err e) {
  switch (e) {
    case Err::DuplicateVariable: return "DuplicateVariable";
    case Err::IllTypedEntry: return "IllTypedEntry";
    case Err::NotParallel: return "NotParallel";
    case Err::UnboundVariable: return "UnboundVariable";
    case Err::NotAPastingContext: return "NotAPastingContext";
    case Err::NotFull: return "NotFull";
    case Err::SubstitutionArity: return "SubstitutionArity";
    case Err::SubstitutionOrder: return "SubstitutionOrder";
    case Err::BoundaryMismatch: return "BoundaryMismatch";
    case Err::NotUpClosed: return "NotUpClosed";
    case Err::DepthExceeded: return "DepthExceeded";
    case Err::IndexOutOfRange: return "IndexOutOfRange";
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::FacesMismatch: return "FacesMismatch";
    case Err::UnsupportedIndices: return "UnsupportedIndices";
    case Err::PhasesNotComposable: return "PhasesNotComposable";
    case Err::UnknownName: return "UnknownName";
    case Err::Syntax: return "SyntaxError";
    case Err::Internal: return "Internal";
  }
  return "Unknown";
}

void fail(Err code, const std::string& msg) { throw CattError(code, msg); }

Var Session::fresh_like(Var v, const char* suffix) {
  return fresh(names.str(v.name) + suffix);
}

// ---------------------------------------------------------------------------
// Var id sets

bool vs_contains(const VarIds& s, int64_t id) {
  return std::binary_search(s.begin(), s.end(), id);
}

VarIds vs_union(const VarIds& a, const VarIds& b) {
  VarIds r;
  r.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

VarIds vs_inter(const VarIds& a, const VarIds& b) {
  VarIds r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

VarIds vs_minus(const VarIds& a, const VarIds& b) {
  VarIds r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

bool vs_disjoint(const VarIds& a, const VarIds& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else
      return false;
  }
  return true;
}

void vs_insert(VarIds& s, int64_t id) {
  auto it = std::lower_bound(s.begin(), s.end(), id);
  if (it == s.end() || *it != id) s.insert(it, id);
}

// ---------------------------------------------------------------------------
// Node constructors

int Term::coh_dim() const {
  assert(ps);
  return ty->dim + 1;
}

std::optional<int> Ctx::dim() const {
  if (es.empty()) return std::nullopt;
  int d = 0;
  for (auto& [v, t] : es) d = std::max(d, t->dim + 1);
  return d;
}

bool Ctx::has(int64_t id) const {
  for (auto& [v, t] : es)
    if (v.id == id) return true;
  return false;
}

const TypeP* Ctx::type_of(int64_t id) const {
  for (auto& [v, t] : es)
    if (v.id == id) return &t;
  return nullptr;
}

std::optional<size_t> Ctx::index_of(int64_t id) const {
  for (size_t i = 0; i < es.size(); i++)
    if (es[i].first.id == id) return i;
  return std::nullopt;
}

const TermP* Sub::lookup(int64_t id) const {
  for (auto it = es.rbegin(); it != es.rend(); ++it)
    if (it->first.id == id) return &it->second;
  return nullptr;
}

TypeP obj() {
  static const TypeP o = std::make_shared<Type>();
  return o;
}

TypeP arr(TypeP base, TermP src, TermP tgt) {
  auto t = std::make_shared<Type>();
  t->dim = base->dim + 1;
  t->base = std::move(base);
  t->src = std::move(src);
  t->tgt = std::move(tgt);
  return t;
}

TermP var(Var v) {
  auto t = std::make_shared<Term>();
  t->v = v;
  return t;
}

CtxP make_ctx(std::vector<std::pair<Var, TypeP>> es) {
  auto c = std::make_shared<Ctx>();
  c->es = std::move(es);
  return c;
}

SubP make_sub(std::vector<std::pair<Var, TermP>> es) {
  auto s = std::make_shared<Sub>();
  s->es = std::move(es);
  return s;
}

bool ctx_is_canonical(const Ctx& c) {
  for (size_t i = 0; i < c.es.size(); i++)
    if (c.es[i].first.id != -static_cast<int64_t>(i + 1)) return false;
  return true;
}

static TermP coh_raw(CtxP ps, TypeP ty, SubP s) {
  assert(ps && ctx_is_canonical(*ps));
  auto t = std::make_shared<Term>();
  t->ps = std::move(ps);
  t->ty = std::move(ty);
  t->sub = std::move(s);
  return t;
}

TermP coh(const CtxP& ps, const TypeP& ty, const std::vector<TermP>& images) {
  if (images.size() != ps->size()) fail(Err::SubstitutionArity, "coherence substitution arity mismatch");
  CtxP cps = ps;
  TypeP cty = ty;
  if (!ctx_is_canonical(*ps)) {
    std::vector<std::pair<Var, TermP>> ren;
    ren.reserve(ps->size());
    for (size_t i = 0; i < ps->size(); i++) {
      Var lv{-static_cast<int64_t>(i + 1), ps->es[i].first.name};
      ren.emplace_back(ps->es[i].first, var(lv));
    }
    SubP rsub = make_sub(std::move(ren));
    std::vector<std::pair<Var, TypeP>> nes;
    nes.reserve(ps->size());
    for (size_t i = 0; i < ps->size(); i++) {
      Var lv{-static_cast<int64_t>(i + 1), ps->es[i].first.name};
      nes.emplace_back(lv, apply(ps->es[i].second, rsub));
    }
    cps = make_ctx(std::move(nes));
    cty = apply(ty, rsub);
  }
  std::vector<std::pair<Var, TermP>> ses;
  ses.reserve(images.size());
  for (size_t i = 0; i < images.size(); i++) ses.emplace_back(cps->es[i].first, images[i]);
  return coh_raw(cps, cty, make_sub(std::move(ses)));
}

TermP coh(const CtxP& ps, const TypeP& ty, const SubP& s) {
  if (s->size() != ps->size()) fail(Err::SubstitutionArity, "coherence substitution arity mismatch");
  std::vector<TermP> images;
  images.reserve(s->size());
  for (size_t i = 0; i < s->size(); i++) {
    if (s->es[i].first.id != ps->es[i].first.id)
      fail(Err::SubstitutionOrder, "coherence substitution must follow telescope order");
    images.push_back(s->es[i].second);
  }
  return coh(ps, ty, images);
}

SubP id_sub(const CtxP& c) {
  std::vector<std::pair<Var, TermP>> es;
  es.reserve(c->size());
  for (auto& [v, t] : c->es) es.emplace_back(v, var(v));
  return make_sub(std::move(es));
}

// ---------------------------------------------------------------------------
// Variable sets

const VarIds& vars(const TypeP& t) {
  if (t->vs) return *t->vs;
  VarIds r;
  if (!t->is_obj()) r = vs_union(vars(t->base), vs_union(vars(t->src), vars(t->tgt)));
  t->vs = std::make_shared<const VarIds>(std::move(r));
  return *t->vs;
}

const VarIds& vars(const TermP& t) {
  if (t->vs) return *t->vs;
  VarIds r;
  if (t->is_var())
    r = {t->v.id};
  else
    r = vars(t->sub);
  t->vs = std::make_shared<const VarIds>(std::move(r));
  return *t->vs;
}

const VarIds& vars(const SubP& s) {
  if (s->vs) return *s->vs;
  VarIds r;
  for (auto& [v, t] : s->es) r = vs_union(r, vars(t));
  s->vs = std::make_shared<const VarIds>(std::move(r));
  return *s->vs;
}

const VarIds& dom_ids(const SubP& s) {
  if (s->dom) return *s->dom;
  VarIds r;
  for (auto& [v, t] : s->es) vs_insert(r, v.id);
  s->dom = std::make_shared<const VarIds>(std::move(r));
  return *s->dom;
}

VarIds vars_ctx(const CtxP& c) {
  VarIds r;
  for (auto& [v, t] : c->es) vs_insert(r, v.id);
  return r;
}

// ---------------------------------------------------------------------------
// Substitution action

namespace {

struct Applier {
  const SubP& g;
  const VarIds& gdom;
  std::unordered_map<const Type*, TypeP> tym;
  std::unordered_map<const Term*, TermP> tm;

  explicit Applier(const SubP& g) : g(g), gdom(dom_ids(g)) {}

  TypeP go(const TypeP& t) {
    if (t->is_obj()) return t;
    if (vs_disjoint(vars(t), gdom)) return t;
    auto it = tym.find(t.get());
    if (it != tym.end()) return it->second;
    TypeP r = arr(go(t->base), go(t->src), go(t->tgt));
    tym.emplace(t.get(), r);
    return r;
  }

  TermP go(const TermP& t) {
    if (t->is_var()) {
      const TermP* b = g->lookup(t->v.id);
      return b ? *b : t;
    }
    if (vs_disjoint(vars(t), gdom)) return t;
    auto it = tm.find(t.get());
    if (it != tm.end()) return it->second;
    TermP r = coh_raw(t->ps, t->ty, go_sub(t->sub));
    tm.emplace(t.get(), r);
    return r;
  }

  SubP go_sub(const SubP& d) {
    if (vs_disjoint(vars(d), gdom)) return d;
    std::vector<std::pair<Var, TermP>> es;
    es.reserve(d->size());
    for (auto& [v, t] : d->es) es.emplace_back(v, go(t));
    return make_sub(std::move(es));
  }
};

}  // namespace

TypeP apply(const TypeP& t, const SubP& g) {
  Applier a(g);
  return a.go(t);
}

TermP apply(const TermP& t, const SubP& g) {
  Applier a(g);
  return a.go(t);
}

SubP compose(const SubP& delta, const SubP& gamma) {
  Applier a(gamma);
  return a.go_sub(delta);
}

// ---------------------------------------------------------------------------
// Hashing and equality

size_t hash_of(const TypeP& t) {
  if (t->h) return t->h;
  size_t r = 0xa11c;
  if (!t->is_obj()) r = hash_mix(hash_mix(hash_of(t->base), hash_of(t->src)), hash_of(t->tgt));
  t->h = r ? r : 1;
  return t->h;
}

size_t hash_of(const TermP& t) {
  if (t->h) return t->h;
  size_t r;
  if (t->is_var())
    r = hash_mix(0x5157, static_cast<size_t>(t->v.id));
  else
    r = hash_mix(hash_mix(hash_of(t->ps), hash_of(t->ty)), hash_of(t->sub));
  t->h = r ? r : 1;
  return t->h;
}

size_t hash_of(const CtxP& c) {
  if (c->h) return c->h;
  size_t r = 0xc0117;
  for (auto& [v, t] : c->es) r = hash_mix(hash_mix(r, static_cast<size_t>(v.id)), hash_of(t));
  c->h = r ? r : 1;
  return c->h;
}

size_t hash_of(const SubP& s) {
  if (s->h) return s->h;
  size_t r = 0x5ab;
  for (auto& [v, t] : s->es) r = hash_mix(hash_mix(r, static_cast<size_t>(v.id)), hash_of(t));
  s->h = r ? r : 1;
  return s->h;
}

bool eq(const TypeP& a, const TypeP& b) {
  if (a.get() == b.get()) return true;
  if (a->is_obj() != b->is_obj()) return false;
  if (a->is_obj()) return true;
  if (a->dim != b->dim) return false;
  if (hash_of(a) != hash_of(b)) return false;
  return eq(a->base, b->base) && eq(a->src, b->src) && eq(a->tgt, b->tgt);
}

bool eq(const TermP& a, const TermP& b) {
  if (a.get() == b.get()) return true;
  if (a->is_var() != b->is_var()) return false;
  if (a->is_var()) return a->v.id == b->v.id;
  if (hash_of(a) != hash_of(b)) return false;
  return eq(a->ps, b->ps) && eq(a->ty, b->ty) && eq(a->sub, b->sub);
}

bool eq(const CtxP& a, const CtxP& b) {
  if (a.get() == b.get()) return true;
  if (a->size() != b->size()) return false;
  if (hash_of(a) != hash_of(b)) return false;
  for (size_t i = 0; i < a->size(); i++) {
    if (a->es[i].first.id != b->es[i].first.id) return false;
    if (!eq(a->es[i].second, b->es[i].second)) return false;
  }
  return true;
}

bool eq(const SubP& a, const SubP& b) {
  if (a.get() == b.get()) return true;
  if (a->size() != b->size()) return false;
  if (hash_of(a) != hash_of(b)) return false;
  for (size_t i = 0; i < a->size(); i++) {
    if (a->es[i].first.id != b->es[i].first.id) return false;
    if (!eq(a->es[i].second, b->es[i].second)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

bool eq_mod(const Renaming& ren, const TermP& a, const TermP& b) {
  if (a->is_var() != b->is_var()) return false;
  if (a->is_var()) {
    auto it = ren.find(a->v.id);
    int64_t want = it != ren.end() ? it->second.id : a->v.id;
    return want == b->v.id;
  }
  if (!eq(a->ps, b->ps) || !eq(a->ty, b->ty)) return false;
  if (a->sub->size() != b->sub->size()) return false;
  for (size_t i = 0; i < a->sub->size(); i++) {
    if (a->sub->es[i].first.id != b->sub->es[i].first.id) return false;
    if (!eq_mod(ren, a->sub->es[i].second, b->sub->es[i].second)) return false;
  }
  return true;
}

bool eq_mod(const Renaming& ren, const TypeP& a, const TypeP& b) {
  if (a->is_obj() != b->is_obj()) return false;
  if (a->is_obj()) return true;
  return eq_mod(ren, a->base, b->base) && eq_mod(ren, a->src, b->src) && eq_mod(ren, a->tgt, b->tgt);
}

std::optional<Renaming> alpha_ctx(const CtxP& a, const CtxP& b) {
  if (a->size() != b->size()) return std::nullopt;
  Renaming ren;
  for (size_t i = 0; i < a->size(); i++) {
    if (!eq_mod(ren, a->es[i].second, b->es[i].second)) return std::nullopt;
    ren[a->es[i].first.id] = b->es[i].first;
  }
  return ren;
}

bool alpha_eq_ctx(const CtxP& a, const CtxP& b) { return alpha_ctx(a, b).has_value(); }

SubP renaming_sub(const CtxP& domain, const Renaming& ren) {
  std::vector<std::pair<Var, TermP>> es;
  for (auto& [v, t] : domain->es) {
    auto it = ren.find(v.id);
    es.emplace_back(v, var(it != ren.end() ? it->second : v));
  }
  return make_sub(std::move(es));
}

// ---------------------------------------------------------------------------
// Arrow accessors

const TypeP& base_of(const TypeP& t) {
  if (t->is_obj()) fail(Err::Internal, "base_of(Obj)");
  return t->base;
}

const TermP& src_of(const TypeP& t) {
  if (t->is_obj()) fail(Err::Internal, "src_of(Obj)");
  return t->src;
}

const TermP& tgt_of(const TypeP& t) {
  if (t->is_obj()) fail(Err::Internal, "tgt_of(Obj)");
  return t->tgt;
}

TermP boundary_of_type(const TypeP& ty, int i, bool plus) {
  const Type* t = ty.get();
  if (i > t->dim) fail(Err::Internal, "boundary_of_type: level exceeds type dimension");
  while (t->dim > i) t = t->base.get();
  return plus ? t->tgt : t->src;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

struct Scope {
  std::unordered_map<int64_t, std::string> names;
};

Scope scope_of(Session& s, const Ctx& c) {
  Scope sc;
  std::unordered_set<std::string> used;
  for (size_t i = 0; i < c.es.size(); i++) {
    std::string n = s.names.str(c.es[i].first.name);
    if (n.empty()) n = "v";
    if (used.count(n)) {
      int k = 2;
      std::string cand;
      do {
        cand = n + "_" + std::to_string(k++);
      } while (used.count(cand));
      n = cand;
    }
    used.insert(n);
    sc.names[c.es[i].first.id] = n;
  }
  return sc;
}

struct Printer {
  Session& s;
  std::string out;

  void term(const TermP& t, const Scope& sc) {
    if (t->is_var()) {
      auto it = sc.names.find(t->v.id);
      if (it != sc.names.end()) {
        out += it->second;
      } else {
        // Out-of-scope variable; debug rendering only.
        out += s.names.str(t->v.name);
        out += "?";
        out += std::to_string(t->v.id);
      }
      return;
    }
    Scope head = scope_of(s, *t->ps);
    out += "coh[";
    telescope(*t->ps, head);
    out += " : ";
    type(t->ty, head);
    out += "](";
    for (size_t i = 0; i < t->sub->size(); i++) {
      if (i) out += ", ";
      term(t->sub->es[i].second, sc);
    }
    out += ")";
  }

  void telescope(const Ctx& c, const Scope& sc) {
    for (size_t i = 0; i < c.es.size(); i++) {
      if (i) out += " ";
      out += "(";
      out += sc.names.at(c.es[i].first.id);
      out += " : ";
      type(c.es[i].second, sc);
      out += ")";
    }
  }

  void type(const TypeP& t, const Scope& sc) {
    if (t->is_obj()) {
      out += "*";
      return;
    }
    term(t->src, sc);
    out += " -> ";
    term(t->tgt, sc);
  }
};

}  // namespace

std::string print_term(Session& s, const TermP& t, const CtxP& scope) {
  Printer p{s};
  p.term(t, scope_of(s, *scope));
  return std::move(p.out);
}

std::string print_type(Session& s, const TypeP& t, const CtxP& scope) {
  Printer p{s};
  p.type(t, scope_of(s, *scope));
  return std::move(p.out);
}

std::string print_ctx(Session& s, const CtxP& c) {
  Printer p{s};
  p.telescope(*c, scope_of(s, *c));
  return std::move(p.out);
}

}  // namespace catt
