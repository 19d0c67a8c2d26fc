#include "catt/kernel.hpp"

#include "caches.hpp"

namespace catt {

CtxP check_context(Session& s, const CtxP& c) {
  auto& cache = s.kernel_cache->checked_ctxs;
  if (auto it = cache.find(c); it != cache.end()) return c;
  VarIds seen;
  Checker ck(s, c);
  for (size_t i = 0; i < c->size(); i++) {
    const auto& [v, ty] = c->es[i];
    if (vs_contains(seen, v.id))
      fail(Err::DuplicateVariable,
           "variable '" + s.names.str(v.name) + "' declared twice (entry " + std::to_string(i) + ")");
    // Scoping: the entry's type may only use earlier variables.
    for (int64_t u : vars(ty))
      if (!vs_contains(seen, u))
        fail(Err::IllTypedEntry, "entry " + std::to_string(i) + " uses a variable not yet declared");
    try {
      ck.check_type(ty);
    } catch (CattError& e) {
      if (e.code == Err::UnboundVariable || e.code == Err::NotParallel) {
        fail(Err::IllTypedEntry,
             "entry " + std::to_string(i) + " has an ill-formed type: " + e.what());
      }
      throw;
    }
    vs_insert(seen, v.id);
  }
  cache.emplace(c, true);
  return c;
}

const PsTree& head_tree(Session& s, const CtxP& ps) {
  auto& cache = s.kernel_cache->trees;
  if (auto it = cache.find(ps); it != cache.end()) return it->second;
  PsTree t = check_ps(ps);
  return cache.emplace(ps, std::move(t)).first->second;
}

Flavor head_flavor(Session& s, const CtxP& ps, const TypeP& ty) {
  auto& cache = s.kernel_cache->flavors;
  HeadKey key{ps, ty};
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  check_context(s, ps);
  const PsTree& tree = head_tree(s, ps);
  if (ty->is_obj()) fail(Err::NotFull, "coherence type must be an arrow");
  Checker ck(s, ps);
  ck.check_type(ty);

  VarIds all = vars_ctx(ps);
  VarIds vsrc = vs_union(vars(ty->base), vars(ty->src));
  VarIds vtgt = vs_union(vars(ty->base), vars(ty->tgt));
  bool inv = vsrc == all && vtgt == all;
  bool comp = false;
  if (tree_dim(tree) > 0) {
    Boundary bm = boundary(tree, ps, tree_dim(tree) - 1, false);
    Boundary bp = boundary(tree, ps, tree_dim(tree) - 1, true);
    comp = vars_ctx(bm.ctx) == vsrc && vars_ctx(bp.ctx) == vtgt;
  }
  if (comp && inv) fail(Err::Internal, "coherence type full for both side conditions");
  if (!comp && !inv) {
    fail(Err::NotFull,
         "coherence type is not full: source covers " + std::to_string(vsrc.size()) +
             " and target covers " + std::to_string(vtgt.size()) + " of " +
             std::to_string(all.size()) + " variables");
  }
  Flavor f = comp ? Flavor::Comp : Flavor::Inv;
  cache.emplace(key, f);
  return f;
}

TypeP Checker::check_type(const TypeP& t) {
  if (t->is_obj()) return t;
  check_type(t->base);
  TypeP a = check_term(t->src);
  TypeP b = check_term(t->tgt);
  if (!eq(a, t->base) || !eq(b, t->base))
    fail(Err::NotParallel, "arrow endpoints do not both live at the base type");
  return t;
}

TypeP Checker::check_term(const TermP& t) {
  if (t->is_var()) {
    const TypeP* ty = ctx_->type_of(t->v.id);
    if (!ty) fail(Err::UnboundVariable, "unbound variable '" + s_.names.str(t->v.name) + "'");
    return *ty;
  }
  if (auto it = memo_.find(t.get()); it != memo_.end()) return it->second;
  head_flavor(s_, t->ps, t->ty);
  check_sub(t->sub, t->ps);
  TypeP r = apply(t->ty, t->sub);
  memo_.emplace(t.get(), r);
  return r;
}

void Checker::check_sub(const SubP& g, const CtxP& codomain) {
  if (g->size() != codomain->size())
    fail(Err::SubstitutionArity, "substitution covers " + std::to_string(g->size()) +
                                     " of " + std::to_string(codomain->size()) + " variables");
  for (size_t i = 0; i < g->size(); i++) {
    if (g->es[i].first.id != codomain->es[i].first.id)
      fail(Err::SubstitutionOrder, "substitution entry " + std::to_string(i) +
                                       " is out of telescope order");
    TypeP have = check_term(g->es[i].second);
    TypeP want = apply(codomain->es[i].second, g);
    if (!eq(have, want))
      fail(Err::IllTypedEntry, "substitution image " + std::to_string(i) +
                                   " has the wrong type");
  }
}

int Checker::dim_term(const TermP& t) {
  if (t->is_var()) {
    const TypeP* ty = ctx_->type_of(t->v.id);
    if (!ty) fail(Err::UnboundVariable, "unbound variable '" + s_.names.str(t->v.name) + "'");
    return (*ty)->dim + 1;
  }
  return t->coh_dim();
}

TypeP infer_type(Session& s, const CtxP& ctx, const TermP& t) {
  Checker ck(s, ctx);
  return ck.check_term(t);
}

TermP term_boundary(Session& s, const CtxP& ctx, const TermP& t, int i, bool plus) {
  Checker ck(s, ctx);
  TypeP ty = ck.check_term(t);
  if (i > ty->dim) return t;
  return boundary_of_type(ty, i, plus);
}

}  // namespace catt
