#include "catt/metaops.hpp"

#include <cassert>

namespace catt {

// ---------------------------------------------------------------------------
// Suspension

TypeP suspend(Session& s, const TypeP& t, Var north, Var south) {
  if (t->is_obj()) return arr(obj(), var(north), var(south));
  return arr(suspend(s, t->base, north, south), suspend(s, t->src, north, south),
             suspend(s, t->tgt, north, south));
}

TermP suspend(Session& s, const TermP& t, Var north, Var south) {
  if (t->is_var()) return t;
  // Suspend the head with temporary poles; the coherence constructor
  // canonicalizes them away.
  Var hn = s.fresh("N");
  Var hs = s.fresh("S");
  std::vector<std::pair<Var, TypeP>> hes;
  hes.reserve(t->ps->size() + 2);
  hes.emplace_back(hn, obj());
  hes.emplace_back(hs, obj());
  for (auto& [v, ty] : t->ps->es) hes.emplace_back(v, suspend(s, ty, hn, hs));
  CtxP hd = make_ctx(std::move(hes));
  TypeP hty = suspend(s, t->ty, hn, hs);
  std::vector<TermP> images;
  images.reserve(t->sub->size() + 2);
  images.push_back(var(north));
  images.push_back(var(south));
  for (auto& [v, u] : t->sub->es) images.push_back(suspend(s, u, north, south));
  return coh(hd, hty, images);
}

Suspended suspend_ctx(Session& s, const CtxP& c) {
  Suspended r;
  r.north = s.fresh("N");
  r.south = s.fresh("S");
  std::vector<std::pair<Var, TypeP>> es;
  es.reserve(c->size() + 2);
  es.emplace_back(r.north, obj());
  es.emplace_back(r.south, obj());
  for (auto& [v, ty] : c->es) es.emplace_back(v, suspend(s, ty, r.north, r.south));
  r.ctx = make_ctx(std::move(es));
  return r;
}

SubP suspend_sub(Session& s, const SubP& g, Var cod_north, Var cod_south, const TermP& img_north,
                 const TermP& img_south) {
  std::vector<std::pair<Var, TermP>> es;
  es.reserve(g->size() + 2);
  es.emplace_back(cod_north, img_north);
  es.emplace_back(cod_south, img_south);
  // The suspended images refer to the poles of the (suspended) domain, which
  // img_north/img_south must be variables of when they are plain poles.
  Var dn{}, ds{};
  bool poles_are_vars = img_north->is_var() && img_south->is_var();
  if (poles_are_vars) {
    dn = img_north->v;
    ds = img_south->v;
  }
  for (auto& [v, t] : g->es) {
    if (!poles_are_vars) fail(Err::Internal, "suspend_sub: pole images must be variables");
    es.emplace_back(v, suspend(s, t, dn, ds));
  }
  return make_sub(std::move(es));
}

// ---------------------------------------------------------------------------
// Opposites

bool dimset_has(const DimSet& m, int d) {
  return std::binary_search(m.begin(), m.end(), d);
}

TypeP op_type(Session& s, const DimSet& m, const TypeP& t) {
  if (t->is_obj()) return t;
  TypeP b = op_type(s, m, t->base);
  TermP u = op_term(s, m, t->src);
  TermP v = op_term(s, m, t->tgt);
  // Cells classified by this arrow have dimension dim(base)+2; reverse them
  // exactly when that dimension is in m.
  if (dimset_has(m, t->base->dim + 2)) return arr(b, v, u);
  return arr(b, u, v);
}

PsTree op_tree(const DimSet& m, const PsTree& t) {
  PsTree r = t;
  std::vector<std::pair<PsNode*, int>> todo{{&r.root, 0}};
  while (!todo.empty()) {
    auto [n, h] = todo.back();
    todo.pop_back();
    if (dimset_has(m, h + 1)) {
      std::reverse(n->kids.begin(), n->kids.end());
      std::reverse(n->sectors.begin(), n->sectors.end());
    }
    for (auto& k : n->kids) todo.emplace_back(&k, h + 1);
  }
  return r;
}

TermP op_term(Session& s, const DimSet& m, const TermP& t) {
  if (t->is_var()) return t;
  const PsTree& tree = head_tree(s, t->ps);
  PsTree ot = op_tree(m, tree);
  CtxP octx = tree_to_ctx(ot);
  TypeP oty = op_type(s, m, t->ty);
  // The head keeps its variables in a new derivation order; reorder the
  // substitution accordingly, applying op to the images.
  std::vector<TermP> images;
  images.reserve(octx->size());
  for (auto& [v, ty] : octx->es) {
    const TermP* img = t->sub->lookup(v.id);
    if (!img) fail(Err::Internal, "op_term: head variable missing from substitution");
    images.push_back(op_term(s, m, *img));
  }
  return coh(octx, oty, images);
}

CtxP op_ctx(Session& s, const DimSet& m, const CtxP& c) {
  std::vector<std::pair<Var, TypeP>> es;
  es.reserve(c->size());
  for (auto& [v, ty] : c->es) es.emplace_back(v, op_type(s, m, ty));
  return make_ctx(std::move(es));
}

SubP op_sub(Session& s, const DimSet& m, const SubP& g) {
  std::vector<std::pair<Var, TermP>> es;
  es.reserve(g->size());
  for (auto& [v, t] : g->es) es.emplace_back(v, op_term(s, m, t));
  return make_sub(std::move(es));
}

// ---------------------------------------------------------------------------
// Unbiased composites

std::pair<TermP, TypeP> unbiased_comp(Session& s, const PsTree& t, const CtxP& c) {
  if (is_disc(t)) {
    Var top = top_var(t);
    const TypeP* ty = c->type_of(top.id);
    if (!ty) fail(Err::Internal, "unbiased_comp: top variable not in context");
    return {var(top), *ty};
  }
  int n = tree_dim(t);
  Boundary bm = boundary(t, c, n - 1, false);
  Boundary bp = boundary(t, c, n - 1, true);
  auto [u, tu] = unbiased_comp(s, bm.tree, bm.ctx);
  auto [v, tv] = unbiased_comp(s, bp.tree, bp.ctx);
  if (!eq(tu, tv)) fail(Err::Internal, "unbiased_comp: boundary composites not parallel");
  TypeP a = arr(tu, u, v);
  return {coh(c, a, id_sub(c)), a};
}

// ---------------------------------------------------------------------------
// n-ary composites along a level

TermP comp_at(Session& s, const CtxP& ambient, int k, const std::vector<TermP>& cells) {
  if (cells.empty()) fail(Err::Internal, "comp_at: no cells");
  if (cells.size() == 1) return cells[0];
  if (k < 0) fail(Err::IndexOutOfRange, "comp_at: negative level");
  Checker ck(s, ambient);

  PsTree tree;
  CtxP ctx;
  std::unordered_map<int64_t, TermP> assign;

  for (size_t i = 0; i < cells.size(); i++) {
    TypeP ty = ck.check_term(cells[i]);
    int d = ty->dim + 1;
    if (d < k + 1)
      fail(Err::BoundaryMismatch, "comp_at: cell " + std::to_string(i) +
                                      " has dimension below the composition level");
    Disc dsc = disc(s, d);
    // Disc context order is (m0 source, m0 target, m1 source, ..., m_d top);
    // images are the cell's boundary tower.
    std::unordered_map<int64_t, TermP> dassign;
    for (size_t idx = 0; idx < dsc.ctx->size(); idx++) {
      const Var& v = dsc.ctx->es[idx].first;
      if (v.id == dsc.top.id)
        dassign.emplace(v.id, cells[i]);
      else
        dassign.emplace(v.id, boundary_of_type(ty, static_cast<int>(idx / 2), idx % 2 == 1));
    }
    if (i == 0) {
      tree = dsc.tree;
      ctx = dsc.ctx;
      assign = std::move(dassign);
      continue;
    }
    Graft g = graft(s, tree, ctx, dsc.tree, dsc.ctx, k);
    std::unordered_map<int64_t, TermP> nassign = std::move(assign);
    for (auto& [v, img] : g.proj2->es) {
      // img is a variable of the glued context; v is the disc variable.
      int64_t tgt = img->v.id;
      auto have = nassign.find(tgt);
      const TermP& val = dassign.at(v.id);
      if (have != nassign.end()) {
        if (!eq(have->second, val))
          fail(Err::BoundaryMismatch,
               "comp_at: cells " + std::to_string(i - 1) + " and " + std::to_string(i) +
                   " do not share their " + std::to_string(k) + "-boundary");
      } else {
        nassign.emplace(tgt, val);
      }
    }
    tree = std::move(g.tree);
    ctx = std::move(g.ctx);
    assign = std::move(nassign);
  }

  int n = tree_dim(tree);
  Boundary bm = boundary(tree, ctx, n - 1, false);
  Boundary bp = boundary(tree, ctx, n - 1, true);
  auto [u, tu] = unbiased_comp(s, bm.tree, bm.ctx);
  auto [v, tv] = unbiased_comp(s, bp.tree, bp.ctx);
  if (!eq(tu, tv)) fail(Err::Internal, "comp_at: boundary composites not parallel");
  std::vector<TermP> images;
  images.reserve(ctx->size());
  for (auto& [w, ty] : ctx->es) {
    auto it = assign.find(w.id);
    if (it == assign.end()) fail(Err::Internal, "comp_at: unassigned glued variable");
    images.push_back(it->second);
  }
  return coh(ctx, arr(tu, u, v), images);
}

// ---------------------------------------------------------------------------
// Biased composites and associators

TermP biased_comp(Session& s, const LinearCtx& lin, int k, int j) {
  if (k <= 0) fail(Err::IndexOutOfRange, "biased_comp: k must be positive");
  if (j < 0 || j > k + 1) fail(Err::IndexOutOfRange, "biased_comp: bias out of range");
  if (static_cast<int>(lin.fs.size()) != k + 1)
    fail(Err::Internal, "biased_comp: expected Psi^0_{k+1}");
  auto f = [&](int i) { return var(lin.fs[i]); };
  std::vector<TermP> args;
  if (j == 0) {
    std::vector<TermP> rest;
    for (int i = 1; i <= k; i++) rest.push_back(f(i));
    args = {f(0), comp_at(s, lin.ctx, 0, rest)};
  } else if (j == k + 1) {
    std::vector<TermP> front;
    for (int i = 0; i < k; i++) front.push_back(f(i));
    args = {comp_at(s, lin.ctx, 0, front), f(k)};
  } else {
    for (int i = 0; i <= k; i++) {
      if (i == j - 1) {
        args.push_back(comp_at(s, lin.ctx, 0, {f(j - 1), f(j)}));
        i = j;
      } else {
        args.push_back(f(i));
      }
    }
  }
  return comp_at(s, lin.ctx, 0, args);
}

Assoc associator(Session& s, int k, int j) {
  if (k <= 0) fail(Err::IndexOutOfRange, "associator: k must be positive");
  if (j < 0 || j > k) fail(Err::IndexOutOfRange, "associator: index out of range");
  Assoc a;
  a.lin = linear_context(s, 0, k + 1);
  TermP lhs = biased_comp(s, a.lin, k, j + 1);
  TermP rhs = biased_comp(s, a.lin, k, j);
  a.term = inv_coh(s, a.lin.ctx, lhs, rhs);
  return a;
}

TermP inv_coh(Session& s, const CtxP& ps, const TermP& u, const TermP& v) {
  Checker ck(s, ps);
  TypeP tu = ck.check_term(u);
  TypeP tv = ck.check_term(v);
  if (!eq(tu, tv)) fail(Err::NotParallel, "inv_coh: endpoints are not parallel");
  TermP c = coh(ps, arr(tu, u, v), id_sub(ps));
  if (head_flavor(s, c->ps, c->ty) != Flavor::Inv)
    fail(Err::NotFull, "inv_coh: type is not full for the (inv) side condition");
  return c;
}

}  // namespace catt
