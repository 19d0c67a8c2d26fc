#include "catt/pasting.hpp"

#include <cassert>

namespace catt {

int tree_height(const PsNode& n) {
  int h = 0;
  for (auto& k : n.kids) h = std::max(h, 1 + tree_height(k));
  return h;
}

// ---------------------------------------------------------------------------
// Scan: context -> tree

PsTree check_ps(const CtxP& c) {
  const auto& es = c->es;
  if (es.empty()) fail(Err::NotAPastingContext, "empty context is not a pasting context");
  if (!es[0].second->is_obj())
    fail(Err::NotAPastingContext, "pasting context must start with an object (entry 0)");
  PsTree t;
  t.root.sectors.push_back(es[0].first);
  // Active path from the root to the node whose last sector is the dangling
  // judgement, together with the sector type at each height.
  std::vector<PsNode*> stack{&t.root};
  std::vector<TypeP> types{obj()};
  size_t pos = 1;
  while (pos < es.size()) {
    if (pos + 1 >= es.size())
      fail(Err::NotAPastingContext,
           "dangling entry at position " + std::to_string(pos) + ": extensions come in pairs");
    const auto& [y, B] = es[pos];
    const auto& [f, C] = es[pos + 1];
    int target_h = B->dim + 1;
    if (static_cast<int>(stack.size()) - 1 < target_h - 1)
      fail(Err::NotAPastingContext,
           "entry " + std::to_string(pos + 1) + " extends above the dangling cell");
    while (static_cast<int>(stack.size()) - 1 > target_h - 1) {
      stack.pop_back();
      types.pop_back();
    }
    PsNode* pi = stack.back();
    Var x_cur = pi->sectors.back();
    if (!eq(B, types.back()))
      fail(Err::NotAPastingContext,
           "entry " + std::to_string(pos) + " has the wrong type for this position");
    if (C->is_obj() || !C->src->is_var() || C->src->v.id != x_cur.id || !C->tgt->is_var() ||
        C->tgt->v.id != y.id || !eq(C->base, B))
      fail(Err::NotAPastingContext,
           "entry " + std::to_string(pos + 1) + " is not an arrow from the dangling cell");
    pi->sectors.push_back(y);
    pi->kids.emplace_back();
    PsNode* child = &pi->kids.back();
    child->sectors.push_back(f);
    stack.push_back(child);
    types.push_back(arr(B, var(x_cur), var(y)));
    pos += 2;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Flatten: tree -> context

namespace {

void flatten_node(const PsNode& n, const TypeP& sector_ty, std::vector<std::pair<Var, TypeP>>& out) {
  for (size_t i = 0; i < n.kids.size(); i++) {
    Var left = n.sectors[i];
    Var right = n.sectors[i + 1];
    out.emplace_back(right, sector_ty);
    TypeP child_ty = arr(sector_ty, var(left), var(right));
    out.emplace_back(n.kids[i].sectors.front(), child_ty);
    flatten_node(n.kids[i], child_ty, out);
  }
}

}  // namespace

CtxP tree_to_ctx(const PsTree& t) {
  std::vector<std::pair<Var, TypeP>> es;
  es.emplace_back(t.root.sectors.front(), obj());
  flatten_node(t.root, obj(), es);
  return make_ctx(std::move(es));
}

// ---------------------------------------------------------------------------
// Boundaries

namespace {

PsNode boundary_node(const PsNode& n, int h, int i, bool plus) {
  PsNode r;
  if (h == i) {
    r.sectors.push_back(plus ? n.sectors.back() : n.sectors.front());
    return r;
  }
  r.sectors = n.sectors;
  for (auto& k : n.kids) r.kids.push_back(boundary_node(k, h + 1, i, plus));
  return r;
}

}  // namespace

Boundary boundary(const PsTree& t, const CtxP& ctx, int i, bool plus) {
  if (i < 0) fail(Err::IndexOutOfRange, "boundary level must be non-negative");
  Boundary b;
  if (i >= tree_dim(t)) {
    b.tree = t;
    b.ctx = ctx;
    b.incl = id_sub(ctx);
    return b;
  }
  b.tree.root = boundary_node(t.root, 0, i, plus);
  b.ctx = tree_to_ctx(b.tree);
  b.incl = id_sub(b.ctx);
  return b;
}

// ---------------------------------------------------------------------------
// Grafting

namespace {

struct GraftState {
  Session& s;
  std::vector<std::pair<Var, TermP>> right_map;  // right var -> term over result

  void map_to(Var from, Var to) { right_map.emplace_back(from, var(to)); }

  PsNode copy_fresh(const PsNode& n) {
    PsNode r;
    for (Var v : n.sectors) {
      Var nv = s.fresh(s.names.str(v.name));
      map_to(v, nv);
      r.sectors.push_back(nv);
    }
    for (auto& k : n.kids) r.kids.push_back(copy_fresh(k));
    return r;
  }

  PsNode merge(const PsNode& l, const PsNode& r, int h, int k) {
    PsNode out;
    if (h == k) {
      out.sectors = l.sectors;
      out.kids = l.kids;
      map_to(r.sectors.front(), l.sectors.back());
      for (size_t i = 1; i < r.sectors.size(); i++) {
        Var nv = s.fresh(s.names.str(r.sectors[i].name));
        map_to(r.sectors[i], nv);
        out.sectors.push_back(nv);
      }
      for (auto& kid : r.kids) out.kids.push_back(copy_fresh(kid));
      return out;
    }
    if (l.kids.size() != r.kids.size() || l.sectors.size() != r.sectors.size())
      fail(Err::BoundaryMismatch, "graft: boundary trees do not match");
    out.sectors = l.sectors;
    for (size_t i = 0; i < r.sectors.size(); i++) map_to(r.sectors[i], l.sectors[i]);
    for (size_t i = 0; i < l.kids.size(); i++) out.kids.push_back(merge(l.kids[i], r.kids[i], h + 1, k));
    return out;
  }
};

}  // namespace

Graft graft(Session& s, const PsTree& lt, const CtxP& lc, const PsTree& rt, const CtxP& rc, int k) {
  Boundary lb = boundary(lt, lc, k, true);
  Boundary rb = boundary(rt, rc, k, false);
  if (!alpha_eq_ctx(lb.ctx, rb.ctx))
    fail(Err::BoundaryMismatch, "graft: target and source boundaries are not alpha-equivalent");
  GraftState st{s, {}};
  Graft g;
  g.tree.root = st.merge(lt.root, rt.root, 0, k);
  g.ctx = tree_to_ctx(g.tree);
  g.proj1 = id_sub(lc);
  // Reorder the recorded right map into rc's telescope order.
  std::vector<std::pair<Var, TermP>> p2;
  p2.reserve(rc->size());
  for (auto& [v, ty] : rc->es) {
    const TermP* img = nullptr;
    for (auto& [from, to] : st.right_map)
      if (from.id == v.id) img = &to;
    if (!img) fail(Err::Internal, "graft: right operand variable not mapped");
    p2.emplace_back(v, *img);
  }
  g.proj2 = make_sub(std::move(p2));
  return g;
}

// ---------------------------------------------------------------------------
// Discs and linear contexts

Disc disc(Session& s, int d) {
  if (d < 0) fail(Err::IndexOutOfRange, "disc dimension must be non-negative");
  Disc r;
  if (d == 0) {
    Var m = s.fresh("m0");
    r.tree.root.sectors.push_back(m);
    r.top = m;
    r.ctx = tree_to_ctx(r.tree);
    return r;
  }
  PsNode* cur = &r.tree.root;
  for (int h = 0; h < d; h++) {
    std::string base = "m" + std::to_string(h);
    cur->sectors.push_back(s.fresh(base + "s"));
    cur->sectors.push_back(s.fresh(base + "t"));
    cur->kids.emplace_back();
    PsNode* next = &cur->kids.back();
    if (h + 1 == d) {
      Var m = s.fresh("m" + std::to_string(d));
      next->sectors.push_back(m);
      r.top = m;
    }
    cur = next;
  }
  r.ctx = tree_to_ctx(r.tree);
  return r;
}

bool is_disc(const PsTree& t) {
  const PsNode* n = &t.root;
  while (true) {
    if (n->kids.size() > 1) return false;
    if (n->kids.empty()) return n->sectors.size() == 1;
    if (n->sectors.size() != 2) return false;
    n = &n->kids[0];
  }
}

Var top_var(const PsTree& t) {
  const PsNode* n = &t.root;
  while (!n->kids.empty()) n = &n->kids[0];
  return n->sectors.front();
}

LinearCtx linear_context(Session& s, int n, int k) {
  if (n < 0 || k < 0) fail(Err::IndexOutOfRange, "linear context indices must be non-negative");
  LinearCtx r;
  // Base tree Psi^0_k: a root with k leaves; then wrap n roots above it.
  PsNode base;
  for (int i = 0; i <= k; i++) r.xs.push_back(s.fresh("x" + std::to_string(i)));
  for (int i = 0; i < k; i++) r.fs.push_back(s.fresh("f" + std::to_string(i)));
  base.sectors = r.xs;
  for (int i = 0; i < k; i++) {
    PsNode leaf;
    leaf.sectors.push_back(r.fs[i]);
    base.kids.push_back(leaf);
  }
  for (int j = 0; j < n; j++) {
    PsNode wrap;
    wrap.sectors.push_back(s.fresh("n" + std::to_string(n - 1 - j)));
    wrap.sectors.push_back(s.fresh("s" + std::to_string(n - 1 - j)));
    wrap.kids.push_back(std::move(base));
    base = std::move(wrap);
  }
  r.tree.root = std::move(base);
  r.ctx = tree_to_ctx(r.tree);
  return r;
}

// ---------------------------------------------------------------------------
// Street order

namespace {

void street_node(const PsNode& n, std::vector<Var>& out) {
  out.push_back(n.sectors.front());
  for (size_t i = 0; i < n.kids.size(); i++) {
    street_node(n.kids[i], out);
    out.push_back(n.sectors[i + 1]);
  }
}

}  // namespace

std::vector<Var> street_order(const PsTree& t) {
  std::vector<Var> out;
  street_node(t.root, out);
  return out;
}

bool is_reduced(const PsTree& t) {
  int n = tree_dim(t);
  if (n <= 0) return true;
  // No node at height n-1 may have two or more kids.
  std::vector<std::pair<const PsNode*, int>> todo{{&t.root, 0}};
  while (!todo.empty()) {
    auto [node, h] = todo.back();
    todo.pop_back();
    if (h == n - 1 && node->kids.size() >= 2) return false;
    for (auto& k : node->kids) todo.emplace_back(&k, h + 1);
  }
  return true;
}

}  // namespace catt
