#pragma once

#include "catt/syntax.hpp"

namespace catt {

// Batanin tree with sector labels. A node at height h carries kids.size()+1
// sectors, the h-dimensional variables around it; sector i sits between kids
// i-1 and i.
struct PsNode {
  std::vector<PsNode> kids;
  std::vector<Var> sectors;
};

struct PsTree {
  PsNode root;
};

int tree_height(const PsNode& n);
inline int tree_dim(const PsTree& t) { return tree_height(t.root); }

// Replays the pasting-context judgement as a left-to-right scan; throws
// NotAPastingContext with the offending entry position.
PsTree check_ps(const CtxP& c);
// Flattens a labeled tree back to its context in derivation order, with
// types recomputed from sector adjacency.
CtxP tree_to_ctx(const PsTree& t);

struct Boundary {
  PsTree tree;
  CtxP ctx;
  SubP incl;  // orig ⊢ incl : ctx, variable-to-variable
};

// i-th source/target boundary; returns the input with the identity inclusion
// when i >= dim.
Boundary boundary(const PsTree& t, const CtxP& ctx, int i, bool plus);

struct Graft {
  PsTree tree;
  CtxP ctx;
  SubP proj1;  // ctx ⊢ proj1 : left operand
  SubP proj2;  // ctx ⊢ proj2 : right operand
};

// Batanin composition ⊗_k: glues along ∂+_k(left) = ∂-_k(right). The right
// operand's variables are renamed fresh except on the shared boundary.
Graft graft(Session& s, const PsTree& lt, const CtxP& lc, const PsTree& rt, const CtxP& rc, int k);

struct Disc {
  PsTree tree;
  CtxP ctx;
  Var top;
};

// Linear tree of dimension d: (m0- m0+ m1- m1+ ... md).
Disc disc(Session& s, int d);
bool is_disc(const PsTree& t);
Var top_var(const PsTree& t);

struct LinearCtx {
  CtxP ctx;
  PsTree tree;
  std::vector<Var> xs;  // k+1 objects (suspended: top-level cells)
  std::vector<Var> fs;  // k arrows
};

// Psi^n_k: k composable (n+1)-cells glued along their n-boundaries.
LinearCtx linear_context(Session& s, int n, int k);

// Planar traversal order on sector variables.
std::vector<Var> street_order(const PsTree& t);

struct Reduction {
  CtxP reduced;
  PsTree rtree;
  SubP rho;  // orig ⊢ rho : reduced
};

// Fuses maximal cells glued along codimension-1 boundaries; rho is the
// identity on the boundary and sends new fillers to linear composites.
Reduction reduce(Session& s, const PsTree& t, const CtxP& ctx);

bool is_reduced(const PsTree& t);

}  // namespace catt
