#pragma once

#include "catt/kernel.hpp"
#include "catt/pasting.hpp"
#include "catt/syntax.hpp"

namespace catt {

// ---------------------------------------------------------------------------
// Suspension

struct Suspended {
  CtxP ctx;
  Var north, south;
};

Suspended suspend_ctx(Session& s, const CtxP& c);
TypeP suspend(Session& s, const TypeP& t, Var north, Var south);
TermP suspend(Session& s, const TermP& t, Var north, Var south);
// gamma : Delta -> Gamma becomes Sigma gamma : Sigma Delta -> Sigma Gamma;
// cod_* are Sigma Gamma's poles, img_* the terms they map to (Sigma Delta's
// poles in the plain admissible rule).
SubP suspend_sub(Session& s, const SubP& g, Var cod_north, Var cod_south, const TermP& img_north,
                 const TermP& img_south);

// ---------------------------------------------------------------------------
// Opposites

using DimSet = std::vector<int>;  // sorted positive dimensions

bool dimset_has(const DimSet& m, int d);
TypeP op_type(Session& s, const DimSet& m, const TypeP& t);
TermP op_term(Session& s, const DimSet& m, const TermP& t);
CtxP op_ctx(Session& s, const DimSet& m, const CtxP& c);
SubP op_sub(Session& s, const DimSet& m, const SubP& g);
PsTree op_tree(const DimSet& m, const PsTree& t);

// ---------------------------------------------------------------------------
// Composites

// Unbiased composite of a pasting context: the top variable for a disc, the
// canonical (comp) coherence otherwise. Returns the term and its type.
std::pair<TermP, TypeP> unbiased_comp(Session& s, const PsTree& t, const CtxP& c);

// n-ary *_k composite of checked cells over `ambient`: glues the cells'
// discs along their k-boundaries and instantiates the unbiased composite.
// A single cell is returned unchanged.
TermP comp_at(Session& s, const CtxP& ambient, int k, const std::vector<TermP>& cells);

// Biased compositions and associators over Psi^0_{k+1}.
TermP biased_comp(Session& s, const LinearCtx& lin, int k, int j);

struct Assoc {
  LinearCtx lin;  // Psi^0_{k+1}
  TermP term;     // bcomp_{k,j+1} -> bcomp_{k,j}
};

Assoc associator(Session& s, int k, int j);

// Coherence over a pasting context with both endpoints given; validates the
// (inv) side condition.
TermP inv_coh(Session& s, const CtxP& ps, const TermP& u, const TermP& v);

}  // namespace catt
