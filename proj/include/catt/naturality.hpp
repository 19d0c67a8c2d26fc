#pragma once

#include "catt/kernel.hpp"
#include "catt/metaops.hpp"
#include "catt/pasting.hpp"

namespace catt {

struct NatTriple {
  Var minus, plus, bar;
};

// Output of the context naturality: Gamma ⇑ X, Gamma ↑ X, the two injections
// and the duplicate/filler variables chosen for each x in X.
struct NatOut {
  CtxP pm;
  CtxP up;
  SubP injm, injp;
  std::unordered_map<int64_t, NatTriple> triples;
  const NatTriple& triple(int64_t id) const;
};
using NatOutP = std::shared_ptr<const NatOut>;

struct DepthReport {
  int ctx_depth;    // depth of X in the ambient context
  int focus_depth;  // depth of X in the focus object
};

bool is_up_closed(const CtxP& ctx, const VarIds& xs);
VarIds up_closure(const CtxP& ctx, const VarIds& seed);

// Depth equations; -1 encodes the empty intersection (max of nothing).
int depth_of_type(Session& s, const CtxP& ctx, const TypeP& a, const VarIds& xs);
int depth_of_term(Session& s, const CtxP& ctx, const TermP& t, const VarIds& xs);
int depth_of_sub(Session& s, const CtxP& dom, const SubP& g, const CtxP& cod, const VarIds& xs);
int depth_of_ctx(Session& s, const CtxP& ctx, const VarIds& xs);

// gamma^{-1} X = {x in Var(cod) | Var(x[gamma]) ∩ X != {}}
VarIds preimage(const SubP& g, const CtxP& cod, const VarIds& xs);

// Judgement (1). Validates up-closure and depth <= 1; memoized per session.
NatOutP ctx_up(Session& s, const CtxP& ctx, const VarIds& xs);

// Judgement (2): A ↑^x X for a fresh variable with chosen duplicates.
TypeP type_up_fresh(Session& s, const CtxP& ctx, const TypeP& a, Var xminus, Var xplus,
                    const VarIds& xs);

// Judgement (3): A ↑^t X where A is t's type.
TypeP type_up_term(Session& s, const CtxP& ctx, const TermP& t, const VarIds& xs);

// Judgement (4). When `recheck` is set the result is type-checked against
// type_up_term (Theorem 1 enforced at runtime).
TermP term_up(Session& s, const CtxP& ctx, const TermP& t, const VarIds& xs, bool recheck = true);

// Judgement (5): dom ↑ X ⊢ g ↑ X : cod ↑ g^{-1}X.
SubP sub_up(Session& s, const CtxP& dom, const SubP& g, const CtxP& cod, const VarIds& xs);

// Judgement (6): naturality of coherence constructors, X over the head.
TermP coh_up(Session& s, const CtxP& ps, const TypeP& ty, const VarIds& xs);

// Appendix machinery, exposed for the test suites. `base` is Psi^0_k with
// its naturality data, `target` a Psi^0_{k+1} the associators live over.
SubP scan_sub(Session& s, const LinearCtx& base, const VarIds& xs, const LinearCtx& target, int j);
TermP whisker_phase(Session& s, const LinearCtx& base, const VarIds& xs, int j);
TermP assemble_linear(Session& s, const LinearCtx& base, const VarIds& xs);

// theta_{Gamma,X} : Gamma ↑ X ⊢ theta : Gamma ↑ X^lm for a reduced head.
SubP theta_sub(Session& s, const PsTree& tree, const CtxP& ctx, const VarIds& xs);

// The interchangers j^±_{Gamma,X,A} of the reduced-composite case.
TermP interchanger(Session& s, bool plus, const PsTree& tree, const CtxP& ctx, const TypeP& ty,
                   const VarIds& xs);

}  // namespace catt
