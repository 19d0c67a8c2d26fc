#pragma once

#include "catt/pasting.hpp"
#include "catt/syntax.hpp"

namespace catt {

enum class Flavor { Comp, Inv };

// Validates entry scoping, duplicate freedom and entry types; returns the
// input on success.
CtxP check_context(Session& s, const CtxP& c);

// Checks a coherence head: pasting judgement, arrow type over it, fullness
// for exactly one side condition. Results are cached per session.
Flavor head_flavor(Session& s, const CtxP& ps, const TypeP& ty);
const PsTree& head_tree(Session& s, const CtxP& ps);

// Type checker over one fixed (already checked) context.
class Checker {
public:
  Checker(Session& s, CtxP ctx) : s_(s), ctx_(std::move(ctx)) {}

  TypeP check_type(const TypeP& t);
  TypeP check_term(const TermP& t);  // returns the term's type
  void check_sub(const SubP& g, const CtxP& codomain);
  int dim_term(const TermP& t);
  const CtxP& ctx() const { return ctx_; }
  Session& session() { return s_; }

private:
  Session& s_;
  CtxP ctx_;
  std::unordered_map<const Term*, TypeP> memo_;
};

TypeP infer_type(Session& s, const CtxP& ctx, const TermP& t);

// Boundary of a checked term at level i (its type tower); i >= dim gives the
// term itself.
TermP term_boundary(Session& s, const CtxP& ctx, const TermP& t, int i, bool plus);

}  // namespace catt
