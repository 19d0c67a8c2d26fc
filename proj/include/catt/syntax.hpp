#pragma once

#include <functional>

#include "catt/base.hpp"

namespace catt {

struct Type;
struct Term;
struct Ctx;
struct Sub;
using TypeP = std::shared_ptr<const Type>;
using TermP = std::shared_ptr<const Term>;
using CtxP = std::shared_ptr<const Ctx>;
using SubP = std::shared_ptr<const Sub>;

// Sorted, duplicate-free variable id sets.
using VarIds = std::vector<int64_t>;

bool vs_contains(const VarIds& s, int64_t id);
VarIds vs_union(const VarIds& a, const VarIds& b);
VarIds vs_inter(const VarIds& a, const VarIds& b);
VarIds vs_minus(const VarIds& a, const VarIds& b);
bool vs_disjoint(const VarIds& a, const VarIds& b);
void vs_insert(VarIds& s, int64_t id);

struct Type {
  // Obj iff base == nullptr.
  TypeP base;
  TermP src, tgt;
  int dim = -1;
  mutable size_t h = 0;
  mutable std::shared_ptr<const VarIds> vs;
  bool is_obj() const { return base == nullptr; }
};

struct Term {
  // Variable iff ps == nullptr, else coherence coh_{ps,ty}[sub].
  Var v{};
  CtxP ps;
  TypeP ty;
  SubP sub;
  mutable size_t h = 0;
  mutable std::shared_ptr<const VarIds> vs;
  bool is_var() const { return ps == nullptr; }
  int coh_dim() const;
};

struct Ctx {
  std::vector<std::pair<Var, TypeP>> es;
  mutable size_t h = 0;
  size_t size() const { return es.size(); }
  std::optional<int> dim() const;  // nullopt for the empty context
  bool has(int64_t id) const;
  const TypeP* type_of(int64_t id) const;
  std::optional<size_t> index_of(int64_t id) const;
};

struct Sub {
  // Association list; the most recent binding (largest index) wins.
  std::vector<std::pair<Var, TermP>> es;
  mutable size_t h = 0;
  mutable std::shared_ptr<const VarIds> vs;   // vars of images
  mutable std::shared_ptr<const VarIds> dom;  // domain ids, sorted
  const TermP* lookup(int64_t id) const;
  size_t size() const { return es.size(); }
};

// Constructors.
TypeP obj();
TypeP arr(TypeP base, TermP src, TermP tgt);
TermP var(Var v);
CtxP make_ctx(std::vector<std::pair<Var, TypeP>> es);
SubP make_sub(std::vector<std::pair<Var, TermP>> es);
// Canonicalizing coherence constructor: renames the head's variables to
// head-local ids (-1, -2, ...) so alpha-equivalent heads are structurally
// equal. `images` are in telescope order.
TermP coh(const CtxP& ps, const TypeP& ty, const std::vector<TermP>& images);
// As above but takes a substitution whose domain is ps in telescope order.
TermP coh(const CtxP& ps, const TypeP& ty, const SubP& s);
SubP id_sub(const CtxP& c);
bool ctx_is_canonical(const Ctx& c);

// Variable sets (the six defining equations).
const VarIds& vars(const TypeP& t);
const VarIds& vars(const TermP& t);
const VarIds& vars(const SubP& s);
const VarIds& dom_ids(const SubP& s);
VarIds vars_ctx(const CtxP& c);

// Substitution action and composition.
TypeP apply(const TypeP& t, const SubP& g);
TermP apply(const TermP& t, const SubP& g);
SubP compose(const SubP& delta, const SubP& gamma);  // delta ∘ gamma

size_t hash_of(const TypeP& t);
size_t hash_of(const TermP& t);
size_t hash_of(const CtxP& c);
size_t hash_of(const SubP& s);

bool eq(const TypeP& a, const TypeP& b);
bool eq(const TermP& a, const TermP& b);
bool eq(const CtxP& a, const CtxP& b);
bool eq(const SubP& a, const SubP& b);

// Alpha-equivalence by positional renaming.
using Renaming = std::unordered_map<int64_t, Var>;
std::optional<Renaming> alpha_ctx(const CtxP& a, const CtxP& b);
bool alpha_eq_ctx(const CtxP& a, const CtxP& b);
bool eq_mod(const Renaming& ren, const TermP& a, const TermP& b);
bool eq_mod(const Renaming& ren, const TypeP& a, const TypeP& b);
// Renaming as a substitution (var-to-var).
SubP renaming_sub(const CtxP& domain, const Renaming& ren);

// Arrow accessors (throw Internal when used on Obj).
const TypeP& base_of(const TypeP& t);
const TermP& src_of(const TypeP& t);
const TermP& tgt_of(const TypeP& t);
// Iterated boundary of a type tower: the i-dimensional source/target stored
// in the type of a (dim(ty)+1)-cell. Requires i <= dim(ty).
TermP boundary_of_type(const TypeP& ty, int i, bool plus);

// Canonical printer: deterministic, fully delimited, reparseable.
std::string print_term(Session& s, const TermP& t, const CtxP& scope);
std::string print_type(Session& s, const TypeP& t, const CtxP& scope);
std::string print_ctx(Session& s, const CtxP& c);

}  // namespace catt
