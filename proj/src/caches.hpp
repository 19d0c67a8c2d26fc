#pragma once

// Internal session caches. Not part of the public interface.

#include <map>
#include <unordered_map>

#include "catt/kernel.hpp"
#include "catt/naturality.hpp"
#include "catt/pasting.hpp"
#include "catt/syntax.hpp"

namespace catt {

struct HeadKey {
  CtxP ps;
  TypeP ty;
};

struct HeadKeyHash {
  size_t operator()(const HeadKey& k) const { return hash_mix(hash_of(k.ps), hash_of(k.ty)); }
};

struct HeadKeyEq {
  bool operator()(const HeadKey& a, const HeadKey& b) const {
    return eq(a.ps, b.ps) && eq(a.ty, b.ty);
  }
};

struct CtxKeyHash {
  size_t operator()(const CtxP& c) const { return hash_of(c); }
};

struct CtxKeyEq {
  bool operator()(const CtxP& a, const CtxP& b) const { return eq(a, b); }
};

struct KernelCache {
  std::unordered_map<HeadKey, Flavor, HeadKeyHash, HeadKeyEq> flavors;
  std::unordered_map<CtxP, PsTree, CtxKeyHash, CtxKeyEq> trees;
  std::unordered_map<CtxP, bool, CtxKeyHash, CtxKeyEq> checked_ctxs;
};

struct NatKey {
  CtxP ctx;
  VarIds xs;
};

struct NatKeyHash {
  size_t operator()(const NatKey& k) const {
    size_t h = hash_of(k.ctx);
    for (int64_t id : k.xs) h = hash_mix(h, static_cast<size_t>(id));
    return h;
  }
};

struct NatKeyEq {
  bool operator()(const NatKey& a, const NatKey& b) const {
    return a.xs == b.xs && eq(a.ctx, b.ctx);
  }
};

struct CohUpKey {
  CtxP ps;
  TypeP ty;
  VarIds xs;
};

struct CohUpKeyHash {
  size_t operator()(const CohUpKey& k) const {
    size_t h = hash_mix(hash_of(k.ps), hash_of(k.ty));
    for (int64_t id : k.xs) h = hash_mix(h, static_cast<size_t>(id));
    return h;
  }
};

struct CohUpKeyEq {
  bool operator()(const CohUpKey& a, const CohUpKey& b) const {
    return a.xs == b.xs && eq(a.ps, b.ps) && eq(a.ty, b.ty);
  }
};

struct NatCache {
  std::unordered_map<NatKey, std::shared_ptr<const NatOut>, NatKeyHash, NatKeyEq> ctx_up;
  std::unordered_map<CohUpKey, TermP, CohUpKeyHash, CohUpKeyEq> coh_up;
};

}  // namespace catt
