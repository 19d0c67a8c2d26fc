#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace catt {

using NameId = uint32_t;

// Session-scoped string pool; variable identity is the numeric id, names are
// only for display.
class Interner {
public:
  NameId intern(std::string_view s);
  const std::string& str(NameId n) const { return names_.at(n); }

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NameId> index_;
};

struct Var {
  int64_t id = 0;
  NameId name = 0;
};
inline bool operator==(Var a, Var b) { return a.id == b.id; }
inline bool operator!=(Var a, Var b) { return a.id != b.id; }

enum class Err {
  DuplicateVariable,
  IllTypedEntry,
  NotParallel,
  UnboundVariable,
  NotAPastingContext,
  NotFull,
  SubstitutionArity,
  SubstitutionOrder,
  BoundaryMismatch,
  NotUpClosed,
  DepthExceeded,
  IndexOutOfRange,
  ShapeMismatch,
  FacesMismatch,
  UnsupportedIndices,
  PhasesNotComposable,
  UnknownName,
  Syntax,
  Internal,
};

const char* err_name(Err e);

struct Span {
  int line = 0;
  int col = 0;
};

class CattError : public std::runtime_error {
public:
  CattError(Err code, std::string msg) : std::runtime_error(std::move(msg)), code(code) {}
  Err code;
  std::optional<Span> span;
};

[[noreturn]] void fail(Err code, const std::string& msg);

struct KernelCache;
struct NatCache;
struct GeoCache;

// One checking session: fresh-name oracle plus the memo tables used by the
// naturality and geometry layers. Not shared between threads; independent
// problems get independent sessions.
struct Session {
  Session();
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  Interner names;
  int64_t counter = 0;

  Var fresh(std::string_view name) { return Var{++counter, names.intern(name)}; }
  Var fresh_like(Var v, const char* suffix);

  std::unique_ptr<KernelCache> kernel_cache;
  std::unique_ptr<NatCache> nat_cache;
  std::unique_ptr<GeoCache> geo_cache;
};

inline size_t hash_mix(size_t a, size_t b) {
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

}  // namespace catt
