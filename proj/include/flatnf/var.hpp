#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace flatnf {

// State/Input are the system variables at shift 0. StatePlus is the forward shift x+.
// Output variables are flat output components y^j at arbitrary forward shifts.
enum class VarKind : uint8_t { State = 0, StatePlus = 1, Input = 2, Output = 3 };

struct VarData {
  std::string name;  // base name, e.g. "x1", "u2", "y1"
  VarKind kind;
  int shift;  // 0 except for Output vars (StatePlus is implicitly shift 1)
};

// Interned variable handle. Identity is by (name, kind, shift); the total order used for
// monomials is (kind, natural name order, shift) and does not depend on interning order.
class Var {
 public:
  Var() : id_(UINT32_MAX) {}
  static Var state(const std::string& name) { return intern(name, VarKind::State, 0); }
  static Var input(const std::string& name) { return intern(name, VarKind::Input, 0); }
  static Var state_plus(const std::string& name) {
    return intern(name, VarKind::StatePlus, 0);
  }
  static Var output(const std::string& name, int shift) {
    return intern(name, VarKind::Output, shift);
  }
  static Var intern(const std::string& name, VarKind kind, int shift);

  const VarData& data() const;
  const std::string& name() const { return data().name; }
  VarKind kind() const { return data().kind; }
  int shift() const { return data().shift; }
  bool valid() const { return id_ != UINT32_MAX; }

  // Display form used by the printer and reports: "x1", "u1", "x1_p", "y1", "y1_2".
  std::string display() const;

  bool operator==(const Var& o) const { return id_ == o.id_; }
  bool operator!=(const Var& o) const { return id_ != o.id_; }
  bool operator<(const Var& o) const;  // fixed total order

  uint32_t id() const { return id_; }

  // x -> x+ and back (same base name).
  Var plus() const;
  Var unplus() const;
  Var shifted(int delta) const;  // Output vars only

 private:
  explicit Var(uint32_t id) : id_(id) {}
  uint32_t id_;
};

// Natural-order name comparison: digit runs compare numerically, so x2 < x10.
int natural_compare(const std::string& a, const std::string& b);

using VarList = std::vector<Var>;

}  // namespace flatnf
