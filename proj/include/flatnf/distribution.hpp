#pragma once
#include <optional>
#include <string>
#include <vector>

#include "flatnf/expr.hpp"
#include "flatnf/linalg.hpp"

namespace flatnf {

enum class ChartTag { XU, Xplus };

// Ordered coordinate list. XU is (states..., inputs...); Xplus is the forward-shifted
// states in the same order.
struct Chart {
  ChartTag tag;
  VarList vars;

  int index_of(Var v) const;
  bool contains(Var v) const;
  bool operator==(const Chart& o) const { return tag == o.tag && vars == o.vars; }
  bool operator!=(const Chart& o) const { return !(*this == o); }
  std::string describe() const;
};

struct VectorField {
  Chart chart;
  std::vector<Expr> comps;  // aligned with chart.vars

  static VectorField zero(const Chart& c);
  static VectorField coordinate(const Chart& c, Var v);
  // Directional derivative v(g).
  Expr apply(const Expr& g) const;
  bool is_zero() const;
  VectorField operator+(const VectorField& o) const;
  VectorField operator-(const VectorField& o) const;
  VectorField scaled(const Expr& c) const;
};

struct OneForm {
  Chart chart;
  std::vector<Expr> comps;

  Expr pair(const VectorField& v) const;
};

// Span of finitely many vector fields with rational-function coefficients. The stored
// basis is the given generator list pruned to a maximal independent subset (in order).
class Distribution {
 public:
  Distribution() = default;
  Distribution(const Chart& chart, const std::vector<VectorField>& generators);
  static Distribution zero(const Chart& c) { return Distribution(c, {}); }

  const Chart& chart() const { return chart_; }
  const std::vector<VectorField>& basis() const { return basis_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  // Columns are the basis fields.
  SymMatrix matrix() const;
  bool contains(const VectorField& v) const;

 private:
  Chart chart_;
  std::vector<VectorField> basis_;
};

struct Codistribution {
  Chart chart;
  std::vector<OneForm> basis;  // pruned, independent

  static Codistribution span(const Chart& chart, const std::vector<OneForm>& gens);
  int dim() const { return static_cast<int>(basis.size()); }
  SymMatrix matrix() const;  // rows are the basis forms
};

}  // namespace flatnf
