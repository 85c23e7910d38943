#include "flatnf/distribution.hpp"

#include "flatnf/errors.hpp"

namespace flatnf {

int Chart::index_of(Var v) const {
  for (size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == v) return static_cast<int>(i);
  throw ChartMismatch("variable " + v.display() + " not in chart " + describe());
}

bool Chart::contains(Var v) const {
  for (Var w : vars)
    if (w == v) return true;
  return false;
}

std::string Chart::describe() const {
  std::string s = tag == ChartTag::XU ? "XU(" : "Xplus(";
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i) s += ",";
    s += vars[i].display();
  }
  return s + ")";
}

VectorField VectorField::zero(const Chart& c) {
  return VectorField{c, std::vector<Expr>(c.vars.size())};
}

VectorField VectorField::coordinate(const Chart& c, Var v) {
  VectorField f = zero(c);
  f.comps[c.index_of(v)] = Expr::integer(1);
  return f;
}

Expr VectorField::apply(const Expr& g) const {
  Expr r;
  for (size_t i = 0; i < comps.size(); ++i) {
    if (comps[i].is_zero()) continue;
    Expr d = g.diff(chart.vars[i]);
    if (!d.is_zero()) r = r + comps[i] * d;
  }
  return r;
}

bool VectorField::is_zero() const {
  for (const Expr& e : comps)
    if (!e.is_zero()) return false;
  return true;
}

VectorField VectorField::operator+(const VectorField& o) const {
  if (chart != o.chart) throw ChartMismatch("vector field sum across charts");
  VectorField r{chart, comps};
  for (size_t i = 0; i < comps.size(); ++i) r.comps[i] = comps[i] + o.comps[i];
  return r;
}

VectorField VectorField::operator-(const VectorField& o) const {
  if (chart != o.chart) throw ChartMismatch("vector field difference across charts");
  VectorField r{chart, comps};
  for (size_t i = 0; i < comps.size(); ++i) r.comps[i] = comps[i] - o.comps[i];
  return r;
}

VectorField VectorField::scaled(const Expr& c) const {
  VectorField r{chart, comps};
  for (Expr& e : r.comps) e = e * c;
  return r;
}

Expr OneForm::pair(const VectorField& v) const {
  if (chart != v.chart) throw ChartMismatch("pairing across charts");
  Expr r;
  for (size_t i = 0; i < comps.size(); ++i) r = r + comps[i] * v.comps[i];
  return r;
}

namespace {

// Rescale a generator so its components are polynomials with no common factor:
// multiply through by the lcm of the denominators, divide out the gcd of the
// numerators. The span is unchanged and downstream arithmetic on the basis
// (brackets, Lie derivatives, pairings) stays polynomial.
std::vector<Expr> cleared(std::vector<Expr> comps) {
  Poly lcm = Poly::constant(1);
  bool trivial = true;
  for (const Expr& e : comps)
    if (!e.is_zero() && !e.den().is_one()) {
      trivial = false;
      lcm = Poly::divexact(lcm * e.den(), Poly::gcd(lcm, e.den()));
    }
  std::vector<Poly> nums(comps.size());
  Poly g;
  for (size_t i = 0; i < comps.size(); ++i) {
    if (comps[i].is_zero()) continue;
    nums[i] = comps[i].num() * Poly::divexact(lcm, comps[i].den());
    if (!g.is_constant() || g.is_zero()) g = g.is_zero() ? nums[i] : Poly::gcd(g, nums[i]);
  }
  if (g.is_zero()) return comps;
  if (!g.is_constant()) trivial = false;
  if (trivial) return comps;
  for (size_t i = 0; i < comps.size(); ++i)
    comps[i] = nums[i].is_zero()
                   ? Expr()
                   : Expr::fraction(g.is_constant() ? nums[i] : Poly::divexact(nums[i], g),
                                    Poly::constant(1));
  return comps;
}

}  // namespace

Distribution::Distribution(const Chart& chart, const std::vector<VectorField>& generators)
    : chart_(chart) {
  RowSpace span(static_cast<int>(chart.vars.size()));
  for (const VectorField& g : generators) {
    if (g.chart != chart) throw ChartMismatch("generator chart mismatch");
    if (g.is_zero()) continue;
    std::vector<Expr> comps = cleared(g.comps);
    if (!span.absorb(comps)) continue;  // dependent on the span so far
    basis_.push_back(VectorField{chart, std::move(comps)});
  }
}

SymMatrix Distribution::matrix() const {
  SymMatrix m(static_cast<int>(chart_.vars.size()), dim());
  for (int j = 0; j < dim(); ++j)
    for (size_t i = 0; i < chart_.vars.size(); ++i)
      m.at(static_cast<int>(i), j) = basis_[j].comps[i];
  return m;
}

bool Distribution::contains(const VectorField& v) const {
  if (v.chart != chart_) throw ChartMismatch("membership across charts");
  if (v.is_zero()) return true;
  if (dim() == 0) return false;
  return in_column_span(matrix(), v.comps);
}

Codistribution Codistribution::span(const Chart& chart, const std::vector<OneForm>& gens) {
  Codistribution c;
  c.chart = chart;
  RowSpace span(static_cast<int>(chart.vars.size()));
  for (const OneForm& g : gens) {
    if (g.chart != chart) throw ChartMismatch("one-form chart mismatch");
    bool zero = true;
    for (const Expr& e : g.comps)
      if (!e.is_zero()) zero = false;
    if (zero) continue;
    std::vector<Expr> comps = cleared(g.comps);
    if (!span.absorb(comps)) continue;
    c.basis.push_back(OneForm{chart, std::move(comps)});
  }
  return c;
}

SymMatrix Codistribution::matrix() const {
  std::vector<std::vector<Expr>> rows;
  for (const OneForm& f : basis) rows.push_back(f.comps);
  if (rows.empty()) return SymMatrix(0, static_cast<int>(chart.vars.size()));
  return SymMatrix::from_rows(rows);
}

}  // namespace flatnf
