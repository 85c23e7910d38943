#include "flatnf/diffgeo.hpp"

#include "flatnf/errors.hpp"

namespace flatnf {

VectorField lie_bracket(const VectorField& v, const VectorField& w) {
  if (v.chart != w.chart) throw ChartMismatch("bracket across charts");
  VectorField r = VectorField::zero(v.chart);
  for (size_t i = 0; i < r.comps.size(); ++i)
    r.comps[i] = v.apply(w.comps[i]) - w.apply(v.comps[i]);
  return r;
}

bool is_involutive(const Distribution& D,
                   std::optional<InvolutivityWitness>* witness) {
  const auto& b = D.basis();
  for (size_t i = 0; i + 1 < b.size(); ++i)
    for (size_t j = i + 1; j < b.size(); ++j) {
      VectorField br = lie_bracket(b[i], b[j]);
      if (!D.contains(br)) {
        if (witness)
          *witness = InvolutivityWitness{static_cast<int>(i), static_cast<int>(j), br};
        return false;
      }
    }
  if (witness) witness->reset();
  return true;
}

Codistribution annihilator(const Distribution& D) {
  std::vector<OneForm> forms;
  if (D.dim() == 0) {
    for (Var v : D.chart().vars) {
      OneForm w{D.chart(), std::vector<Expr>(D.chart().vars.size())};
      w.comps[D.chart().index_of(v)] = Expr::integer(1);
      forms.push_back(w);
    }
  } else {
    for (const auto& row : nullspace(D.matrix().transposed()))
      forms.push_back(OneForm{D.chart(), row});
  }
  Codistribution W = Codistribution::span(D.chart(), forms);
  if (W.dim() + D.dim() != static_cast<int>(D.chart().vars.size()))
    throw InvariantViolation("annihilator dimension mismatch");
  return W;
}

Distribution from_annihilator(const Codistribution& W) {
  std::vector<VectorField> fields;
  if (W.dim() == 0) {
    for (Var v : W.chart.vars)
      fields.push_back(VectorField::coordinate(W.chart, v));
  } else {
    for (const auto& col : nullspace(W.matrix()))
      fields.push_back(VectorField{W.chart, col});
  }
  Distribution D(W.chart, fields);
  if (W.dim() + D.dim() != static_cast<int>(W.chart.vars.size()))
    throw InvariantViolation("coannihilator dimension mismatch");
  return D;
}

OneForm lie_derivative(const VectorField& w, const OneForm& omega) {
  if (w.chart != omega.chart) throw ChartMismatch("Lie derivative across charts");
  OneForm r{w.chart, std::vector<Expr>(w.comps.size())};
  for (size_t i = 0; i < r.comps.size(); ++i) {
    Expr acc = w.apply(omega.comps[i]);
    for (size_t j = 0; j < w.comps.size(); ++j) {
      if (omega.comps[j].is_zero()) continue;
      Expr d = w.comps[j].diff(w.chart.vars[i]);
      if (!d.is_zero()) acc = acc + omega.comps[j] * d;
    }
    r.comps[i] = acc;
  }
  return r;
}

bool span_equal(const Distribution& A, const Distribution& B) {
  if (A.chart() != B.chart()) throw ChartMismatch("span comparison across charts");
  if (A.dim() != B.dim()) return false;
  for (const VectorField& v : A.basis())
    if (!B.contains(v)) return false;
  return true;
}

Distribution sum(const Distribution& A, const Distribution& B) {
  if (A.chart() != B.chart()) throw ChartMismatch("sum across charts");
  std::vector<VectorField> gens = A.basis();
  for (const VectorField& v : B.basis()) gens.push_back(v);
  return Distribution(A.chart(), gens);
}

Distribution intersect(const Distribution& A, const Distribution& B) {
  if (A.chart() != B.chart()) throw ChartMismatch("intersection across charts");
  Codistribution wa = annihilator(A);
  Codistribution wb = annihilator(B);
  std::vector<OneForm> forms = wa.basis;
  for (const OneForm& w : wb.basis) forms.push_back(w);
  return from_annihilator(Codistribution::span(A.chart(), forms));
}

Distribution preimage_under_projection(const Distribution& delta, const Chart& xu) {
  if (delta.chart().tag != ChartTag::Xplus || xu.tag != ChartTag::XU)
    throw ChartMismatch("projection preimage expects a shifted-state distribution");
  std::map<Var, Var> back;
  for (Var v : delta.chart().vars) back[v] = v.unplus();

  std::vector<VectorField> gens;
  for (const VectorField& g : delta.basis()) {
    VectorField lifted = VectorField::zero(xu);
    for (size_t i = 0; i < delta.chart().vars.size(); ++i) {
      Var target = delta.chart().vars[i].unplus();
      lifted.comps[xu.index_of(target)] = g.comps[i].rename(back);
    }
    gens.push_back(lifted);
  }
  for (Var v : xu.vars)
    if (v.kind() == VarKind::Input) gens.push_back(VectorField::coordinate(xu, v));
  return Distribution(xu, gens);
}

}  // namespace flatnf
