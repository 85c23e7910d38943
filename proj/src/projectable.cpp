#include "flatnf/projectable.hpp"

#include "flatnf/ansatz.hpp"
#include "flatnf/errors.hpp"

namespace flatnf {

Distribution kernel_distribution(const DiscreteSystem& sys, const Options& opt) {
  sys.require_well_posed(opt);
  std::vector<VectorField> gens;
  for (auto& col : nullspace(sys.jacobian_xu()))
    gens.push_back(VectorField{sys.xu_chart(), col});
  Distribution K(sys.xu_chart(), gens);
  if (K.dim() != sys.m())
    throw InvariantViolation("kernel of the dynamics has dimension " +
                             std::to_string(K.dim()) + ", expected " +
                             std::to_string(sys.m()));
  return K;
}

namespace {

bool has_xu_vars(const Expr& e) {
  for (Var v : e.vars())
    if (v.kind() == VarKind::State || v.kind() == VarKind::Input) return true;
  return false;
}

std::map<Var, Expr> composition_map(const DiscreteSystem& sys) {
  std::map<Var, Expr> comp;
  for (Var s : sys.states()) comp[s.plus()] = sys.rhs(s);
  return comp;
}

bool composes_to(const Expr& candidate, const std::map<Var, Expr>& comp, const Expr& g) {
  try {
    return (candidate.substitute(comp) - g).is_zero();
  } catch (const Error&) {
    return false;
  }
}

// Peel state/input variables off g using the relations x_i^+ = f^i, each equation at
// most once, solving single variables out of numerators affine in them.
std::optional<Expr> eliminate_route(const DiscreteSystem& sys, const Expr& g0) {
  std::vector<Expr> eqs;
  for (Var s : sys.states()) eqs.push_back(Expr::variable(s.plus()) - sys.rhs(s));
  std::vector<bool> used(eqs.size(), false);
  Expr g = g0;

  auto solve_one = [](const Expr& eq, Var v) -> std::optional<Expr> {
    const Poly& num = eq.num();
    if (num.degree_in(v) != 1) return std::nullopt;
    Poly a = num.coeff_of(v, 1);
    Poly b = num.coeff_of(v, 0);
    if (a.depends_on(v) || b.depends_on(v)) return std::nullopt;
    if (a.is_zero()) return std::nullopt;
    return Expr::fraction(-b, a);
  };

  for (size_t round = 0; round < eqs.size() && has_xu_vars(g); ++round) {
    bool progress = false;
    for (size_t i = 0; i < eqs.size() && !progress; ++i) {
      if (used[i]) continue;
      std::vector<Var> in_g, others;
      for (Var v : eqs[i].vars()) {
        if (v.kind() != VarKind::State && v.kind() != VarKind::Input) continue;
        (g.depends_on(v) ? in_g : others).push_back(v);
      }
      in_g.insert(in_g.end(), others.begin(), others.end());
      for (Var v : in_g) {
        auto sol = solve_one(eqs[i], v);
        if (!sol) continue;
        std::map<Var, Expr> sub{{v, *sol}};
        try {
          Expr gnew = g.substitute(sub);
          std::vector<Expr> enew = eqs;
          for (size_t j = 0; j < eqs.size(); ++j)
            if (!used[j] && j != i) enew[j] = eqs[j].substitute(sub);
          g = gnew;
          eqs = std::move(enew);
        } catch (const Error&) {
          continue;
        }
        used[i] = true;
        progress = true;
        break;
      }
    }
    if (!progress) break;
  }
  if (has_xu_vars(g)) return std::nullopt;
  if (!composes_to(g, composition_map(sys), g0)) return std::nullopt;
  return g;
}

// G = N/D over shifted-chart monomials; N o f - g * (D o f) = 0 is linear in the
// coefficients of N and D. Any nonzero solution works: the image of f is dense, so
// D o f = 0 would force D = 0 and with it N = 0.
std::optional<Expr> ansatz_route(const DiscreteSystem& sys, const Expr& g,
                                 const Options& opt) {
  std::map<Var, Expr> comp = composition_map(sys);
  VarList pvars = sys.xplus_chart().vars;
  for (int deg = 1; deg <= opt.max_degree; ++deg) {
    std::vector<Monomial> mons;
    mons.push_back(Monomial::one());
    for (auto& mo : monomial_basis(pvars, deg)) mons.push_back(mo);
    std::vector<Expr> composed;
    for (auto& mo : mons) {
      Poly p;
      p.add_term(mo, 1);
      composed.push_back(Expr::fraction(p, Poly::constant(1)).substitute(comp));
    }
    std::vector<Expr> cols = composed;
    for (auto& c : composed) cols.push_back(-(g * c));
    for (auto& vec : expr_combination_kernel({cols})) {
      Poly N, D;
      for (size_t k = 0; k < mons.size(); ++k) {
        if (vec[k] != 0) N.add_term(mons[k], vec[k]);
        if (vec[k + mons.size()] != 0) D.add_term(mons[k], vec[k + mons.size()]);
      }
      if (D.is_zero()) continue;
      Expr G = Expr::fraction(N, D);
      if (composes_to(G, comp, g)) return G;
    }
  }
  return std::nullopt;
}

bool differential_test(const DiscreteSystem& sys, const Expr& g, const Options&) {
  // dg lies in the row span of d(x,u)f exactly when reducing it by the cached reduced
  // echelon form of the jacobian leaves no residual; the jacobian has full row rank n
  // by well-posedness, so this matches rank([df; dg]) == n.
  const Chart& xu = sys.xu_chart();
  int cols = sys.n() + sys.m();
  const RrefResult& rr = sys.jacobian_xu_rref();
  std::vector<Expr> row(cols);
  for (int j = 0; j < cols; ++j) row[j] = g.diff(xu.vars[j]);
  for (size_t r = 0; r < rr.pivot_cols.size(); ++r) {
    Expr factor = row[rr.pivot_cols[r]];
    if (factor.is_zero()) continue;
    for (int j = 0; j < cols; ++j) {
      const Expr& rj = rr.R.at(static_cast<int>(r), j);
      if (!rj.is_zero()) row[j] = row[j] - factor * rj;
    }
  }
  for (const Expr& e : row)
    if (!e.is_zero()) return false;
  return true;
}

// First state index whose image component fails the differential test, or -1.
int blocked_component(const DiscreteSystem& sys, const VectorField& v,
                      const Options& opt) {
  for (int i = 0; i < sys.n(); ++i) {
    Expr gi = v.apply(sys.rhs(sys.states()[i]));
    if (gi.is_constant()) continue;
    if (!differential_test(sys, gi, opt)) return i;
  }
  return -1;
}

}  // namespace

ExpressResult express_in_image(const DiscreteSystem& sys, const Expr& g,
                               const Options& opt) {
  ExpressResult res;
  if (g.is_constant()) {
    res.ok = true;
    res.image_expr = g;
    return res;
  }
  if (!differential_test(sys, g, opt)) return res;
  res.ok = true;
  if (auto G = eliminate_route(sys, g)) {
    res.image_expr = *G;
    return res;
  }
  if (auto G = ansatz_route(sys, g, opt)) {
    res.image_expr = *G;
    return res;
  }
  throw ExpressionConstructionFailed(
      "a factorization through the dynamics exists but was not constructed for " +
      g.str());
}

PushResult pushforward(const DiscreteSystem& sys, const VectorField& v,
                       const Options& opt) {
  if (v.chart != sys.xu_chart()) throw ChartMismatch("pushforward expects an XU field");
  PushResult r;
  std::vector<Expr> comps(sys.n());
  for (int i = 0; i < sys.n(); ++i) {
    Expr gi = v.apply(sys.rhs(sys.states()[i]));
    ExpressResult er = express_in_image(sys, gi, opt);
    if (!er.ok) {
      r.failed_component = i;
      return r;
    }
    comps[i] = er.image_expr;
  }
  r.ok = true;
  r.image = VectorField{sys.xplus_chart(), comps};
  return r;
}

ProjectableResult largest_projectable_subdistribution(const DiscreteSystem& sys,
                                                      const Distribution& E,
                                                      const Options& opt,
                                                      const Distribution* kernel) {
  const Chart& xu = sys.xu_chart();
  if (E.chart() != xu)
    throw ChartMismatch("largest projectable subdistribution expects an XU distribution");
  ProjectableResult out;

  Distribution K = kernel ? *kernel : kernel_distribution(sys, opt);
  Distribution EK = sum(E, K);
  Codistribution omega = annihilator(EK);
  out.audit.push_back("kernel dim " + std::to_string(K.dim()) + ", E+K dim " +
                      std::to_string(EK.dim()));

  int rounds = 0;
  for (;;) {
    ++rounds;
    if (rounds > static_cast<int>(xu.vars.size()) + 1)
      throw FixpointFailure("invariant annihilator did not stabilize");
    std::vector<OneForm> forms = omega.basis;
    for (const VectorField& w : K.basis())
      for (const OneForm& om : omega.basis) forms.push_back(lie_derivative(w, om));
    Codistribution grown = Codistribution::span(xu, forms);
    if (grown.dim() == omega.dim()) break;
    omega = grown;
  }
  out.fixpoint_rounds = rounds;
  out.audit.push_back("annihilator stable at dim " + std::to_string(omega.dim()) +
                      " after " + std::to_string(rounds) + " round(s)");

  Distribution C = from_annihilator(omega);
  for (const VectorField& w : K.basis())
    if (!C.contains(w)) throw FixpointFailure("kernel escaped the invariant hull");

  std::vector<OneForm> cut = omega.basis;
  for (const OneForm& f : annihilator(E).basis) cut.push_back(f);
  Distribution Draw = from_annihilator(Codistribution::span(xu, cut));
  out.audit.push_back("C dim " + std::to_string(C.dim()) + ", D dim " +
                      std::to_string(Draw.dim()));

  // Adapt the basis: reduce the rows v(f) over the function field. The reduced form of
  // the (fiber-constant) image row space is itself fiber-constant, so its rows can be
  // written in the shifted chart and lifted back to combinations of the D basis.
  int d = Draw.dim();
  std::vector<std::vector<Expr>> image_rows;
  for (const VectorField& v : Draw.basis()) {
    std::vector<Expr> row(sys.n());
    for (int i = 0; i < sys.n(); ++i) row[i] = v.apply(sys.rhs(sys.states()[i]));
    image_rows.push_back(row);
  }

  std::vector<VectorField> delta_gens, adapted;
  int r = 0;
  if (d > 0) {
    RrefResult red = rref(SymMatrix::from_rows(image_rows));
    r = red.rank;
    // One elimination lifts every reduced row at once: [lift | row_0^T .. row_{r-1}^T].
    SymMatrix aug(sys.n(), d + r);
    for (int i = 0; i < sys.n(); ++i) {
      for (int a = 0; a < d; ++a) aug.at(i, a) = image_rows[a][i];
      for (int k = 0; k < r; ++k) aug.at(i, d + k) = red.R.at(k, i);
    }
    RrefResult ar = rref(aug);
    for (int c : ar.pivot_cols)
      if (c >= d) throw FixpointFailure("lift of reduced image row failed");
    for (int i = 0; i < r; ++i) {
      std::vector<Expr> G(sys.n());
      for (int j = 0; j < sys.n(); ++j) {
        ExpressResult er = express_in_image(sys, red.R.at(i, j), opt);
        if (!er.ok)
          throw FixpointFailure("reduced image row is not constant along fibers");
        G[j] = er.image_expr;
      }
      delta_gens.push_back(VectorField{sys.xplus_chart(), G});
      std::vector<Expr> sol(d);
      for (size_t p = 0; p < ar.pivot_cols.size(); ++p)
        sol[ar.pivot_cols[p]] = ar.R.at(static_cast<int>(p), d + i);
      VectorField lv = VectorField::zero(xu);
      for (int a = 0; a < d; ++a) lv = lv + Draw.basis()[a].scaled(sol[a]);
      adapted.push_back(lv);
    }
  }
  Distribution DK = intersect(Draw, K);
  if (DK.dim() != d - r)
    throw FixpointFailure("vertical part of D has dimension " +
                          std::to_string(DK.dim()) + ", expected " +
                          std::to_string(d - r));
  for (const VectorField& v : DK.basis()) adapted.push_back(v);

  Distribution D(xu, adapted);
  if (D.dim() != d || !span_equal(D, Draw))
    throw FixpointFailure("basis adaptation changed the span");

  for (int j = 0; j < d; ++j) {
    PushResult pr = pushforward(sys, adapted[j], opt);
    if (!pr.ok)
      throw FixpointFailure("adapted generator " + std::to_string(j) +
                            " is not projectable (component " +
                            std::to_string(pr.failed_component) + ")");
    if (j < r) {
      for (int i = 0; i < sys.n(); ++i)
        if (pr.image.comps[i] != delta_gens[j].comps[i])
          throw FixpointFailure("pushforward of adapted generator " + std::to_string(j) +
                                " disagrees with the reduced image row");
    } else if (!pr.image.is_zero()) {
      throw FixpointFailure("vertical generator " + std::to_string(j) +
                            " has a nonzero pushforward");
    }
  }

  out.D = D;
  out.image = Distribution(sys.xplus_chart(), delta_gens);
  if (out.image.dim() != r) throw InvariantViolation("image basis is dependent");
  // Involutivity only depends on the span, so test it on Draw's annihilator-derived
  // basis; the adapted basis carries much heavier coefficient functions.
  out.involutive = is_involutive(Draw);
  out.audit.push_back("image rank " + std::to_string(r) +
                      (out.involutive ? ", D involutive" : ", D NOT involutive"));

  if (D.dim() < E.dim()) {
    int witness = -1, blocked = -1;
    for (size_t i = 0; i < E.basis().size(); ++i) {
      if (D.contains(E.basis()[i])) continue;
      witness = static_cast<int>(i);
      blocked = blocked_component(sys, E.basis()[i], opt);
      break;
    }
    if (witness < 0 || blocked < 0)
      throw InvariantViolation(
          "D is a strict subdistribution but no E generator witnesses it");
    out.audit.push_back("witness: E basis field " + std::to_string(witness) +
                        " blocked at component " + std::to_string(blocked));
  }
  return out;
}

}  // namespace flatnf
