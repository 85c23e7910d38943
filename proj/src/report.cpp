#include "flatnf/report.hpp"

#include <sstream>

namespace flatnf {

namespace {

Json varlist_json(const VarList& vars) {
  Json a = Json::array();
  for (const Var& v : vars) a.push_back(v.display());
  return a;
}

const char* step_case_name(StepCase c) {
  switch (c) {
    case StepCase::Full: return "full";
    case StepCase::Pair: return "pair";
    case StepCase::Chain: return "chain";
  }
  return "?";
}

}  // namespace

Json system_json(const DiscreteSystem& sys) {
  Json j;
  j["name"] = sys.name();
  j["states"] = varlist_json(sys.states());
  j["inputs"] = varlist_json(sys.inputs());
  Json updates;
  for (const Var& s : sys.states()) updates[s.display()] = sys.rhs(s).str();
  j["updates"] = updates;
  Json eq;
  for (const auto& [v, q] : sys.equilibrium()) eq[v.display()] = q.get_str();
  j["equilibrium"] = eq;
  j["equilibrium_rank_drop"] = sys.equilibrium().empty() ? Json() : Json(sys.equilibrium_rank_drop());
  return j;
}

Json distribution_json(const Distribution& d) {
  Json j;
  j["dim"] = d.dim();
  j["chart"] = varlist_json(d.chart().vars);
  Json basis = Json::array();
  for (const VectorField& g : d.basis()) {
    Json row = Json::array();
    for (const Expr& c : g.comps) row.push_back(c.str());
    basis.push_back(row);
  }
  j["basis"] = basis;
  return j;
}

Json sequences_json(const SequenceResult& seq) {
  Json j;
  j["kbar"] = seq.kbar;
  j["delta_dims"] = seq.delta_dims();
  Json de = Json::array();
  for (bool b : seq.d_equals_e) de.push_back(b);
  j["d_equals_e"] = de;
  Json D = Json::array(), E = Json::array(), Delta = Json::array();
  for (const Distribution& d : seq.D) D.push_back(distribution_json(d));
  for (const Distribution& d : seq.E) E.push_back(distribution_json(d));
  for (const Distribution& d : seq.Delta) Delta.push_back(distribution_json(d));
  j["D"] = D;
  j["E"] = E;
  j["Delta"] = Delta;
  j["audit"] = seq.audit;
  return j;
}

Json change_json(const CoordChange& ch) {
  Json j;
  j["kind"] = ch.kind == ChangeKind::State ? "state" : "input";
  j["label"] = ch.label;
  j["structure_preserving"] = ch.structure_preserving;
  Json fwd;
  for (const Var& nv : ch.new_vars) fwd[nv.display()] = ch.forward.at(nv).str();
  j["forward"] = fwd;
  Json inv;
  for (const Var& ov : ch.old_vars) inv[ov.display()] = ch.inverse.at(ov).str();
  j["inverse"] = inv;
  return j;
}

Json zpartition_json(const TriangularForm& tf) {
  Json j;
  Json z = Json::array();
  for (const VarList& zg : tf.z) z.push_back(varlist_json(zg));
  j["z"] = z;
  Json cases = Json::array(), zc = Json::array(), alpha = Json::array();
  for (const ZStep& s : tf.steps) {
    cases.push_back(step_case_name(s.kind));
    zc.push_back(s.zc ? Json(s.zc->display()) : Json());
    alpha.push_back(s.alpha.is_zero() ? Json() : Json(s.alpha.str()));
  }
  j["cases"] = cases;
  j["complements"] = zc;
  j["alpha"] = alpha;
  Json blocks = Json::array();
  for (const VarList& b : tf.blocks) blocks.push_back(varlist_json(b));
  j["xhat_blocks"] = blocks;
  return j;
}

Json normal_form_json(const TriangularForm& tf) {
  Json j = system_json(tf.system);
  j["redundancy_eliminated"] = tf.redundancy_eliminated;
  j["redundancy_level"] = tf.redundancy_level < 0 ? Json() : Json(tf.redundancy_level);
  return j;
}

Json parameterization_json(const Parameterization& p) {
  Json j;
  Json fx, fu;
  for (const auto& [v, e] : p.Fx) fx[v.display()] = e.str();
  for (const auto& [v, e] : p.Fu) fu[v.display()] = e.str();
  j["Fx"] = fx;
  j["Fu"] = fu;
  j["R"] = p.R;
  j["q"] = p.q;
  return j;
}

Json checks_json(const std::vector<ParamCheck>& checks) {
  Json a = Json::array();
  for (const ParamCheck& c : checks) {
    Json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["detail"] = c.detail;
    a.push_back(j);
  }
  return a;
}

Json empty_report(const DiscreteSystem& sys, const Options& opt) {
  Json j;
  j["system"] = system_json(sys);
  j["verdicts"] = Json();
  j["sequences"] = Json();
  j["changes"] = Json();
  j["zpartition"] = Json();
  j["normal_form"] = Json();
  j["flat_output"] = Json();
  j["parameterization"] = Json();
  j["checks"] = Json();
  Json meta;
  meta["version"] = "0.1.0";
  meta["seed"] = opt.seed;
  meta["trials"] = opt.trials;
  meta["max_degree"] = opt.max_degree;
  j["meta"] = meta;
  return j;
}

namespace {

void render_system(std::ostream& out, const Json& s) {
  out << "system " << s.at("name").get<std::string>() << "\n";
  out << "  states:";
  for (const auto& v : s.at("states")) out << " " << v.get<std::string>();
  out << "\n  inputs:";
  for (const auto& v : s.at("inputs")) out << " " << v.get<std::string>();
  out << "\n";
  for (const auto& [k, v] : s.at("updates").items())
    out << "  " << k << "+ = " << v.get<std::string>() << "\n";
  if (!s.at("equilibrium").empty()) {
    out << "  equilibrium:";
    for (const auto& [k, v] : s.at("equilibrium").items())
      out << " " << k << "=" << v.get<std::string>();
    if (s.contains("equilibrium_rank_drop") && s.at("equilibrium_rank_drop").is_boolean() &&
        s.at("equilibrium_rank_drop").get<bool>())
      out << "  (rank drops here)";
    out << "\n";
  }
}

void render_distribution_list(std::ostream& out, const char* label, const Json& arr) {
  for (size_t i = 0; i < arr.size(); ++i) {
    const Json& d = arr.at(i);
    out << "  " << label << "_" << (std::string(label) == "Delta" ? i + 1 : i)
        << " (dim " << d.at("dim").get<int>() << "):";
    bool first = true;
    for (const auto& row : d.at("basis")) {
      out << (first ? " " : "; ") << "(";
      for (size_t c = 0; c < row.size(); ++c)
        out << (c ? ", " : "") << row.at(c).get<std::string>();
      out << ")";
      first = false;
    }
    out << "\n";
  }
}

}  // namespace

std::string render_text(const Json& report) {
  std::ostringstream out;
  render_system(out, report.at("system"));

  const Json& v = report.at("verdicts");
  if (!v.is_null()) {
    out << "verdicts\n";
    out << "  flat: " << (v.at("flat").get<bool>() ? "yes" : "no") << "\n";
    out << "  static feedback linearizable: " << (v.at("sfl").get<bool>() ? "yes" : "no")
        << "\n";
    out << "  kbar: " << v.at("kbar").get<int>() << "\n";
  }

  const Json& s = report.at("sequences");
  if (!s.is_null()) {
    out << "sequences\n  delta dims:";
    for (const auto& d : s.at("delta_dims")) out << " " << d.get<int>();
    out << "\n  complete projectability per step:";
    for (const auto& b : s.at("d_equals_e")) out << " " << (b.get<bool>() ? "yes" : "no");
    out << "\n";
    render_distribution_list(out, "E", s.at("E"));
    render_distribution_list(out, "D", s.at("D"));
    render_distribution_list(out, "Delta", s.at("Delta"));
    for (const auto& line : s.at("audit")) out << "  note: " << line.get<std::string>() << "\n";
  }

  const Json& ch = report.at("changes");
  if (!ch.is_null()) {
    out << "coordinate changes\n";
    for (const auto& c : ch) {
      out << "  [" << c.at("kind").get<std::string>() << "] "
          << c.at("label").get<std::string>() << "\n";
      for (const auto& [k, e] : c.at("forward").items()) {
        if (e.get<std::string>() != k) out << "    " << k << " = " << e.get<std::string>() << "\n";
      }
    }
  }

  const Json& zp = report.at("zpartition");
  if (!zp.is_null()) {
    out << "z partition\n";
    for (size_t k = 0; k < zp.at("z").size(); ++k) {
      out << "  z_" << k << " (" << zp.at("cases").at(k).get<std::string>() << "):";
      for (const auto& n : zp.at("z").at(k)) out << " " << n.get<std::string>();
      if (!zp.at("complements").at(k).is_null())
        out << "  carry " << zp.at("complements").at(k).get<std::string>();
      out << "\n";
    }
    out << "  levels:";
    for (size_t k = 0; k < zp.at("xhat_blocks").size(); ++k) {
      out << " [";
      const Json& b = zp.at("xhat_blocks").at(k);
      for (size_t i = 0; i < b.size(); ++i) out << (i ? " " : "") << b.at(i).get<std::string>();
      out << "]";
    }
    out << "\n";
  }

  const Json& nf = report.at("normal_form");
  if (!nf.is_null()) {
    out << "normal form\n";
    for (const auto& [k, e] : nf.at("updates").items())
      out << "  " << k << "+ = " << e.get<std::string>() << "\n";
    if (nf.at("redundancy_eliminated").get<bool>())
      out << "  redundant input eliminated at level " << nf.at("redundancy_level").get<int>()
          << "\n";
  }

  const Json& fo = report.at("flat_output");
  if (!fo.is_null()) {
    out << "flat output\n";
    for (size_t j = 0; j < fo.size(); ++j)
      out << "  y" << (j + 1) << " = " << fo.at(j).get<std::string>() << "\n";
  }

  const Json& pm = report.at("parameterization");
  if (!pm.is_null()) {
    out << "parameterization\n";
    for (const auto& [k, e] : pm.at("Fx").items())
      out << "  " << k << " = " << e.get<std::string>() << "\n";
    for (const auto& [k, e] : pm.at("Fu").items())
      out << "  " << k << " = " << e.get<std::string>() << "\n";
    out << "  R:";
    for (const auto& r : pm.at("R")) out << " " << r.get<int>();
    out << "\n  q: " << pm.at("q").get<int>() << "\n";
  }

  const Json& cks = report.at("checks");
  if (!cks.is_null()) {
    out << "checks\n";
    for (const auto& c : cks) {
      out << "  " << (c.at("pass").get<bool>() ? "pass" : "FAIL") << "  "
          << c.at("name").get<std::string>();
      if (!c.at("detail").get<std::string>().empty())
        out << "  (" << c.at("detail").get<std::string>() << ")";
      out << "\n";
    }
  }

  const Json& meta = report.at("meta");
  out << "meta: seed " << meta.at("seed").get<uint64_t>() << ", trials "
      << meta.at("trials").get<int>() << ", max degree " << meta.at("max_degree").get<int>();
  if (meta.contains("timing_ms")) out << ", " << meta.at("timing_ms").get<long>() << " ms";
  out << "\n";
  return out.str();
}

}  // namespace flatnf
