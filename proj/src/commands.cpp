#include "flatnf/commands.hpp"

#include <chrono>
#include <optional>
#include <ostream>

#include "flatnf/diffgeo.hpp"
#include "flatnf/errors.hpp"
#include "flatnf/parameterize.hpp"
#include "flatnf/report.hpp"
#include "flatnf/sysfile.hpp"

namespace flatnf {

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void emit(std::ostream& out, Json& rep, const CommandOptions& opt, const Timer& t) {
  if (opt.timing) rep["meta"]["timing_ms"] = t.ms();
  if (opt.json)
    out << rep.dump(2) << "\n";
  else
    out << render_text(rep);
}

Json verdicts_json(const SequenceResult& seq) {
  Json v;
  v["flat"] = seq.flat;
  v["sfl"] = seq.sfl;
  v["kbar"] = seq.kbar;
  return v;
}

Distribution coordinate_span(const Chart& chart, const VarList& vars) {
  std::vector<VectorField> gens;
  for (const Var& v : vars) gens.push_back(VectorField::coordinate(chart, v));
  return Distribution(chart, gens);
}

// For the forced multi-input path: the straightened D sequence must already be spanned
// by coordinate fields; the partition is then read off rather than constructed.
ZPartitionResult read_off_partition(const StraightenResult& st) {
  const Chart& xu = st.system.xu_chart();
  ZPartitionResult zp;
  zp.system = st.system;
  zp.blocks = st.blocks;
  zp.D = st.D;
  zp.Delta = st.Delta;
  VarList prior;
  for (size_t k = 0; k < st.D.size(); ++k) {
    const Distribution& dk = st.D[k];
    ZStep step;
    step.k = static_cast<int>(k);
    step.kind = StepCase::Full;
    for (const Var& v : xu.vars) {
      if (std::find(prior.begin(), prior.end(), v) != prior.end()) continue;
      if (dk.contains(VectorField::coordinate(xu, v))) step.z.push_back(v);
    }
    if (static_cast<int>(prior.size() + step.z.size()) != dk.dim())
      throw CaseAnalysisViolation(
          "D_" + std::to_string(k) +
          " is not coordinate after straightening; the step-by-step construction "
          "only covers two inputs");
    for (const Var& v : step.z) prior.push_back(v);
    zp.steps.push_back(std::move(step));
  }
  return zp;
}

struct Pipeline {
  DiscreteSystem sys;
  SequenceResult seq;
  std::optional<StraightenResult> st;
  std::optional<TriangularForm> tf;
};

Pipeline run_pipeline(const DiscreteSystem& sys, const Options& opt, bool want_normal_form) {
  Pipeline p{sys, compute_sequences(sys, opt), std::nullopt, std::nullopt};
  if (!p.seq.flat || !want_normal_form) return p;
  p.st = straighten_delta(sys, p.seq, opt);
  if (sys.m() == 2) {
    ZPartitionResult zp = build_zpartition(*p.st, opt);
    TriangularForm tf = assemble_triangular(*p.st, zp, opt);
    p.tf = eliminate_redundant_input(tf, opt);
  } else {
    p.tf = assemble_triangular(*p.st, read_off_partition(*p.st), opt);
  }
  return p;
}

void fill_normal_form(Json& rep, const Pipeline& p) {
  Json changes = Json::array();
  for (const CoordChange& ch : p.tf->changes) changes.push_back(change_json(ch));
  rep["changes"] = changes;
  rep["zpartition"] = zpartition_json(*p.tf);
  rep["normal_form"] = normal_form_json(*p.tf);
  if (!p.tf->flat_output.empty()) {
    Json fo = Json::array();
    for (const Expr& e : flat_output_in_original(*p.tf)) fo.push_back(e.str());
    rep["flat_output"] = fo;
  }
}

bool refuse_inputs(const DiscreteSystem& sys, const CommandOptions& opt, std::ostream& err) {
  if (sys.m() == 2 || opt.core.force_multi) return false;
  err << "error: the normal form construction covers two-input systems; this one has "
      << sys.m() << " input" << (sys.m() == 1 ? "" : "s")
      << ". Pass --force-multi to attempt the coordinate read-off anyway.\n";
  return true;
}

template <typename F>
int guarded(std::ostream& err, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int cmd_check(const std::string& path, const CommandOptions& opt, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&]() {
    DiscreteSystem sys = load_system(path);
    Timer t;
    SequenceResult seq = compute_sequences(sys, opt.core);
    Json rep = empty_report(sys, opt.core);
    rep["verdicts"] = verdicts_json(seq);
    rep["sequences"] = sequences_json(seq);
    emit(out, rep, opt, t);
    return seq.flat ? 0 : 1;
  });
}

int cmd_normalform(const std::string& path, const CommandOptions& opt, std::ostream& out,
                   std::ostream& err) {
  return guarded(err, [&]() {
    DiscreteSystem sys = load_system(path);
    if (refuse_inputs(sys, opt, err)) return 2;
    Timer t;
    Pipeline p = run_pipeline(sys, opt.core, true);
    Json rep = empty_report(sys, opt.core);
    rep["verdicts"] = verdicts_json(p.seq);
    rep["sequences"] = sequences_json(p.seq);
    if (!p.seq.flat) {
      emit(out, rep, opt, t);
      return 1;
    }
    fill_normal_form(rep, p);
    emit(out, rep, opt, t);
    return 0;
  });
}

int cmd_parameterize(const std::string& path, const CommandOptions& opt, std::ostream& out,
                     std::ostream& err) {
  return guarded(err, [&]() {
    DiscreteSystem sys = load_system(path);
    if (refuse_inputs(sys, opt, err)) return 2;
    Timer t;
    Pipeline p = run_pipeline(sys, opt.core, true);
    Json rep = empty_report(sys, opt.core);
    rep["verdicts"] = verdicts_json(p.seq);
    rep["sequences"] = sequences_json(p.seq);
    if (!p.seq.flat) {
      emit(out, rep, opt, t);
      return 1;
    }
    fill_normal_form(rep, p);
    if (p.tf->flat_output.empty()) {
      emit(out, rep, opt, t);
      err << "error: the top level has dimension below the input count; no flat output "
             "was constructed\n";
      return 2;
    }
    Parameterization par = build_parameterization(sys, *p.tf, opt.core);
    std::vector<ParamCheck> checks = verify_parameterization(sys, par);
    rep["parameterization"] = parameterization_json(par);
    rep["checks"] = checks_json(checks);
    bool all_pass = true;
    for (const ParamCheck& c : checks) all_pass = all_pass && c.pass;
    emit(out, rep, opt, t);
    if (!all_pass) {
      err << "error: the parameterization residuals do not vanish\n";
      return 2;
    }
    return 0;
  });
}

int cmd_verify(const std::string& path, const CommandOptions& opt, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&]() {
    DiscreteSystem sys = load_system(path);
    Timer t;
    std::vector<ParamCheck> checks;
    auto add = [&](const std::string& name, bool pass, const std::string& detail = "") {
      checks.push_back({name, pass, pass ? "" : detail});
    };

    Json rep = empty_report(sys, opt.core);
    SequenceResult seq;
    try {
      seq = compute_sequences(sys, opt.core);
    } catch (const Error& e) {
      add("sequence_computation", false, e.what());
      rep["checks"] = checks_json(checks);
      emit(out, rep, opt, t);
      return 1;
    }
    rep["verdicts"] = verdicts_json(seq);
    rep["sequences"] = sequences_json(seq);

    const int n = sys.n(), m = sys.m();
    for (size_t k = 0; k < seq.D.size(); ++k) {
      int dim_delta = (k == 0) ? 0 : seq.Delta[k - 1].dim();
      add("dim_relation_step_" + std::to_string(k), seq.E[k].dim() == dim_delta + m,
          "dim E != dim Delta + m");
      bool inside = true;
      for (const VectorField& g : seq.D[k].basis()) inside = inside && seq.E[k].contains(g);
      add("containment_step_" + std::to_string(k), inside, "D_k escapes E_k");
      if (k > 0) {
        bool nested = true;
        for (const VectorField& g : seq.D[k - 1].basis()) nested = nested && seq.D[k].contains(g);
        for (const VectorField& g : seq.Delta[k - 1].basis())
          nested = nested && seq.Delta[k].contains(g);
        add("nestedness_step_" + std::to_string(k), nested, "sequence is not nested");
      }
      add("involutive_D_" + std::to_string(k), is_involutive(seq.D[k]), "D_k not involutive");
      add("involutive_Delta_" + std::to_string(k + 1), is_involutive(seq.Delta[k]),
          "Delta not involutive");
      std::vector<VectorField> images;
      bool push_ok = true;
      for (const VectorField& g : seq.D[k].basis()) {
        PushResult pr = pushforward(sys, g, opt.core);
        push_ok = push_ok && pr.ok;
        if (pr.ok) images.push_back(pr.image);
      }
      add("pushforward_step_" + std::to_string(k),
          push_ok && span_equal(Distribution(sys.xplus_chart(), images), seq.Delta[k]),
          "f_*(D_k) does not match Delta_{k+1}");
    }
    if (seq.flat)
      add("last_step_completely_projectable", check_last_step_projectable(seq),
          "flat but E_{kbar-1} is not completely projectable");
    if (seq.flat && m == 2)
      for (size_t k = 1; k < seq.D.size(); ++k) {
        int growth = seq.D[k].dim() - seq.D[k - 1].dim();
        add("growth_step_" + std::to_string(k), growth == 1 || growth == 2,
            "two-input growth outside {1,2}");
      }

    if (seq.flat && (m == 2 || opt.core.force_multi)) {
      try {
        Pipeline p = run_pipeline(sys, opt.core, true);
        fill_normal_form(rep, p);
        for (size_t i = 0; i < p.tf->changes.size(); ++i)
          add("roundtrip_change_" + std::to_string(i), p.tf->changes[i].verify_roundtrip(),
              "coordinate change fails its round trip");
        try {
          verify_triangular(*p.tf, opt.core);
          add("triangular_structure", true);
        } catch (const Error& e) {
          add("triangular_structure", false, e.what());
        }
        if (!p.tf->flat_output.empty()) {
          Parameterization par = build_parameterization(sys, *p.tf, opt.core);
          rep["parameterization"] = parameterization_json(par);
          for (const ParamCheck& c : verify_parameterization(sys, par)) checks.push_back(c);
        }
      } catch (const Error& e) {
        add("normal_form_pipeline", false, e.what());
      }
    }

    rep["checks"] = checks_json(checks);
    emit(out, rep, opt, t);
    for (const ParamCheck& c : checks)
      if (!c.pass) return 1;
    return 0;
  });
}

}  // namespace flatnf
