#include <pybind11/pybind11.h>

#include <sstream>

#include "flatnf/commands.hpp"

namespace py = pybind11;

namespace {

using Runner = int (*)(const std::string&, const flatnf::CommandOptions&, std::ostream&,
                       std::ostream&);

// Every operation reads a system file, writes a JSON report, and signals the verdict
// through the exit code (0 positive, 1 definite negative, 2 error). The python side
// gets the raw triple and decides what to raise.
py::tuple run(Runner fn, const std::string& path, uint64_t seed, int trials, int max_degree,
              bool force_multi, bool timing) {
  flatnf::CommandOptions opt;
  opt.json = true;
  opt.timing = timing;
  opt.core.seed = seed;
  opt.core.trials = trials;
  opt.core.max_degree = max_degree;
  opt.core.force_multi = force_multi;
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = fn(path, opt, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_flatnf, m) {
  m.doc() = "flatness test and triangular normal form for discrete-time systems";

  auto bind = [&m](const char* name, Runner fn, const char* doc) {
    m.def(
        name,
        [fn](const std::string& path, uint64_t seed, int trials, int max_degree,
             bool force_multi, bool timing) {
          return run(fn, path, seed, trials, max_degree, force_multi, timing);
        },
        py::arg("path"), py::arg("seed") = 0, py::arg("trials") = 5, py::arg("max_degree") = 3,
        py::arg("force_multi") = false, py::arg("timing") = false, doc);
  };

  bind("check", &flatnf::cmd_check,
       "Decide flatness. Returns (exit_code, report_json, errors).");
  bind("normalform", &flatnf::cmd_normalform,
       "Construct the triangular normal form. Returns (exit_code, report_json, errors).");
  bind("parameterize", &flatnf::cmd_parameterize,
       "Express all system variables by the flat output and its forward shifts. "
       "Returns (exit_code, report_json, errors).");
  bind("verify", &flatnf::cmd_verify,
       "Run every pipeline invariant on the file. Returns (exit_code, report_json, errors).");
}
