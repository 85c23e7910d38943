#pragma once
#include <stdexcept>
#include <string>

namespace flatnf {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct SyntaxError : Error {
  int line, col;
  SyntaxError(const std::string& what, int line_, int col_)
      : Error("syntax error at " + std::to_string(line_) + ":" + std::to_string(col_) +
              ": " + what),
        line(line_), col(col_) {}
};

struct UndeclaredIdentifier : Error {
  std::string name;
  UndeclaredIdentifier(const std::string& name_, int line, int col)
      : Error("undeclared identifier '" + name_ + "' at " + std::to_string(line) + ":" +
              std::to_string(col)),
        name(name_) {}
};

struct DivisionByZero : Error {
  DivisionByZero() : Error("division by zero expression") {}
};

struct UnderdeterminedTargets : Error {
  explicit UnderdeterminedTargets(const std::string& what) : Error(what) {}
};

struct UnsupportedAlgebraicForm : Error {
  explicit UnsupportedAlgebraicForm(const std::string& what) : Error(what) {}
};

// Reserved: both rank paths failing at every sampled point. The symbolic path always
// decides, so this is never thrown by the current implementation.
struct EvaluationSingularity : Error {
  explicit EvaluationSingularity(const std::string& what) : Error(what) {}
};

struct ChartMismatch : Error {
  explicit ChartMismatch(const std::string& what) : Error(what) {}
};

struct RankDeficientSystem : Error {
  explicit RankDeficientSystem(const std::string& what) : Error(what) {}
};

struct ExpressionConstructionFailed : Error {
  explicit ExpressionConstructionFailed(const std::string& what) : Error(what) {}
};

struct FixpointFailure : Error {
  explicit FixpointFailure(const std::string& what) : Error(what) {}
};

struct InvariantViolation : Error {
  explicit InvariantViolation(const std::string& what) : Error(what) {}
};

struct NotFlat : Error {
  explicit NotFlat(const std::string& what) : Error(what) {}
};

struct AnsatzExhausted : Error {
  explicit AnsatzExhausted(const std::string& what) : Error(what) {}
};

struct CaseAnalysisViolation : Error {
  explicit CaseAnalysisViolation(const std::string& what) : Error(what) {}
};

struct StructureViolation : Error {
  explicit StructureViolation(const std::string& what) : Error(what) {}
};

struct FileFormatError : Error {
  int line;
  FileFormatError(const std::string& what, int line_)
      : Error("line " + std::to_string(line_) + ": " + what), line(line_) {}
};

}  // namespace flatnf
